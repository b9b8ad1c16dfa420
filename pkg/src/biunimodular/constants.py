"""Exponents of three length-36 biunimodular vectors giving perfect tensors in d = 6.

Row-major: entry ``(a, b)`` of the 6x6 array is ``EXPONENTS[name][6 * a + b]``
and the phase is ``exp(2 pi i * e / ROOT_ORDER[name])``.
"""

EXPONENTS = {
    "L1": (
        0, 1, 0, 1, 3, 3,
        3, 3, 1, 5, 2, 4,
        2, 1, 3, 1, 2, 3,
        1, 1, 2, 0, 3, 5,
        5, 3, 2, 3, 2, 5,
        4, 4, 1, 5, 5, 1,
    ),
    "L2": (
        0, 2, 3, 3, 2, 0,
        0, 3, 2, 2, 0, 4,
        2, 0, 3, 5, 0, 0,
        0, 5, 0, 0, 2, 0,
        2, 2, 5, 3, 2, 4,
        2, 3, 0, 2, 0, 0,
    ),
    "L3": (
        0, 2, 2, 0, 0, 1,
        0, 1, 1, 1, 2, 1,
        0, 2, 0, 2, 2, 2,
        2, 0, 2, 2, 2, 1,
        1, 1, 2, 0, 2, 2,
        0, 1, 2, 2, 1, 0,
    ),
}

ROOT_ORDER = {"L1": 6, "L2": 6, "L3": 3}

# transcription guards: (sum of exponents, sum of position-weighted exponents)
CHECKSUMS = {
    "L1": (90, 1797),
    "L2": (63, 1104),
    "L3": (42, 783),
}
