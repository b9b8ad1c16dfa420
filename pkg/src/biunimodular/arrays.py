"""Unimodular phase arrays and their correlation / Fourier properties.

A phase array is a ``d x d`` array of unit-modulus numbers ``lam[a, b]``.
Flattened row-major it is a vector of length ``d**2``; its two-dimensional
transform ``(F_d (x) F_d)|lam>`` is :func:`fourier_transform`.

Functions accept a :class:`PhaseArray` or a plain complex array of shape
``(..., d, d)``.
"""

import csv
import io
import json
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import constants

UNIMODULAR_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PhaseArray:
    """``d x d`` array of phases, optionally with exact exponents of a root of unity."""

    entries: np.ndarray
    root_order: int | None = None
    exponents: np.ndarray | None = None

    def __post_init__(self):
        e = np.array(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] < 2:
            raise ValueError(f"phase array must be d x d with d >= 2, got shape {e.shape}")
        if np.max(np.abs(np.abs(e) - 1)) > UNIMODULAR_TOL:
            raise ValueError("phase array entries must have unit modulus")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        if self.exponents is not None:
            x = np.array(self.exponents, dtype=np.int64).reshape(e.shape)
            x.setflags(write=False)
            object.__setattr__(self, "exponents", x)

    @classmethod
    def from_exponents(cls, exponents, root_order, d=None):
        x = np.asarray(exponents, dtype=np.int64)
        if d is not None:
            x = x.reshape(d, d)
        elif x.ndim == 1:
            n = int(round(np.sqrt(x.size)))
            x = x.reshape(n, n)
        x = np.mod(x, root_order)
        entries = np.exp(2j * np.pi * x / root_order)
        return cls(entries, int(root_order), x)

    @classmethod
    def from_angles(cls, theta):
        return cls(np.exp(1j * np.asarray(theta, dtype=float)))

    @property
    def d(self):
        return self.entries.shape[0]

    @property
    def flat(self):
        return self.entries.reshape(-1)

    def normalized(self):
        """Copy with the overall phase removed so that entry ``(0, 0)`` is 1."""
        if self.exponents is not None:
            return PhaseArray.from_exponents(self.exponents - self.exponents[0, 0], self.root_order)
        return PhaseArray(self.entries / self.entries[0, 0])

    def distinct_phases(self, tol=1e-9):
        """Number of distinct phases (after removing the overall phase)."""
        if self.exponents is not None:
            return len(np.unique(self.exponents))
        ang = np.sort(np.mod(np.angle(self.normalized().flat), 2 * np.pi))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
        return max(1, int(np.sum(gaps > tol)))

    def to_dict(self):
        return {
            "d": self.d,
            "root_order": self.root_order,
            "exponents": None if self.exponents is None else [int(v) for v in self.exponents.reshape(-1)],
            "entries": [[float(z.real), float(z.imag)] for z in self.flat],
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        d = int(data["d"])
        if data.get("exponents") is not None and data.get("root_order") is not None:
            return cls.from_exponents(data["exponents"], int(data["root_order"]), d)
        entries = data.get("entries")
        if entries is None or len(entries) != d * d:
            raise ValueError("phase array JSON needs exponents/root_order or d*d entries")
        return cls(np.array([complex(re, im) for re, im in entries]).reshape(d, d))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        if self.exponents is not None:
            return f"PhaseArray(d={self.d}, root_order={self.root_order}, exponents={self.exponents.reshape(-1).tolist()})"
        return f"PhaseArray(d={self.d})"


def entries_of(lam):
    if isinstance(lam, PhaseArray):
        return lam.entries
    lam = np.asarray(lam, dtype=complex)
    if lam.ndim < 2 or lam.shape[-1] != lam.shape[-2]:
        raise ValueError(f"expected (..., d, d) array, got shape {lam.shape}")
    return lam


def _check_shift(d, k, l):
    if not (0 <= k < d and 0 <= l < d):
        raise ValueError(f"shift ({k}, {l}) out of range for d={d}")


def autocorrelation(lam, k, l):
    """Periodic autocorrelation ``sum_{a,b} lam[a,b] conj(lam[a+k, b+l])``."""
    e = entries_of(lam)
    d = e.shape[-1]
    _check_shift(d, k, l)
    shifted = np.roll(e, (-k, -l), axis=(-2, -1))
    return np.sum(e * shifted.conj(), axis=(-2, -1))


def _weights(d, k, l):
    a = np.arange(d)[:, None]
    b = np.arange(d)[None, :]
    return np.exp(2j * np.pi * ((a * l - b * k) % d) / d)


def weighted_autocorrelation(lam, k, l):
    """``sum_{a,b} omega**(a l - b k) lam[a,b] conj(lam[a+k, b+l])``; vanishes off (0,0) iff T-dual."""
    e = entries_of(lam)
    d = e.shape[-1]
    _check_shift(d, k, l)
    shifted = np.roll(e, (-k, -l), axis=(-2, -1))
    return np.sum(_weights(d, k, l) * e * shifted.conj(), axis=(-2, -1))


def correlation_spectrum(lam, weighted=False):
    """All shifts at once: ``out[..., k, l]`` is the (weighted) autocorrelation at ``(k, l)``."""
    e = entries_of(lam)
    d = e.shape[-1]
    fn = weighted_autocorrelation if weighted else autocorrelation
    out = np.empty(e.shape, dtype=complex)
    for k, l in product(range(d), repeat=2):
        out[..., k, l] = fn(e, k, l)
    return out


def correlation_residual(lam, weighted=False):
    """Euclidean norm of the spectrum over nonzero shifts, divided by ``d``.

    Equals ``Delta(U^R)`` (plain) or ``Delta(U^Gamma)`` (weighted) for the
    diagonal unitary built from ``lam``.
    """
    c = correlation_spectrum(lam, weighted)
    d = c.shape[-1]
    c[..., 0, 0] = 0
    return np.linalg.norm(c, axis=(-2, -1)) / d


def spectrum_to_csv(spectrum):
    spectrum = np.asarray(spectrum)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "l", "re", "im"])
    d = spectrum.shape[0]
    for k, l in product(range(d), repeat=2):
        z = complex(spectrum[k, l])
        w.writerow([k, l, repr(z.real), repr(z.imag)])
    return buf.getvalue()


def fourier_transform(lam):
    """``(F_d (x) F_d)|lam>`` as a ``d x d`` array: ``(1/d) sum_{mn} omega**(am+bn) lam[m,n]``."""
    return np.fft.ifft2(entries_of(lam), norm="ortho", axes=(-2, -1))


def is_unimodular(z, tol=UNIMODULAR_TOL):
    return bool(np.all(np.abs(np.abs(z) - 1) <= tol))


def is_biunimodular(lam, tol=1e-10):
    e = entries_of(lam)
    return is_unimodular(e, tol) and is_unimodular(fourier_transform(e), tol)


def balance_check(lam):
    """``|sum lam|**2``; equals ``d**2`` for every perfect array."""
    return np.abs(np.sum(entries_of(lam), axis=(-2, -1))) ** 2


def quadratic_ansatz(d, c_aa, c_ab, c_bb):
    """``lam[a,b] = omega**(c_aa a^2 + c_ab a b + c_bb b^2)``."""
    if d < 2:
        raise ValueError("d must be >= 2")
    a = np.arange(d)[:, None]
    b = np.arange(d)[None, :]
    return PhaseArray.from_exponents(c_aa * a * a + c_ab * a * b + c_bb * b * b, d)


@dataclass(frozen=True)
class ModularSolutionSet:
    d: int
    solutions: frozenset

    def nontrivial(self):
        return self.solutions - {(0, 0)}


def ansatz_linear_forms(d, coeffs, weighted=False):
    """Linear forms over Z_d controlling the correlations of a quadratic ansatz.

    For ``F = c_aa a^2 + c_ab ab + c_bb b^2``,
    ``F(a+k, b+l) - F(a, b) = a (2 c_aa k + c_ab l) + b (c_ab k + 2 c_bb l) + const``,
    so the correlation at shift ``(k, l)`` factorizes into two geometric sums
    that are nonzero only when both linear forms vanish mod ``d``. The weight
    ``omega**(al - bk)`` shifts the forms by ``-l`` and ``+k``.

    Returns ``((p_k, p_l), (q_k, q_l))``: the forms ``p_k k + p_l l`` and
    ``q_k k + q_l l`` (mod ``d``).
    """
    c_aa, c_ab, c_bb = coeffs
    first = (2 * c_aa, c_ab - (1 if weighted else 0))
    second = (c_ab + (1 if weighted else 0), 2 * c_bb)
    return tuple((x % d, y % d) for x, y in (first, second))


def _solve(d, forms):
    (pk, pl), (qk, ql) = forms
    sols = frozenset(
        (k, l) for k, l in product(range(d), repeat=2) if (pk * k + pl * l) % d == 0 and (qk * k + ql * l) % d == 0
    )
    return ModularSolutionSet(d, sols)


def modular_solutions_dual(d, coeffs=(1, 1, -1)):
    return _solve(d, ansatz_linear_forms(d, coeffs, weighted=False))


def modular_solutions_tdual(d, coeffs=(1, 1, -1)):
    return _solve(d, ansatz_linear_forms(d, coeffs, weighted=True))


def gauss_sequence(n):
    """Gauss sequence of length ``n``: ``exp(2 pi i k^2 / n)`` for odd ``n``, ``exp(pi i k^2 / n)`` for even ``n``.

    Both are biunimodular with respect to ``F_n``.
    """
    k = np.arange(n)
    if n % 2:
        return np.exp(2j * np.pi * (k * k % n) / n)
    return np.exp(1j * np.pi * (k * k % (2 * n)) / n)


def tensor_product(v1, v2):
    """Phase array ``lam[a, b] = v1[a] * v2[b]``."""
    v1 = np.asarray(v1, dtype=complex).reshape(-1)
    v2 = np.asarray(v2, dtype=complex).reshape(-1)
    if v1.size != v2.size:
        raise ValueError(f"length mismatch: {v1.size} vs {v2.size}")
    return PhaseArray(np.outer(v1, v2))


def gauss_product(d):
    if d % 2:
        a = np.arange(d)
        return PhaseArray.from_exponents((a[:, None] ** 2 + a[None, :] ** 2), d)
    return tensor_product(gauss_sequence(d), gauss_sequence(d))


_ALIASES = {"l1": "L1", "lambda1": "L1", "Λ1": "L1", "l2": "L2", "lambda2": "L2", "Λ2": "L2",
            "l3": "L3", "lambda3": "L3", "Λ3": "L3"}


def known_vector(name):
    key = _ALIASES.get(name.lower() if name.isascii() else name, name)
    if key not in constants.EXPONENTS:
        raise KeyError(f"unknown vector {name!r}; choose from L1, L2, L3")
    return PhaseArray.from_exponents(constants.EXPONENTS[key], constants.ROOT_ORDER[key], 6)


def known_vectors():
    return {name: known_vector(name) for name in constants.EXPONENTS}


def two_qubit_family(lam, tol=1e-8):
    """Which of ``(1, t, 1, -t)`` (returns 1) or ``(1, t, -1, t)`` (returns 2) matches ``lam`` up to global phase.

    The comparison uses the row-major flattening ``(lam00, lam01, lam10, lam11)``.
    Returns ``None`` when neither matches.
    """
    v = entries_of(lam).reshape(-1)
    if v.size != 4:
        raise ValueError("two-qubit families need d = 2")
    v = v / v[0]
    if abs(v[2] - 1) <= tol and abs(v[3] + v[1]) <= tol:
        return 1
    if abs(v[2] + 1) <= tol and abs(v[3] - v[1]) <= tol:
        return 2
    return None


_PAIRINGS = (((0, 2), (1, 3)), ((0, 1), (2, 3)), ((0, 3), (1, 2)))


def two_qubit_pairing(lam, tol=1e-8):
    """Complete description of 2x2 perfect arrays.

    Every 2x2 unimodular array with vanishing periodic autocorrelation splits its
    four entries into two pairs, one with ratio ``+1`` and one with ratio ``-1``.
    Returns the index of the pairing (0: columns, 1: rows, 2: diagonals) or ``None``.
    Pairing 0 is exactly the union of the two families of :func:`two_qubit_family`.
    """
    v = entries_of(lam).reshape(-1)
    if v.size != 4:
        raise ValueError("two-qubit pairings need d = 2")
    for idx, ((i, j), (p, q)) in enumerate(_PAIRINGS):
        r1 = v[j] / v[i]
        r2 = v[q] / v[p]
        if abs(r1 + r2) <= tol and min(abs(r1 - 1), abs(r1 + 1)) <= tol:
            return idx
    return None
