"""Dense complex linear algebra for two-qudit gates.

Bipartite indices are flattened row-major everywhere: the product basis
state ``|m>|n>`` sits at position ``m * d + n``. A ``d**2 x d**2`` matrix
``U`` is viewed as the four-index tensor ``U[m, n, k, l] = <m|<n| U |k>|l>``
via ``U.reshape(d, d, d, d)``.

Most functions accept a stack of matrices (leading batch axes) so that
ensembles can be processed without Python loops.
"""

import json
import math
from typing import NamedTuple

import numpy as np
import scipy.linalg

CERT_TOL = 1e-10
ALGEBRA_TOL = 1e-12
RANK_TOL = 1e-12


def _check_dim(d):
    if int(d) != d or d < 2:
        raise ValueError(f"local dimension must be an integer >= 2, got {d!r}")
    return int(d)


def omega(d):
    """Primitive ``d``-th root of unity ``exp(2 pi i / d)``."""
    return np.exp(2j * np.pi / d)


def shift_gate(d):
    """Generalized Pauli ``X``: ``X|k> = |k + 1 mod d>``."""
    d = _check_dim(d)
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock_gate(d):
    """Generalized Pauli ``Z``: ``Z|k> = omega**k |k>``."""
    d = _check_dim(d)
    return np.diag(omega(d) ** np.arange(d))


def weyl(d, a, b):
    """Weyl-Heisenberg operator ``X**a Z**b`` (exponents taken mod ``d``)."""
    d = _check_dim(d)
    # (X^a Z^b)|k> = omega^(b k) |k + a>
    k = np.arange(d)
    out = np.zeros((d, d), dtype=complex)
    out[(k + a) % d, k] = omega(d) ** ((b * k) % d)
    return out


def fourier_gate(d):
    """Unitary Fourier gate with entries ``omega**(k l) / sqrt(d)``."""
    d = _check_dim(d)
    k = np.arange(d)
    return omega(d) ** (np.outer(k, k) % d) / np.sqrt(d)


def swap_gate(d):
    """SWAP on ``C^d (x) C^d``."""
    d = _check_dim(d)
    return np.eye(d * d, dtype=complex).reshape(d, d, d, d).transpose(1, 0, 2, 3).reshape(d * d, d * d)


def kron(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("kron expects two matrices")
    return np.kron(a, b)


def local_dim(m):
    """Local dimension ``d`` of a (stack of) ``d**2 x d**2`` matrices."""
    m = np.asarray(m)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {m.shape}")
    n = m.shape[-1]
    d = math.isqrt(n)
    if d * d != n or d < 2:
        raise ValueError(f"matrix size {n} is not the square of a local dimension >= 2")
    return d


def _as_tensor(u):
    u = np.asarray(u)
    d = local_dim(u)
    return u.reshape(u.shape[:-2] + (d, d, d, d)), d


def realign(u):
    """Realignment ``<m|<n| U^R |k>|l> = <m|<k| U |n>|l>``."""
    t, d = _as_tensor(u)
    lead = t.shape[:-4]
    nb = len(lead)
    perm = tuple(range(nb)) + (nb, nb + 2, nb + 1, nb + 3)
    return t.transpose(perm).reshape(lead + (d * d, d * d))


def partial_transpose(u):
    """Partial transpose on the second qudit: ``<m|<n| U^G |k>|l> = <m|<l| U |k>|n>``."""
    t, d = _as_tensor(u)
    lead = t.shape[:-4]
    nb = len(lead)
    perm = tuple(range(nb)) + (nb, nb + 3, nb + 2, nb + 1)
    return t.transpose(perm).reshape(lead + (d * d, d * d))


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def frobenius_dist_to_unitary(m):
    """``||M M^dagger - I||_F``; works on stacks of matrices."""
    m = np.asarray(m)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {m.shape}")
    eye = np.eye(m.shape[-1])
    return np.linalg.norm(m @ dagger(m) - eye, axis=(-2, -1))


delta = frobenius_dist_to_unitary


def is_unitary(m, tol=CERT_TOL):
    return bool(np.all(frobenius_dist_to_unitary(m) <= tol))


class PolarFactor(NamedTuple):
    unitary: np.ndarray
    singular_values: np.ndarray
    rank_deficient: np.ndarray | bool


def _svd(m):
    try:
        return np.linalg.svd(m)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails on highly degenerate input; gesvd is slower but robust
        if m.ndim == 2:
            return scipy.linalg.svd(m, lapack_driver="gesvd")
        parts = [scipy.linalg.svd(x, lapack_driver="gesvd") for x in m.reshape((-1,) + m.shape[-2:])]
        w, s, vh = (np.stack(p) for p in zip(*parts))
        lead = m.shape[:-2]
        return w.reshape(lead + w.shape[1:]), s.reshape(lead + s.shape[1:]), vh.reshape(lead + vh.shape[1:])


def polar_factor(m, rank_tol=RANK_TOL):
    """Unitary polar factor ``W V^dagger`` of ``M = W S V^dagger``.

    The factor is the unitary closest to ``M`` in Frobenius norm. When the
    smallest singular value falls below ``rank_tol`` the factor is not unique;
    the SVD's choice is returned and ``rank_deficient`` is set.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {m.shape}")
    w, s, vh = _svd(m)
    deficient = s[..., -1] < rank_tol
    if deficient.ndim == 0:
        deficient = bool(deficient)
    return PolarFactor(w @ vh, s, deficient)


def polar_nearest_unitary(m):
    return polar_factor(m).unitary


def vectorize(a):
    """Row vectorization ``|A> = sum_{kl} A_kl |k>|l>``."""
    a = np.asarray(a)
    return a.reshape(a.shape[:-2] + (-1,))


def vectorize_to_state(u):
    """Four-qudit state ``|U> = (1/d) sum U^{mn}_{kl} |m>|n>|k>|l>`` as a length ``d**4`` vector."""
    u = np.asarray(u)
    d = local_dim(u)
    return u.reshape(-1) / d


def state_tensor(psi, d=None):
    psi = np.asarray(psi)
    if d is None:
        d = round(psi.size ** 0.25)
    if d**4 != psi.size:
        raise ValueError(f"state of length {psi.size} is not a four-qudit state")
    return psi.reshape(d, d, d, d)


def partial_trace(psi, keep, d):
    """Reduced density matrix of a pure four-qudit state on the parties ``keep`` (0-based).

    Brute-force contraction; used as an oracle for the rearrangement identities.
    """
    t = state_tensor(psi, d)
    keep = list(keep)
    rest = [p for p in range(4) if p not in keep]
    t = t.transpose(keep + rest).reshape(d ** len(keep), d ** len(rest))
    return t @ t.conj().T


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    rows, cols = m.shape
    entries = [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
    return json.dumps({"rows": rows, "cols": cols, "entries": entries})


def matrix_from_json(text):
    data = json.loads(text) if isinstance(text, str) else text
    rows, cols = int(data["rows"]), int(data["cols"])
    entries = data["entries"]
    if len(entries) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
    return flat.reshape(rows, cols)
