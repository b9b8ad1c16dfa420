"""Two-qudit unitaries that are diagonal in the Weyl-Heisenberg maximally entangled basis.

``|Phi_ab> = |Z^a X^-b> / sqrt(d)`` (row vectorization), and a phase array
``lam`` defines ``U = sum_ab lam[a,b] |Phi_ab><Phi_ab|``.
"""

import json
from dataclasses import dataclass

import numpy as np

from .arrays import PhaseArray, entries_of, fourier_transform
from .linalg import clock_gate, dagger, fourier_gate, local_dim, shift_gate, weyl


def max_ent_basis(d):
    """Columns are ``|Phi_ab>`` with column index ``a * d + b``."""
    x_inv = np.linalg.matrix_power(shift_gate(d), d - 1)
    z = clock_gate(d)
    cols = []
    for a in range(d):
        za = np.linalg.matrix_power(z, a)
        for b in range(d):
            cols.append((za @ np.linalg.matrix_power(x_inv, b)).reshape(-1))
    return np.stack(cols, axis=1) / np.sqrt(d)


def build_diagonal_unitary(lam):
    """``sum_ab lam[a,b] |Phi_ab><Phi_ab|``; stacks of arrays give stacks of unitaries."""
    e = entries_of(lam)
    d = e.shape[-1]
    basis = max_ent_basis(d)
    flat = e.reshape(e.shape[:-2] + (d * d,))
    return (basis * flat[..., None, :]) @ basis.conj().T


def diagonal_unitary_entries(lam):
    """Same unitary from the computational-basis expansion.

    ``<k|<l| U |k'>|l'> = (1/d) sum_a lam[a, l-k] omega**(a (k-k'))`` when
    ``l - k = l' - k'`` (mod d), zero otherwise. Independent of :func:`max_ent_basis`.
    """
    e = entries_of(lam)
    d = e.shape[-1]
    w = np.exp(2j * np.pi / d)
    u = np.zeros((d, d, d, d), dtype=complex)
    for k in range(d):
        for kp in range(d):
            for b in range(d):
                val = np.sum(e[:, b] * w ** ((np.arange(d) * (k - kp)) % d)) / d
                u[k, (k + b) % d, kp, (kp + b) % d] = val
    return u.reshape(d * d, d * d)


def extract_phase_array(u, tol=1e-9):
    """Eigenvalue array of ``u`` if it is diagonal in the maximally entangled basis, else ``None``."""
    d = local_dim(u)
    basis = max_ent_basis(d)
    m = basis.conj().T @ np.asarray(u) @ basis
    diag = np.diag(m).copy()
    if np.max(np.abs(m - np.diag(diag))) > tol or np.max(np.abs(np.abs(diag) - 1)) > tol:
        return None
    return PhaseArray(diag.reshape(d, d) / np.abs(diag.reshape(d, d)))


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    """``U = (1/d) sum_ab coefficients[a,b] X^aZ^b (x) conj(X^aZ^b)``."""

    d: int
    coefficients: np.ndarray

    @property
    def magnitudes(self):
        return np.abs(self.coefficients)

    def operator_pairs(self):
        d = self.d
        for a in range(d):
            for b in range(d):
                w = weyl(d, a, b)
                yield (a, b), w, w.conj()

    def reconstruct(self):
        d = self.d
        out = np.zeros((d * d, d * d), dtype=complex)
        for (a, b), left, right in self.operator_pairs():
            out += self.coefficients[a, b] * np.kron(left, right)
        return out / d


def schmidt_form(lam):
    e = entries_of(lam)
    return SchmidtForm(e.shape[-1], fourier_transform(e))


def generalized_cnot(d):
    """``P = sum_i |i><i| (x) X^i``."""
    x = shift_gate(d)
    out = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        out[i * d:(i + 1) * d, i * d:(i + 1) * d] = np.linalg.matrix_power(x, i)
    return out


def phase_diagonal(lam):
    """``D(lam) = sum_ab lam[a,b] |a><a| (x) |b><b|``."""
    return np.diag(entries_of(lam).reshape(-1))


@dataclass(frozen=True, eq=False)
class ControlledDecomposition:
    d: int
    cnot: np.ndarray
    fourier_layer: np.ndarray
    phases: np.ndarray

    def recompose(self):
        """``P (F (x) I) D (F^dagger (x) I) P^T``."""
        f = self.fourier_layer
        return self.cnot @ f @ self.phases @ dagger(f) @ self.cnot.T

    def symmetric(self):
        """``P (F (x) I) D (F (x) I) P``."""
        f = self.fourier_layer
        return self.cnot @ f @ self.phases @ f @ self.cnot


def controlled_decomposition(lam):
    e = entries_of(lam)
    d = e.shape[-1]
    return ControlledDecomposition(
        d,
        generalized_cnot(d),
        np.kron(fourier_gate(d), np.eye(d)),
        phase_diagonal(e),
    )


def symmetric_variant(lam):
    return controlled_decomposition(lam).symmetric()


def chm_construct(lam_or_u, side="left"):
    """``(F (x) I) U (F^dagger (x) I)`` for ``side='left'``, ``(I (x) F) U (I (x) F^dagger)`` for ``side='right'``.

    Accepts a :class:`PhaseArray` (built into ``U`` first) or a ``d**2 x d**2`` unitary.
    """
    if isinstance(lam_or_u, PhaseArray):
        u = build_diagonal_unitary(lam_or_u)
    else:
        u = np.asarray(lam_or_u, dtype=complex)
    d = local_dim(u)
    f = fourier_gate(d)
    eye = np.eye(d)
    if side == "left":
        g = np.kron(f, eye)
    elif side == "right":
        g = np.kron(eye, f)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return g @ u @ dagger(g)


def swap_phase_vector(d):
    """Phases ``mu[a,b] = omega**(ab)`` with ``SWAP |Phi_{a,-b}> = mu[a,b] |Phi_ab>``.

    Equivalently ``SWAP = sum_ab mu[a,b] |Phi_ab><Phi_{a,-b}|``, since
    ``(Z^a X^-b)^T = X^b Z^a = omega**(-ab) Z^a X^b``.
    """
    a = np.arange(d)
    return PhaseArray.from_exponents(np.outer(a, a), d)


def swap_from_phase_vector(mu):
    """Rebuild SWAP from its phase vector in the maximally entangled basis."""
    e = entries_of(mu)
    d = e.shape[-1]
    basis = max_ent_basis(d)
    out = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            out += e[a, b] * np.outer(basis[:, a * d + b], basis[:, a * d + (-b) % d].conj())
    return out


def circuit_description(lam, symmetric=False, ref=None):
    """Gate list in time order; qudit 0 is the first (control) qudit.

    The diagonal form is ``P (F x I) D (F^dagger x I) P^T``; ``symmetric=True``
    gives ``P (F x I) D (F x I) P``.
    """
    d = entries_of(lam).shape[-1]
    ref = ref if ref is not None else "lambda"
    cx = {"gate": "P", "control": 0, "target": 1}
    phase = {"gate": "D", "control": 0, "target": 1, "lambda": ref}
    if symmetric:
        gates = [cx, {"gate": "F", "target": 0}, phase, {"gate": "F", "target": 0}, cx]
    else:
        gates = [
            {"gate": "Pdag", "control": 0, "target": 1},
            {"gate": "Fdag", "target": 0},
            phase,
            {"gate": "F", "target": 0},
            cx,
        ]
    return {"d": d, "gates": [dict(g) for g in gates]}


def circuit_to_json(lam, symmetric=False, ref=None):
    return json.dumps(circuit_description(lam, symmetric, ref))


def circuit_unitary(description, lam):
    """Multiply out a gate list produced by :func:`circuit_description`."""
    d = description["d"]
    f = np.kron(fourier_gate(d), np.eye(d))
    p = generalized_cnot(d)
    mats = {"P": p, "Pdag": p.T, "F": f, "Fdag": dagger(f), "D": phase_diagonal(lam)}
    out = np.eye(d * d, dtype=complex)
    for g in description["gates"]:
        if g.get("target") != (1 if g["gate"] in ("P", "Pdag", "D") else 0):
            raise ValueError(f"unsupported gate placement {g}")
        out = mats[g["gate"]] @ out
    return out
