"""Certification of candidate 2-unitaries and their four-qudit states.

For ``|U> = (1/d) sum U[mn,kl] |m n k l>`` the balanced two-party marginals are

* ``rho_12 = U U^dagger / d**2``
* ``rho_13 = U^R U^R^dagger / d**2``
* ``rho_14 = U^G U^G^dagger / d**2``

so ``|U>`` is AME(4, d) exactly when ``U``, ``U^R`` and ``U^G`` are unitary.
"""

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .linalg import (
    CERT_TOL,
    dagger,
    delta,
    local_dim,
    partial_trace,
    partial_transpose,
    realign,
    state_tensor,
    vectorize_to_state,
    weyl,
)

ZERO_TOL = 1e-10
CLUSTER_TOL = 1e-8

# party pairs (0-based) and the matrix whose Gram gives that marginal
BIPARTITIONS = {"12": (0, 1), "13": (0, 2), "14": (0, 3)}


@dataclass(frozen=True)
class Block:
    rows: tuple
    cols: tuple
    scale: float
    residual: float
    circulant: bool


@dataclass(frozen=True)
class BlockSummary:
    blocks: tuple
    distinct_values: tuple  # (mean |entry|, multiplicity), ascending
    pattern: str = "components"

    @property
    def structured(self):
        return len(self.blocks) > 1

    @property
    def sizes(self):
        return tuple(len(b.rows) for b in self.blocks)

    @property
    def values(self):
        return np.array([v for v, _ in self.distinct_values])

    def to_dict(self):
        return {
            "structured": self.structured,
            "pattern": self.pattern,
            "blocks": [asdict(b) for b in self.blocks],
            "distinct_values": [{"value": v, "multiplicity": m} for v, m in self.distinct_values],
        }


@dataclass(frozen=True)
class CertificationReport:
    d: int
    tol: float
    delta_U: float
    delta_R: float
    delta_Gamma: float
    marginal_residuals: dict
    marginal_crosscheck: float
    blocks: BlockSummary | None = None
    stabilizers: dict | None = None
    extras: dict = field(default_factory=dict)

    @property
    def is_unitary(self):
        return self.delta_U <= self.tol

    @property
    def is_dual(self):
        return self.delta_R <= self.tol

    @property
    def is_tdual(self):
        return self.delta_Gamma <= self.tol

    @property
    def is_two_unitary(self):
        return self.is_dual and self.is_tdual and self.is_unitary

    @property
    def stabilizers_pass(self):
        return self.stabilizers is not None and max(self.stabilizers.values()) <= self.tol

    def to_dict(self):
        return {
            "d": self.d,
            "tol": self.tol,
            "delta_U": self.delta_U,
            "delta_R": self.delta_R,
            "delta_Gamma": self.delta_Gamma,
            "is_unitary": self.is_unitary,
            "is_dual": self.is_dual,
            "is_tdual": self.is_tdual,
            "is_two_unitary": self.is_two_unitary,
            "marginal_residuals": dict(self.marginal_residuals),
            "marginal_crosscheck": self.marginal_crosscheck,
            "blocks": None if self.blocks is None else self.blocks.to_dict(),
            "stabilizers": None if self.stabilizers is None else [
                {"i": i, "j": j, "deviation": v} for (i, j), v in sorted(self.stabilizers.items())
            ],
            "extras": dict(self.extras),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self):
        yes = {True: "yes", False: "no"}
        lines = [
            f"d = {self.d}, tol = {self.tol:g}",
            f"Delta(U)       = {self.delta_U:.3e}  unitary:    {yes[self.is_unitary]}",
            f"Delta(U^R)     = {self.delta_R:.3e}  dual:       {yes[self.is_dual]}",
            f"Delta(U^Gamma) = {self.delta_Gamma:.3e}  T-dual:     {yes[self.is_tdual]}",
            f"2-unitary: {yes[self.is_two_unitary]}",
            "marginals ||rho - I/d^2||: " + ", ".join(
                f"rho_{k} {v:.3e}" for k, v in self.marginal_residuals.items()),
            f"partial-trace cross-check: {self.marginal_crosscheck:.3e}",
        ]
        if self.blocks is not None:
            b = self.blocks
            lines.append(f"blocks ({b.pattern}): {len(b.blocks)} of sizes {sorted(set(b.sizes))}, "
                         f"max residual {max(x.residual for x in b.blocks):.3e}")
            lines.append("distinct |entries|: " + ", ".join(f"{v:.10f} (x{m})" for v, m in b.distinct_values))
        if self.stabilizers is not None:
            lines.append(f"stabilizers: {len(self.stabilizers)} checked, "
                         f"max deviation {max(self.stabilizers.values()):.3e}")
        for k, v in self.extras.items():
            lines.append(f"{k}: {v}")
        return "\n".join(lines)


def marginals(u):
    """The three balanced marginals of ``|U>`` from the rearrangement identities."""
    u = np.asarray(u, dtype=complex)
    d = local_dim(u)
    mats = {"12": u, "13": realign(u), "14": partial_transpose(u)}
    return {k: m @ dagger(m) / d**2 for k, m in mats.items()}


def marginals_bruteforce(u):
    u = np.asarray(u, dtype=complex)
    d = local_dim(u)
    psi = vectorize_to_state(u)
    return {k: partial_trace(psi, keep, d) for k, keep in BIPARTITIONS.items()}


def certify(u, tol=CERT_TOL, blocks=False, stabilizers=False):
    u = np.asarray(u, dtype=complex)
    d = local_dim(u)
    fast = marginals(u)
    slow = marginals_bruteforce(u)
    eye = np.eye(d * d) / d**2
    residuals = {k: float(np.linalg.norm(fast[k] - eye)) for k in fast}
    cross = max(float(np.max(np.abs(fast[k] - slow[k]))) for k in fast)
    stab = None
    if stabilizers:
        psi = vectorize_to_state(u)
        stab = {(i, j): stabilizer_check(psi, i, j, d) for i in range(d) for j in range(d)}
    return CertificationReport(
        d=d,
        tol=tol,
        delta_U=float(delta(u)),
        delta_R=float(delta(realign(u))),
        delta_Gamma=float(delta(partial_transpose(u))),
        marginal_residuals=residuals,
        marginal_crosscheck=cross,
        blocks=block_structure(u) if blocks else None,
        stabilizers=stab,
    )


def _cluster(values, tol=CLUSTER_TOL):
    values = np.sort(np.asarray(values, dtype=float))
    if values.size == 0:
        return ()
    breaks = np.flatnonzero(np.diff(values) > tol) + 1
    return tuple((float(g.mean()), int(g.size)) for g in np.split(values, breaks))


def _is_circulant(b, tol):
    return bool(np.max(np.abs(b - np.roll(b, (1, 1), axis=(0, 1))), initial=0.0) <= tol)


def _labelings(d):
    m, n = np.divmod(np.arange(d * d), d)
    # n - m is conserved by diagonal unitaries; partial transposition turns it into m + n
    return {"n-m": (n - m) % d, "m+n": (m + n) % d}


def _component_labels(support):
    n = support.shape[0]
    r, c = np.nonzero(support)
    graph = coo_matrix((np.ones(r.size), (r, c + n)), shape=(2 * n, 2 * n))
    _, labels = connected_components(graph, directed=False)
    return labels[:n], labels[n:]


def _make_block(u, rows, cols, tol):
    b = u[np.ix_(rows, cols)]
    rows, cols = tuple(map(int, rows)), tuple(map(int, cols))
    if b.shape[0] != b.shape[1]:
        return Block(rows, cols, float("nan"), float("inf"), False)
    scale = float(np.linalg.norm(b) / np.sqrt(b.shape[0]))
    res = float(delta(b / scale)) if scale > 0 else float("inf")
    return Block(rows, cols, scale, res, _is_circulant(b, tol))


def block_structure(u, zero_tol=ZERO_TOL, tol=CERT_TOL):
    """Block decomposition of the nonzero pattern of ``u``.

    The two ``d``-block patterns ``n - m = l - k`` and ``m + n = k + l`` (mod d)
    are tried first, so accidental zeros inside a block do not split it. If
    neither fits, the blocks are the connected components of the pattern.
    Each block is tested for unitarity after removing a global scale and for
    circulance with rows and columns in increasing index order.
    """
    u = np.asarray(u, dtype=complex)
    d = local_dim(u)
    support = np.abs(u) > zero_tol
    r, c = np.nonzero(support)
    for name, lab in _labelings(d).items():
        if np.all(lab[r] == lab[c]):
            row_lab = col_lab = lab
            pattern = name
            break
    else:
        row_lab, col_lab = _component_labels(support)
        pattern = "components"
    order = sorted(set(row_lab) | set(col_lab), key=lambda x: np.flatnonzero(row_lab == x)[0]
                   if np.any(row_lab == x) else u.shape[0])
    blocks = tuple(_make_block(u, np.flatnonzero(row_lab == x), np.flatnonzero(col_lab == x), tol) for x in order)
    mags = np.abs(u)
    return BlockSummary(blocks, _cluster(mags[support]), pattern)


def stabilizer_operators(d, i, j):
    """Local factors ``(X^iZ^j, X^iZ^-j, X^iZ^-j, X^iZ^j)``."""
    a = weyl(d, i, j)
    b = weyl(d, i, -j % d)
    return a, b, b, a


def apply_local(psi, ops, d=None):
    """``(A (x) B (x) C (x) D)|psi>`` by contracting each factor on its own leg."""
    t = state_tensor(psi, d)
    a, b, c, e = ops
    return np.einsum("am,bn,ck,el,mnkl->abce", a, b, c, e, t, optimize=True).reshape(-1)


def stabilizer_check(state, i, j, d=None):
    """``|| G|psi> - |psi> ||`` for ``G = X^iZ^j (x) X^iZ^-j (x) X^iZ^-j (x) X^iZ^j``."""
    psi = np.asarray(state, dtype=complex).reshape(-1)
    t = state_tensor(psi, d)
    d = t.shape[0]
    return float(np.linalg.norm(apply_local(psi, stabilizer_operators(d, i, j), d) - psi))


@dataclass(frozen=True)
class Fingerprint:
    name: str
    lu_invariant: bool
    difference: float
    differs: bool


@dataclass(frozen=True)
class LUProbe:
    fingerprints: tuple

    @property
    def distinguished(self):
        """Some fingerprint differs. Only a necessary-condition test; never a proof of equivalence."""
        return any(f.differs for f in self.fingerprints)

    @property
    def lu_distinguished(self):
        """Some local-unitary invariant differs, which rules out local-unitary equivalence."""
        return any(f.differs for f in self.fingerprints if f.lu_invariant)

    def to_dict(self):
        return {
            "distinguished": self.distinguished,
            "lu_distinguished": self.lu_distinguished,
            "fingerprints": [asdict(f) for f in self.fingerprints],
        }


def _power_sums(u):
    # traces of U^k for k = 1..N determine the eigenvalue multiset
    n = u.shape[0]
    out = np.empty(n, dtype=complex)
    p = np.eye(n, dtype=complex)
    for k in range(n):
        p = p @ u
        out[k] = np.trace(p)
    return out / n


def fingerprints(u):
    u = np.asarray(u, dtype=complex)
    return {
        "eigenvalue_power_sums": (False, _power_sums(u)),
        "entry_moduli": (False, np.sort(np.abs(u).reshape(-1))),
        "realign_singular_values": (True, np.linalg.svd(realign(u), compute_uv=False)),
        "partial_transpose_singular_values": (True, np.linalg.svd(partial_transpose(u), compute_uv=False)),
    }


def lu_probe(u1, u2, tol=1e-8):
    if local_dim(u1) != local_dim(u2):
        raise ValueError("lu_probe needs unitaries of equal size")
    f1, f2 = fingerprints(u1), fingerprints(u2)
    out = []
    for name, (inv, a) in f1.items():
        diff = float(np.max(np.abs(a - f2[name][1])))
        out.append(Fingerprint(name, inv, diff, diff > tol))
    return LUProbe(tuple(out))


def chm_check(u):
    """Max deviation of ``|u_ij|`` from ``1/sqrt(N)`` (zero for complex Hadamard matrices)."""
    u = np.asarray(u)
    return float(np.max(np.abs(np.abs(u) - 1 / np.sqrt(u.shape[0]))))
