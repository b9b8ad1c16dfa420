"""Iterative searches for dual unitaries and perfect tensors.

Four maps are available:

``biuni``
    ``lam -> phase((F (x) F) lam)``. Fixed points are biunimodular arrays.
``biuni_swap``
    ``lam -> phase((F (x) F)(mu_S * lam))`` where ``mu_S`` is the SWAP phase
    vector. The reported array is ``mu_S * lam``, whose transform is the one
    driven onto the torus.
``polar_R`` / ``polar_GammaR``
    ``U -> polar(U^R)`` and ``U -> polar((U^R)^Gamma)`` on unitaries.

Randomness: realization ``i`` of an ensemble with base seed ``s`` uses
``numpy.random.default_rng(s + i)`` (PCG64 behind a SeedSequence), so every
realization can be replayed on its own with ``rng_seed = s + i``.
"""

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.stats import unitary_group

from .arrays import PhaseArray, entries_of, fourier_transform
from .diagonal import build_diagonal_unitary, extract_phase_array, swap_phase_vector
from .linalg import delta, partial_transpose, polar_factor, realign

ALGORITHMS = ("biuni", "biuni_swap", "polar_R", "polar_GammaR")
ZERO_MODULUS = 1e-14
CHUNK = 250
HIST_BINS = 100


@dataclass(frozen=True)
class SearchConfig:
    d: int
    algorithm: str = "biuni"
    rng_seed: int = 0
    max_iterations: int = 2000
    convergence_tol: float = 1e-10
    record_trace: bool = False
    patience: int = 10
    seed_form: str = "diagonal"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.seed_form not in ("diagonal", "haar"):
            raise ValueError("seed_form must be 'diagonal' or 'haar'")


@dataclass(frozen=True, eq=False)
class SearchOutcome:
    config: SearchConfig
    seed: int
    phase_array: PhaseArray | None
    unitary: np.ndarray
    iterations_used: int
    delta_R: float
    delta_Gamma: float
    converged: bool
    rank_deficient: bool = False
    trace: np.ndarray | None = field(default=None, repr=False)

    def is_dual(self, tol=1e-6):
        return self.delta_R <= tol

    def is_perfect(self, tol=1e-6):
        return self.delta_R <= tol and self.delta_Gamma <= tol

    def to_dict(self):
        return {
            "config": asdict(self.config),
            "seed": self.seed,
            "phase_array": None if self.phase_array is None else self.phase_array.to_dict(),
            "iterations_used": self.iterations_used,
            "delta_R": self.delta_R,
            "delta_Gamma": self.delta_Gamma,
            "converged": self.converged,
            "rank_deficient": self.rank_deficient,
            "trace": None if self.trace is None else [float(v) for v in self.trace],
        }

    def to_json(self):
        return json.dumps(self.to_dict())


def random_phase_array(d, rng_seed):
    """Phases ``exp(i theta)`` with ``theta`` uniform in ``[0, 2 pi)``; deterministic per seed."""
    rng = np.random.default_rng(rng_seed)
    return PhaseArray.from_angles(2 * np.pi * rng.random((d, d)))


def _random_seed_unitary(d, rng_seed, form):
    if form == "haar":
        return unitary_group.rvs(d * d, random_state=np.random.default_rng(rng_seed))
    return build_diagonal_unitary(random_phase_array(d, rng_seed))


def project_to_torus(z):
    """Closest unimodular array: ``z / |z|``, with phase 1 where ``|z| < 1e-14``."""
    z = np.asarray(z, dtype=complex)
    mod = np.abs(z)
    small = mod < ZERO_MODULUS
    return np.where(small, 1.0 + 0j, z / np.where(small, 1.0, mod))


def biuni_step(lam):
    return PhaseArray(project_to_torus(fourier_transform(lam)))


def biuni_swap_step(lam):
    e = entries_of(lam)
    return biuni_step(e * swap_phase_vector(e.shape[-1]).entries)


def polar_map_R(u):
    return polar_factor(realign(u)).unitary


def polar_map_GammaR(u):
    return polar_factor(partial_transpose(realign(u))).unitary


def _phase_batch(config, lam):
    """Run ``biuni`` / ``biuni_swap`` on a stack of arrays; returns per-realization results."""
    n, d = lam.shape[0], config.d
    mu = swap_phase_vector(d).entries if config.algorithm == "biuni_swap" else None
    x = lam.copy()
    cand = np.empty_like(x)
    active = np.ones(n, dtype=bool)
    streak = np.zeros(n, dtype=np.int64)
    iters = np.full(n, config.max_iterations, dtype=np.int64)
    trace = np.full((n, config.max_iterations), np.nan) if config.record_trace else None
    for it in range(config.max_iterations):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        y = x[idx] * mu if mu is not None else x[idx]
        t = fourier_transform(y)
        mod = np.abs(t)
        # equals Delta(U^R) of the unitary built from y
        resid = np.linalg.norm(mod**2 - 1, axis=(-2, -1))
        if trace is not None:
            trace[idx, it] = resid
        streak[idx] = np.where(resid <= config.convergence_tol, streak[idx] + 1, 0)
        done = streak[idx] >= config.patience
        fin = idx[done]
        cand[fin] = y[done]
        iters[fin] = it + 1
        active[fin] = False
        keep = ~done
        x[idx[keep]] = project_to_torus(t[keep])
    rest = np.flatnonzero(active)
    cand[rest] = x[rest] * mu if mu is not None else x[rest]
    return cand, ~active, iters, trace


def _polar_batch(config, u):
    n = u.shape[0]
    u = u.copy()
    active = np.ones(n, dtype=bool)
    streak = np.zeros(n, dtype=np.int64)
    iters = np.full(n, config.max_iterations, dtype=np.int64)
    deficient = np.zeros(n, dtype=bool)
    trace = np.full((n, config.max_iterations), np.nan) if config.record_trace else None
    gamma = config.algorithm == "polar_GammaR"
    for it in range(config.max_iterations):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        cur = u[idx]
        r = realign(cur)
        resid = delta(r)
        if gamma:
            resid = np.maximum(resid, delta(partial_transpose(cur)))
        if trace is not None:
            trace[idx, it] = resid
        streak[idx] = np.where(resid <= config.convergence_tol, streak[idx] + 1, 0)
        done = streak[idx] >= config.patience
        iters[idx[done]] = it + 1
        active[idx[done]] = False
        keep = ~done
        m = partial_transpose(r[keep]) if gamma else r[keep]
        pf = polar_factor(m)
        deficient[idx[keep]] |= pf.rank_deficient
        u[idx[keep]] = pf.unitary
    return u, ~active, iters, trace, deficient


def _deltas(u):
    return delta(realign(u)), delta(partial_transpose(u))


def _run_chunk(config, seeds):
    d = config.d
    if config.algorithm in ("biuni", "biuni_swap"):
        lam = np.stack([random_phase_array(d, s).entries for s in seeds])
        cand, conv, iters, trace = _phase_batch(config, lam)
        u = build_diagonal_unitary(cand)
        arrays = [PhaseArray(project_to_torus(c)) for c in cand]
        deficient = np.zeros(len(seeds), dtype=bool)
    else:
        u0 = np.stack([_random_seed_unitary(d, s, config.seed_form) for s in seeds])
        u, conv, iters, trace, deficient = _polar_batch(config, u0)
        arrays = [extract_phase_array(x) for x in u]
    d_r, d_g = _deltas(u)
    # the loop tests a Fourier-side residual; require the matrix route to agree
    conv = conv & (d_r <= config.convergence_tol)
    return [
        SearchOutcome(
            replace(config, rng_seed=int(s)),
            int(s),
            arrays[i],
            u[i],
            int(iters[i]),
            float(d_r[i]),
            float(d_g[i]),
            bool(conv[i]),
            bool(deficient[i]),
            None if trace is None else trace[i, : iters[i]].copy(),
        )
        for i, s in enumerate(seeds)
    ]


def run_search(config):
    """Single realization seeded by ``config.rng_seed``."""
    return _run_chunk(config, [config.rng_seed])[0]


def _workers(workers):
    if workers is None:
        workers = int(os.environ.get("BIUNI_THREADS", "1"))
    return max(1, workers)


def run_seeds(config, seeds, workers=None):
    """Outcomes for explicit seeds, in the given order.

    Seeds are processed in fixed chunks, optionally on several threads; the
    result does not depend on the thread count.
    """
    chunks = [seeds[i:i + CHUNK] for i in range(0, len(seeds), CHUNK)]
    workers = _workers(workers)
    if workers == 1 or len(chunks) == 1:
        parts = [_run_chunk(config, c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _run_chunk(config, c), chunks))
    return [o for p in parts for o in p]


def random_control(d, seeds):
    """``Delta(U^R)``, ``Delta(U^Gamma)`` of un-iterated random diagonal unitaries."""
    lam = np.stack([random_phase_array(d, s).entries for s in seeds])
    return _deltas(build_diagonal_unitary(lam))


def histogram(random_values, iterated_values, bins=HIST_BINS):
    """Shared fixed-width bins over ``[0, max observed]``; returns ``(edges, count_random, count_iterated)``."""
    random_values = np.asarray(random_values, dtype=float)
    iterated_values = np.asarray(iterated_values, dtype=float)
    hi = float(max(random_values.max(initial=0.0), iterated_values.max(initial=0.0)))
    if hi == 0.0:
        edges = np.array([0.0, 0.0])
        return edges, np.array([random_values.size]), np.array([iterated_values.size])
    edges = np.linspace(0.0, hi, bins + 1)
    c_rand, _ = np.histogram(random_values, edges)
    c_iter, _ = np.histogram(iterated_values, edges)
    return edges, c_rand, c_iter


@dataclass(frozen=True, eq=False)
class Ensemble:
    config: SearchConfig
    outcomes: list
    random_delta_R: np.ndarray
    random_delta_Gamma: np.ndarray

    @property
    def delta_R(self):
        return np.array([o.delta_R for o in self.outcomes])

    @property
    def delta_Gamma(self):
        return np.array([o.delta_Gamma for o in self.outcomes])

    def fraction_dual(self, tol=1e-6):
        return float(np.mean(self.delta_R <= tol))

    def perfect(self, tol=1e-6):
        return [o for o in self.outcomes if o.is_perfect(tol)]

    def histogram(self, quantity="delta_R", bins=HIST_BINS):
        if quantity == "delta_R":
            return histogram(self.random_delta_R, self.delta_R, bins)
        if quantity == "delta_Gamma":
            return histogram(self.random_delta_Gamma, self.delta_Gamma, bins)
        raise ValueError(f"unknown quantity {quantity!r}")

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["seed", "iterations", "delta_R", "delta_Gamma", "converged"])
        for o in self.outcomes:
            w.writerow([o.seed, o.iterations_used, repr(o.delta_R), repr(o.delta_Gamma), int(o.converged)])
        return buf.getvalue()

    def histogram_csv(self, quantity="delta_R", bins=HIST_BINS):
        edges, c_rand, c_iter = self.histogram(quantity, bins)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "count_random", "count_iterated"])
        for i in range(len(c_rand)):
            w.writerow([repr(float(edges[i])), repr(float(edges[i + 1])), int(c_rand[i]), int(c_iter[i])])
        return buf.getvalue()


def run_ensemble(config, n_realizations, workers=None):
    """Realizations ``rng_seed, rng_seed + 1, ...``, merged in seed order."""
    seeds = [config.rng_seed + i for i in range(n_realizations)]
    outcomes = run_seeds(config, seeds, workers)
    r, g = random_control(config.d, seeds)
    return Ensemble(config, outcomes, r, g)


def search_perfect(config, max_realizations, batch=500, tol=1e-6, workers=None, stop_at_first=True):
    """Run seeds in batches until an outcome with ``Delta(U^R), Delta(U^Gamma) <= tol`` appears.

    Returns ``(perfect_outcomes, realizations_examined)``.
    """
    found = []
    examined = 0
    while examined < max_realizations:
        n = min(batch, max_realizations - examined)
        seeds = [config.rng_seed + examined + i for i in range(n)]
        found.extend(o for o in run_seeds(config, seeds, workers) if o.is_perfect(tol))
        examined += n
        if found and stop_at_first:
            break
    return found, examined
