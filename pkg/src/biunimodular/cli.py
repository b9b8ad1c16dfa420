"""``biuni``: construct, verify and search for biunimodular phase arrays.

Exit codes: 0 success (requested properties hold), 1 properties fail,
2 usage or input error. ``BIUNI_THREADS`` sets the ensemble thread count.
"""

import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .arrays import PhaseArray, gauss_product, known_vector, quadratic_ansatz
from .certification import certify, chm_check
from .diagonal import build_diagonal_unitary, chm_construct, circuit_to_json
from .linalg import local_dim, matrix_from_json, matrix_to_json
from .search import ALGORITHMS, SearchConfig, run_seeds, run_ensemble

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temporary file in the same directory and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


class Outputs:
    def __init__(self, out_dir):
        self.dir = Path(out_dir) if out_dir else None
        self.files = []

    def write(self, name, text):
        if self.dir is None:
            return
        write_atomic(self.dir / name, text)
        self.files.append(name)

    def manifest(self, args, argv, started, seeds=None, config=None):
        if self.dir is None:
            return
        data = {
            "command": args.command,
            "argv": list(argv),
            "config": config if config is not None else _args_echo(args),
            "version": __version__,
            "rng_seeds": seeds,
            "outputs": list(self.files),
            "wall_clock_seconds": time.perf_counter() - started,
        }
        write_atomic(self.dir / "manifest.json", json.dumps(data, indent=2) + "\n")


def _args_echo(args):
    return {k: v for k, v in vars(args).items() if k != "func"}


def _algorithm(name):
    key = name.replace("-", "_")
    if key not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
    return key


def _read_text(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def load_input(path):
    """Phase array or matrix JSON; returns ``(PhaseArray or None, unitary)``."""
    try:
        data = json.loads(_read_text(path))
        if "rows" in data:
            u = matrix_from_json(data)
            local_dim(u)
            return None, u
        if "phase_array" in data:
            data = data["phase_array"]
        lam = PhaseArray.from_dict(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot parse {path}: {exc}") from exc
    return lam, build_diagonal_unitary(lam)


def _construct_source(args):
    src = args.source
    p = args.params
    try:
        if src == "quadratic":
            if len(p) != 4:
                raise UsageError("quadratic needs: d c_aa c_ab c_bb")
            return quadratic_ansatz(*map(int, p))
        if src == "known":
            if len(p) != 1:
                raise UsageError("known needs one of L1, L2, L3")
            return known_vector(p[0])
        if src == "gauss-product":
            if len(p) != 1:
                raise UsageError("gauss-product needs: d")
            return gauss_product(int(p[0]))
        if src == "file":
            if len(p) != 1:
                raise UsageError("file needs: path")
            lam, _ = load_input(p[0])
            if lam is None:
                raise UsageError("file source must contain a phase array")
            return lam
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown source {src!r}")


def cmd_construct(args, argv):
    started = time.perf_counter()
    lam = _construct_source(args)
    out = Outputs(args.out)
    out.write("array.json", lam.to_json() + "\n")
    if args.unitary:
        out.write("unitary.json", matrix_to_json(build_diagonal_unitary(lam)) + "\n")
    if args.circuit:
        out.write("circuit.json", circuit_to_json(lam, symmetric=args.symmetric, ref="array.json") + "\n")
    out.manifest(args, argv, started)
    if args.out is None:
        print(lam.to_json())
    else:
        print(f"wrote {', '.join(out.files)} to {args.out}")
    return EXIT_OK


def cmd_verify(args, argv):
    started = time.perf_counter()
    lam, u = load_input(args.input)
    report = certify(u, tol=args.tol, blocks=args.blocks, stabilizers=args.stabilizers)
    ok = report.is_two_unitary
    if args.stabilizers:
        ok = ok and report.stabilizers_pass
    if args.chm:
        h = chm_construct(u, side="left")
        hr = certify(h, tol=args.tol)
        dev = chm_check(h)
        report.extras["chm_modulus_deviation"] = dev
        report.extras["chm_two_unitary"] = hr.is_two_unitary
        ok = ok and dev <= args.tol and hr.is_two_unitary
    out = Outputs(args.out)
    out.write("report.json", report.to_json() + "\n")
    out.write("report.txt", report.to_text() + "\n")
    out.manifest(args, argv, started)
    print(report.to_text())
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def _config(args):
    if args.seeds < 1:
        raise UsageError("--seeds must be >= 1")
    try:
        return SearchConfig(
            d=args.d,
            algorithm=_algorithm(args.algorithm),
            rng_seed=args.seed,
            max_iterations=args.iters,
            convergence_tol=args.conv_tol,
            record_trace=getattr(args, "trace", False),
            seed_form=args.seed_form,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_search(args, argv):
    started = time.perf_counter()
    config = _config(args)
    seeds = [config.rng_seed + i for i in range(args.seeds)]
    outcomes = run_seeds(config, seeds, args.threads)
    if args.target == "perfect":
        found = [o for o in outcomes if o.is_perfect(args.tol)]
    else:
        found = [o for o in outcomes if o.is_dual(args.tol)]
    out = Outputs(args.out)
    out.write("found.json", json.dumps([o.to_dict() for o in found], indent=1) + "\n")
    out.manifest(args, argv, started, seeds=[seeds[0], seeds[-1]], config=asdict(config))
    print(f"{config.algorithm} d={config.d}: {len(found)} of {len(outcomes)} seeds reach "
          f"{args.target} at tol {args.tol:g}")
    for o in found:
        print(f"  seed {o.seed}: iterations {o.iterations_used}, "
              f"Delta(U^R) {o.delta_R:.3e}, Delta(U^Gamma) {o.delta_Gamma:.3e}")
    return EXIT_OK if found else EXIT_FAIL


def cmd_ensemble(args, argv):
    started = time.perf_counter()
    config = _config(args)
    ens = run_ensemble(config, args.seeds, workers=args.threads)
    out = Outputs(args.out)
    out.write("ensemble.csv", ens.to_csv())
    if args.histogram:
        out.write("histogram_delta_R.csv", ens.histogram_csv("delta_R", args.bins))
        out.write("histogram_delta_Gamma.csv", ens.histogram_csv("delta_Gamma", args.bins))
    out.manifest(args, argv, started, seeds=[config.rng_seed, config.rng_seed + args.seeds - 1],
                 config=asdict(config))
    conv = np.mean([o.converged for o in ens.outcomes])
    print(f"{config.algorithm} d={config.d}: {args.seeds} seeds x {config.max_iterations} iterations")
    print(f"  converged fraction          {conv:.3f}")
    print(f"  Delta(U^R) <= {args.tol:g} fraction  {ens.fraction_dual(args.tol):.3f}")
    print(f"  min Delta(U^Gamma)          {ens.delta_Gamma.min():.6f}")
    print(f"  perfect tensors             {len(ens.perfect(args.tol))}")
    print(f"  random control min Delta(U^R) {ens.random_delta_R.min():.6f}")
    return EXIT_OK


def cmd_replay(args, argv):
    try:
        manifest = json.loads(_read_text(args.manifest))
        old = list(manifest["argv"])
    except (ValueError, KeyError) as exc:
        raise UsageError(f"cannot parse manifest {args.manifest}: {exc}") from exc
    if "--out" in old:
        i = old.index("--out")
        del old[i:i + 2]
    new = old + ["--out", args.out] if args.out else old
    return main(new)


def _add_search_args(p, seeds_default):
    p.add_argument("algorithm", help="biuni, biuni-swap, polar-R or polar-GammaR")
    p.add_argument("d", type=int)
    p.add_argument("--seeds", type=int, default=seeds_default, help="number of realizations")
    p.add_argument("--iters", type=int, default=2000, help="iterations per realization")
    p.add_argument("--seed", type=int, default=0, help="base RNG seed; realization i uses seed + i")
    p.add_argument("--tol", type=float, default=1e-6, help="tolerance for reporting dual / perfect outcomes")
    p.add_argument("--conv-tol", type=float, default=1e-10, help="convergence tolerance of the iteration")
    p.add_argument("--seed-form", choices=("diagonal", "haar"), default="diagonal",
                   help="seed unitaries for the polar maps")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $BIUNI_THREADS or 1)")
    p.add_argument("--out", default=None, help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(prog="biuni", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a phase array")
    p.add_argument("source", choices=("quadratic", "known", "gauss-product", "file"))
    p.add_argument("params", nargs="*")
    p.add_argument("--unitary", action="store_true", help="also write the unitary matrix JSON")
    p.add_argument("--circuit", action="store_true", help="also write the circuit JSON")
    p.add_argument("--symmetric", action="store_true", help="circuit in the P F D F P form")
    p.add_argument("--out", default=None, help="output directory (default: print array JSON)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="certify a phase array or matrix file")
    p.add_argument("input")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--blocks", action="store_true", help="report block structure and distinct |entries|")
    p.add_argument("--stabilizers", action="store_true", help="check the d**2 local stabilizers")
    p.add_argument("--chm", action="store_true", help="check (F x I) U (F^dagger x I) is a 2-unitary Hadamard")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="run seeds and keep dual or perfect outcomes")
    _add_search_args(p, 500)
    p.add_argument("--target", choices=("perfect", "dual"), default="perfect")
    p.add_argument("--trace", action="store_true", help="record per-iteration residuals")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("ensemble", help="seeded ensemble with CSV and histogram output")
    _add_search_args(p, 200)
    p.add_argument("--histogram", action="store_true", help="write histogram CSVs")
    p.add_argument("--bins", type=int, default=100)
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("replay", help="rerun the command recorded in a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args, argv)
    except UsageError as exc:
        print(f"biuni: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
