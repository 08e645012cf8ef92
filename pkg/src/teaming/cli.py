"""Command line entry point.

Exit codes: 0 success, 2 an embedded check failed, 3 solver did not
converge, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import experiments as ex
from .game import GameError, GameParams
from .optimize import SolverConfig
from .topologies import NAMED

EXIT_OK, EXIT_CHECK, EXIT_NONCONVERGED, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("teaming")


def _common(parser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--out", default=d(None), help="output directory (default: out)")
    parser.add_argument("--seed", type=int, default=d(None), help="random seed (default: 0)")
    parser.add_argument("--config", default=d(None), help="JSON file with ExperimentSpec fields")
    parser.add_argument("--threads", type=int, default=d(1), help="worker threads for grid points")


def _grid_args(parser, start, stop, num, log_default):
    parser.add_argument("--beta-min", type=float, default=start)
    parser.add_argument("--beta-max", type=float, default=stop)
    parser.add_argument("--points", type=int, default=num)
    g = parser.add_mutually_exclusive_group()
    g.add_argument("--log", dest="log", action="store_true", default=log_default, help="log-spaced grid")
    g.add_argument("--linear", dest="log", action="store_false", help="evenly spaced grid")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="teaming", description=__doc__.splitlines()[0])
    _common(parser, suppress=False)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _common(common, suppress=True)

    p = sub.add_parser("fig3", parents=[common], help="uniform design vs beta for several rho")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--rho", type=float, nargs="+", default=[1.0, 5.0, 10.0])
    _grid_args(p, **{k: v for k, v in ex.FIG3_GRID.items() if k != "log"}, log_default=ex.FIG3_GRID["log"])

    p = sub.add_parser("topologies", parents=[common], help="line / star / hybrid objective vs beta")
    p.add_argument("--theta", type=float, default=4.0)
    p.add_argument("--rho", type=float, default=5.0)
    _grid_args(p, **{k: v for k, v in ex.FIG5_GRID.items() if k != "log"}, log_default=ex.FIG5_GRID["log"])

    sub.add_parser("published", parents=[common], help="solve and check the published N=5 star and line designs")

    p = sub.add_parser("chain", parents=[common], help="simulate log-linear learning and compare with Gibbs")
    p.add_argument("--n", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--pattern", choices=NAMED + ("custom",))
    p.add_argument("--edges")
    p.add_argument("--weight", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--tv-threshold", type=float)

    p = sub.add_parser("optimize", parents=[common], help="optimise weights on one sparsity pattern")
    p.add_argument("--n", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--pattern", choices=NAMED + ("custom",))
    p.add_argument("--edges", help="custom 0-based edge list, e.g. '0-1,1-2'")
    p.add_argument("--max-iterations", type=int, default=10_000)

    p = sub.add_parser("uniform", parents=[common], help="1-D uniform-weight solution over a beta grid")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--theta", type=float)
    p.add_argument("--rho", type=float, default=5.0)
    _grid_args(p, **{k: v for k, v in ex.FIG3_GRID.items() if k != "log"}, log_default=True)
    return parser


def _grid(args):
    return ex.make_grid(args.beta_min, args.beta_max, args.points, args.log)


def _load_config(args) -> dict:
    if not args.config:
        return {}
    with open(args.config) as fh:
        return json.load(fh)


def _spec(args, kind: str) -> ex.ExperimentSpec:
    """Config file values, overridden by flags given on the command line."""
    base = _load_config(args)
    base["kind"] = kind
    for key in ("n", "theta", "beta", "rho", "pattern", "edges", "weight", "steps", "burn_in", "tv_threshold"):
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    if args.out is not None:
        base["output_dir"] = args.out
    if args.seed is not None:
        base["seed"] = args.seed
    return ex.ExperimentSpec.from_dict(base)


def _finish(rep: ex.ExperimentReport) -> int:
    for c in rep.checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}" + (f"  ({c.detail})" if c.detail else ""))
    for f in rep.files:
        log.info("wrote %s", f)
    if not rep.ok:
        return EXIT_CHECK
    if rep.nonconverged:
        print("solver did not converge for: " + ", ".join(rep.nonconverged))
        return EXIT_NONCONVERGED
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        config = _load_config(args)
        out = ex.output_dir(args.out or config.get("output_dir", "out"))
        if args.out is None:
            args.out = str(out)
        if args.command == "fig3":
            rep = ex.run_fig3(args.n, args.rho, _grid(args), out, threads=args.threads)
        elif args.command == "topologies":
            rep = ex.run_topology_compare(_grid(args), out, theta=args.theta, rho=args.rho, threads=args.threads)
        elif args.command == "published":
            rep = ex.run_published_matrices(out)
        elif args.command == "chain":
            rep = ex.run_chain_validation(_spec(args, "chain_validate"))
        elif args.command == "optimize":
            spec = _spec(args, "pattern_optimize")
            rep = ex.run_pattern_optimize(
                spec, SolverConfig(max_iterations=args.max_iterations, allow_large=spec.n > 15)
            )
            r = rep.data["result"]
            print(f"objective {r.objective.total:.10g}  lambda2 {r.lambda2:.6g}  iterations {r.iterations}  converged {r.converged}")
        elif args.command == "uniform":
            theta = args.theta if args.theta is not None else args.n / 2 + 1
            rep = ex.run_uniform_sweep(GameParams(args.n, theta, 1.0, args.rho), _grid(args), out)
        else:  # pragma: no cover - argparse enforces the choices
            raise AssertionError(args.command)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except GameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK
    return _finish(rep)


if __name__ == "__main__":
    sys.exit(main())
