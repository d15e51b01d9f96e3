"""Command-line experiment harness.

Subcommands: hull, exam, experts, portfolio, check.  Exit codes: 0 on
success, 1 for configuration errors, 2 for data validation errors, 3 for
numerical failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import KINDS, ExperimentConfig, run_experiment
from .exceptions import ConfigError, DataValidationError, NumericalError
from .solvers import METHODS


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_common(p):
    p.add_argument("--seed", type=int, default=0, help="master RNG seed")
    p.add_argument("--solver", action="append", choices=METHODS, default=None,
                   help="solver to run (repeatable; default cs, egd, pfw)")
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--out", type=str, default="results", help="output directory")
    p.add_argument("--config", type=str, default=None,
                   help="JSON config file; explicit flags override its fields")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="simplexopt",
                     description="Simplex-constrained optimization benchmarks")
    sub = parser.add_subparsers(dest="kind", required=True, metavar="|".join(KINDS))

    hull = sub.add_parser("hull", parents=[], help="project points onto a sampled hull")
    _add_common(hull)
    hull.add_argument("--dim", type=int, default=10)
    hull.add_argument("--queries", type=int, default=50)
    hull.add_argument("--per-surface", type=int, default=50)

    exam = sub.add_parser("exam", help="reweight synthetic exam scores")
    _add_common(exam)
    exam.add_argument("--students", type=int, default=200)
    exam.add_argument("--questions", type=int, default=75)
    exam.add_argument("--iters", type=int, default=150)
    exam.add_argument("--bandwidth", type=float, default=0.05)
    exam.add_argument("--partition", type=int, default=400)
    exam.add_argument("--trials", type=int, default=25)

    experts = sub.add_parser("experts", help="prediction with expert advice")
    _add_common(experts)
    experts.add_argument("--experts", type=int, default=10)
    experts.add_argument("--rounds", type=int, default=1000)
    experts.add_argument("--loss-kind", choices=("iid", "adversarial"),
                         default="iid")
    experts.add_argument("--trials", type=int, default=5)

    portfolio = sub.add_parser("portfolio", help="universal-portfolio backtest")
    _add_common(portfolio)
    portfolio.add_argument("--data", type=str, required=False,
                           help="price-relative CSV")
    portfolio.add_argument("--strategy", choices=("cs", "egd", "bh"), default="cs")
    portfolio.add_argument("--market-variability", type=float, default=None)
    portfolio.add_argument("--risk-free", type=float, default=0.04)

    check = sub.add_parser("check", help="run the invariant/diagnostic suite")
    _add_common(check)

    return parser


_FLAG_TO_FIELD = {
    "seed": "seed", "max_iter": "max_iter", "tol": "tol", "out": "out_dir",
    "dim": "dim", "queries": "queries", "per_surface": "per_surface",
    "students": "students", "questions": "questions", "iters": "iters",
    "bandwidth": "bandwidth", "partition": "partition", "trials": "trials",
    "experts": "experts", "rounds": "rounds", "loss_kind": "loss_kind",
    "data": "data_path", "strategy": "strategy",
    "market_variability": "market_variability", "risk_free": "risk_free",
}


def config_from_args(args: argparse.Namespace, argv) -> ExperimentConfig:
    explicit = {a.lstrip("-").replace("-", "_").split("=")[0] for a in argv
                if a.startswith("--")}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"no such config file: {path}")
        cfg = ExperimentConfig.from_json(path.read_text())
        if cfg.kind != args.kind:
            raise ConfigError(
                f"config kind {cfg.kind!r} does not match subcommand {args.kind!r}"
            )
    else:
        cfg = ExperimentConfig(kind=args.kind)
    for flag, name in _FLAG_TO_FIELD.items():
        if not hasattr(args, flag):
            continue
        value = getattr(args, flag)
        if args.config and flag not in explicit:
            continue  # keep the config file's value
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "solver", None):
        if not args.config or "solver" in explicit:
            cfg.solvers = tuple(args.solver)
    cfg.__post_init__()  # re-validate after overrides
    return cfg


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = config_from_args(args, argv)
        outputs = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DataValidationError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3

    if cfg.kind == "check":
        failed = 0
        for c in outputs["checks"]:
            status = "PASS" if c["passed"] else "FAIL"
            failed += not c["passed"]
            detail = f"  ({c['detail']})" if c["detail"] else ""
            print(f"[{status}] {c['check']}{detail}")
        print(f"wrote {outputs['results']}")
        return 0 if failed == 0 else 3

    for name, path in outputs.items():
        print(f"wrote {name}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
