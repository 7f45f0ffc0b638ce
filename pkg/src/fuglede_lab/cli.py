"""Command line entry point: ``fuglede-lab <suite> [options]``.

Exit status is 0 iff no unexpected FAIL occurred (and, for the jordan suite,
every instance failed as it should).
"""

import argparse
import sys

from .harness import (
    SUITES, ConfigError, SuiteConfig, emit_report, load_tolerance_overrides,
    run_suite,
)
from .matrix import load_matrix

HELP = {
    "theorem21": "B A = A f(B) implies g(B) A = A (g o f)(B)",
    "flip": "B A = A B* implies B* A = A B",
    "fuglede": "B A = A B implies B* A = A B*",
    "putnam": "B A = A C implies B* A = A C*",
    "transport": "B A = A C implies C A* = A* B",
    "norm_identity": "||B* T x|| = ||B T x|| for normal B",
    "selfadjoint_product": "BT Hermitian implies B*T Hermitian",
    "prop25": "flip check on [[U,0],[0,U*]], [[0,A],[A*,0]] pairs",
    "jordan": "nilpotent witness; every instance is expected to FAIL",
    "oracle_dims": "intertwiner dimension vs eigenvalue-coincidence count",
    "all": "every suite above",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fuglede-lab",
        description="Randomized residual checks of intertwining implications for matrices.")
    sub = parser.add_subparsers(dest="suite", required=True, metavar="SUITE")
    for name in SUITES + ("all",):
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-dim", type=int, default=12)
        p.add_argument("--max-distinct-eigs", type=int, default=6)
        p.add_argument("--tol-hypothesis", type=float, default=None)
        p.add_argument("--tol-conclusion", type=float, default=None)
        p.add_argument("--rank-tol", type=float, default=None)
        p.add_argument("--cluster-tol", type=float, default=None)
        p.add_argument("--fixture", metavar="PATH",
                       help="matrix JSON file used as B in every trial")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out", metavar="PATH", help="write the report here")
        p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def config_from_args(args, environ=None):
    tol = load_tolerance_overrides(environ)
    flags = {
        "hypothesis_tol": args.tol_hypothesis,
        "conclusion_tol": args.tol_conclusion,
        "rank_tol": args.rank_tol,
        "cluster_tol": args.cluster_tol,
    }
    tol.update({k: v for k, v in flags.items() if v is not None})
    fixture = load_matrix(args.fixture) if args.fixture else None
    return SuiteConfig(
        suite=args.suite, trials=args.trials, seed=args.seed,
        max_dim=args.max_dim, max_distinct_eigs=args.max_distinct_eigs,
        fixture=fixture, **tol,
    ).validate()


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"fuglede-lab: {exc}", file=sys.stderr)
        return 2
    report = run_suite(cfg, workers=args.workers)
    s = report.summary
    print(f"{cfg.suite}: {len(report.instances)} instances, pass={s['pass']} "
          f"fail={s['fail']} vacuous={s['vacuous']} unexpected={s['unexpected']} "
          f"({report.wall_time:.2f}s)")
    for r in report.instances:
        if r.verdict.value == "FAIL" and not r.instance_id.startswith("jordan:"):
            print(f"  unexpected FAIL {r.instance_id}: hypothesis {r.hypothesis_residual:.3e}, "
                  f"conclusion {r.conclusion_residual:.3e}")
    if args.out:
        emit_report(report, args.format, args.out)
    return 0 if report.unexpected == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
