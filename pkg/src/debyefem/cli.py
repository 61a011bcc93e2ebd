"""Command line entry point: ``debyefem {converge,run,check}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .checks import run_checks

log = logging.getLogger("debyefem")


def _load(args) -> harness.RunConfig:
    cfg = harness.load_config(args.config) if args.config else harness.RunConfig()
    if args.postprocess:
        cfg.postprocess = True
    if args.strict_paper_mode:
        cfg.strict_paper_mode = True
    if args.out:
        cfg.out_dir = args.out
    return cfg


def cmd_converge(args) -> int:
    cfg = _load(args)
    reports = harness.converge(cfg)
    text = harness.table_csv(reports, cfg.postprocess)
    sys.stdout.write(text)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "convergence.csv").write_text(text)
    for rep in reports:
        log.info("N=%d  %.2fs  max CG its %d  max Newton its %d", rep.N, rep.runtime,
                 rep.linear_iterations, rep.newton_iterations)
    return 0


def cmd_run(args) -> int:
    cfg = _load(args)
    paths = harness.run_snapshots(cfg)
    print(f"wrote {len(paths)} files to {cfg.out_dir}")
    return 0


def cmd_check(args) -> int:
    results = run_checks(corrupt_stiffness=args.corrupt_stiffness)
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'}  {res.name}  ({res.detail})")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="debyefem",
                                     description="Edge-element solver for Maxwell's equations "
                                                 "in nonlinear Debye media.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_text in (("converge", cmd_converge, "mesh-refinement error table"),
                                  ("run", cmd_run, "single run with snapshot export")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--postprocess", action="store_true",
                       help="add post-processed (superconvergent) fields and columns")
        p.add_argument("--out", help="output directory (overrides out_dir)")
        p.add_argument("--strict-paper-mode", action="store_true",
                       help="linear zero law and no polarization source")
        p.set_defaults(func=func)

    p = sub.add_parser("check", help="oracle and property self-checks")
    p.add_argument("--corrupt-stiffness", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (harness.ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
