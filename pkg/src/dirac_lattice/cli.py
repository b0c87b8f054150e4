"""Command line: ``dirac-lattice analyze|verify``.

Exit status is 0 on success, 1 when a verification fails (or the
constraint algorithm finds an inconsistency) and 2 on bad input.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dirac import InconsistentSystem, NonIntegerDof
from .report import SUITES, build_report, render_text, to_json
from .theory import NonFirstOrderLagrangian, ParseError, ValidationError
from .validation import InputError, check_extent, check_theory


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dirac-lattice",
                                description="Exact constraint analysis of first-order lattice field theories.")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theory", default="paper_g0",
                        help="built-in name (paper_g0, maxwell1) or path to a .theory file")
    common.add_argument("--n", type=int, default=2, help="spatial lattice extent")
    common.add_argument("--t", type=int, default=2, help="time extent for spacetime checks")
    common.add_argument("--out", type=Path, help="write the JSON report here")
    common.add_argument("--threads", type=int, default=1, help="worker threads (output does not depend on it)")
    common.add_argument("--timing", action="store_true", help="include wall-clock timings")
    sub.add_parser("analyze", parents=[common], help="run the constraint algorithm and count")
    v = sub.add_parser("verify", parents=[common], help="run seeded verification suites")
    v.add_argument("--suite", choices=SUITES, default="all")
    v.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        spec = check_theory(args.theory)
        n = check_extent(args.n, "n")
        t = check_extent(args.t, "t", ceiling=None)
        n_threads = check_extent(args.threads, "threads", ceiling=None)
        report = build_report(spec, n, t, args.command, getattr(args, "suite", None),
                              getattr(args, "seed", 0), n_threads, args.timing)
    except (InputError, ParseError, ValidationError, NonFirstOrderLagrangian, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InconsistentSystem, NonIntegerDof) as exc:
        print(f"analysis failed: {exc}", file=sys.stderr)
        return 1
    if args.out is not None:
        args.out.write_text(to_json(report), encoding="utf-8")
    sys.stdout.write(render_text(report))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
