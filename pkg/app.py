"""CLI entry point for the surface mapper."""

import argparse
import logging
import math
import sys
from pathlib import Path

from src.config import load_maps_config, load_oracle_config, load_solver_config
from src.exceptions import (
    BranchPointError,
    ConfigError,
    GeometryError,
    NoConvergenceError,
    OnCutError,
    PoleError,
    SingularJacobianError,
    SurfaceError,
)
from src.maps import PSI, psi_user, trace_branch_curves
from src.models import INFINITY, AffineChart, IntervalPair, OutputFormat, SurfacePoint
from src.output import (
    curves_frame,
    eval_frame,
    format_json,
    render_frame,
    render_solution,
    report_json,
    reports_frame,
    table_frame,
    write_table_output,
)
from src.solver import continuation_solve
from src.surface import normalize_intervals
from src.verify import (
    ORACLE_TOLERANCE,
    TABLE_TOLERANCE,
    max_deviation,
    oracle_deviation,
    perturbed_solution,
    reproduce_table1,
    run_invariant_suite,
    verify_table1,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_GEOMETRY = 2
EXIT_NO_CONVERGENCE = 3
EXIT_BRANCH_POINT = 4
EXIT_VERIFY_FAILED = 5

# Flags whose values may start with a minus sign.
_VALUE_FLAGS = ("--lambda", "--mu", "--intervals", "--point", "--perturb")


def parse_point(text: str) -> complex:
    """'re', 're,im' or 'inf'."""
    text = text.strip()
    if text.lower() == "inf":
        return INFINITY
    parts = text.split(",")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        values = []
    if len(values) in (1, 2) and all(math.isfinite(v) for v in values):
        return complex(values[0], values[1] if len(values) == 2 else 0.0)
    raise argparse.ArgumentTypeError(
        f"point must be 're', 're,im' or 'inf' with finite components, got {text!r}"
    )


def parse_intervals(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        values = ()
    if len(values) != 4 or not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(
            f"intervals must be four finite comma-separated numbers a1,b1,a2,b2, got {text!r}"
        )
    return values


def _attach_values(argv: list[str]) -> list[str]:
    """Rewrite '--intervals -2,-1,1,2' as '--intervals=-2,-1,1,2'.

    argparse would otherwise read a value like '-2,-1,1,2' as an unknown option.
    """
    out = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
        else:
            out.append(token)
            i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        default=None,
        help="Path to solver YAML config (default: config/solver.yaml)",
    )
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default: WARNING)",
    )
    common.add_argument(
        "--format",
        default=OutputFormat.PRETTY.value,
        choices=[f.value for f in OutputFormat],
        help="Output format (default: pretty)",
    )

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--steps", type=int, default=None, help="Continuation steps n")
    solver.add_argument("--sigma", type=float, default=None, help="Newton stop tolerance")

    target = argparse.ArgumentParser(add_help=False)
    target.add_argument("--lambda", dest="lam", type=float, default=None, help="Right end of [1, lambda]")
    target.add_argument("--mu", type=float, default=None, help="Left end of [-mu, -1] is -mu")
    target.add_argument(
        "--intervals",
        type=parse_intervals,
        default=None,
        help="General intervals a1,b1,a2,b2 with a1 < b1 < a2 < b2",
    )

    parser = argparse.ArgumentParser(
        description="Surface mapper: conformal maps of a three-sheeted genus-0 surface.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", parents=[common, solver, target], help="Solve for (alpha, a)")
    p_solve.add_argument(
        "--trace-curves",
        default=None,
        help="Write the branch-curve polylines to this CSV file",
    )
    p_solve.add_argument(
        "--oracle",
        action="store_true",
        help="Cross-check (alpha, a) against the grid-search oracle; exit 5 on disagreement",
    )

    p_table = sub.add_parser("table", parents=[common, solver], help="Reproduce the golden table")
    p_table.add_argument("--jobs", type=int, default=1, help="Worker processes (default: 1)")
    p_table.add_argument(
        "--output",
        default=None,
        help="Also write a Computed/Golden/Summary workbook (.xlsx) or three CSV files (.csv)",
    )

    p_eval = sub.add_parser("eval", parents=[common, solver, target], help="Evaluate psi1 or psi2")
    p_eval.add_argument("--psi", type=int, choices=sorted(PSI), required=True)
    p_eval.add_argument("--sheet", type=int, choices=[0, 1, 2], required=True)
    p_eval.add_argument(
        "--point",
        type=parse_point,
        action="append",
        required=True,
        help="re[,im] or inf; repeatable",
    )
    p_eval.add_argument("--bank", choices=["upper", "lower"], default=None)
    p_eval.add_argument(
        "--user-coords",
        action="store_true",
        help="Points are in the coordinates of --intervals rather than canonical ones",
    )

    p_verify = sub.add_parser("verify", parents=[common, solver, target], help="Run the invariant suite")
    p_verify.add_argument("--all-table1", action="store_true", help="Verify every golden row")
    p_verify.add_argument("--jobs", type=int, default=1, help="Worker processes (default: 1)")
    p_verify.add_argument(
        "--perturb",
        type=float,
        default=None,
        help="Shift a by this amount before verifying (negative testing)",
    )

    return parser


def _target(args, parser) -> tuple[IntervalPair, AffineChart]:
    if args.intervals is not None:
        if args.lam is not None or args.mu is not None:
            parser.error("use either --intervals or --lambda/--mu, not both")
        return normalize_intervals(*args.intervals)
    if args.lam is None or args.mu is None:
        parser.error("--lambda and --mu (or --intervals) are required")
    return IntervalPair(args.lam, args.mu), AffineChart()


def cmd_solve(args, parser) -> int:
    target, chart = _target(args, parser)
    cfg = load_solver_config(args.config, n_steps=args.steps, sigma=args.sigma)
    sol = continuation_solve(target, cfg, chart)
    print(render_solution(sol, OutputFormat(args.format)))

    if args.trace_curves:
        maps_cfg = load_maps_config(args.config)
        regions = trace_branch_curves(sol, maps_cfg.curve_resolution)
        curves_frame(regions).to_csv(args.trace_curves, index=False, float_format="%.17g")
        logger.info("Branch curves written to %s", args.trace_curves)

    if args.oracle:
        deviation = oracle_deviation(sol, load_oracle_config(args.config))
        if deviation > ORACLE_TOLERANCE:
            logger.error(
                "Oracle disagrees with Newton continuation by %.3e (tolerance %.0e)",
                deviation, ORACLE_TOLERANCE,
            )
            return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_table(args, parser) -> int:
    cfg = load_solver_config(args.config, n_steps=args.steps, sigma=args.sigma)
    pairs = reproduce_table1(cfg, jobs=args.jobs)
    print(render_frame(table_frame(pairs), OutputFormat(args.format)))

    if args.output:
        output_format = "csv" if Path(args.output).suffix.lower() == ".csv" else "xlsx"
        stats = write_table_output(args.output, pairs, TABLE_TOLERANCE, format=output_format)
        logger.info("Table written to %s (%d rows)", args.output, stats.total_rows)

    deviation = max_deviation(pairs)
    if deviation > TABLE_TOLERANCE:
        logger.error("Max deviation %.3e exceeds %.1e", deviation, TABLE_TOLERANCE)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_eval(args, parser) -> int:
    target, chart = _target(args, parser)
    cfg = load_solver_config(args.config, n_steps=args.steps, sigma=args.sigma)
    sol = continuation_solve(target, cfg, chart)

    records = []
    for w in args.point:
        p = SurfacePoint(w, args.sheet, args.bank if w.imag == 0.0 else None)
        try:
            if args.user_coords:
                value = psi_user(sol, args.psi, p, strict=True)
            else:
                value = PSI[args.psi](sol, p, strict=True)
        except PoleError as e:
            logger.info("%s", e)
            value = INFINITY
        records.append({"w": w, "sheet": args.sheet, "bank": p.bank, "psi_value": value})

    fmt = OutputFormat(args.format)
    if fmt == OutputFormat.JSON:
        print(format_json(records))
    else:
        print(render_frame(eval_frame(records), fmt))
    return EXIT_OK


def cmd_verify(args, parser) -> int:
    solver_cfg = load_solver_config(args.config, n_steps=args.steps, sigma=args.sigma)
    maps_cfg = load_maps_config(args.config)
    fmt = OutputFormat(args.format)

    if args.all_table1:
        results = [
            (row.lam, row.mu, report)
            for row, report in verify_table1(solver_cfg, maps_cfg, jobs=args.jobs)
        ]
    else:
        target, chart = _target(args, parser)
        sol = continuation_solve(target, solver_cfg, chart)
        if args.perturb:
            sol = perturbed_solution(sol, args.perturb)
        results = [(target.lam, target.mu, run_invariant_suite(sol, maps_cfg))]

    if fmt == OutputFormat.JSON:
        if len(results) == 1:
            print(report_json(results[0][2]))
        else:
            print(format_json([
                {"lambda": lam, "mu": mu, **report.to_dict()} for lam, mu, report in results
            ]))
    else:
        print(render_frame(reports_frame(results), fmt))

    failed = [(lam, mu, report) for lam, mu, report in results if not report.all_passed]
    for lam, mu, report in failed:
        logger.error(
            "Verification failed for lambda=%s mu=%s: %s",
            lam, mu, ", ".join(c.name for c in report.failed()),
        )
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "table": cmd_table,
    "eval": cmd_eval,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_attach_values(sys.argv[1:] if argv is None else list(argv)))

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s [%(levelname)s] %(message)s",
    )
    if args.config:
        args.config = Path(args.config)

    try:
        return COMMANDS[args.command](args, parser)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_ERROR
    except (GeometryError, OnCutError) as e:
        logger.error(str(e))
        return EXIT_GEOMETRY
    except (NoConvergenceError, SingularJacobianError) as e:
        step = getattr(e, "step", None)
        hint = f" (continuation step {step}); try a larger --steps" if step else "; try a larger --steps"
        logger.error("%s%s", e, hint)
        return EXIT_NO_CONVERGENCE
    except BranchPointError as e:
        logger.error("%s", e)
        return EXIT_BRANCH_POINT
    except SurfaceError as e:
        logger.error(str(e))
        return EXIT_ERROR
    except Exception as e:
        logger.exception("Unexpected error: %s", e)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
