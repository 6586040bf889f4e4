"""Output writer: JSON records, CSV/pretty tables and the 3-sheet table workbook."""

import json
import math
from pathlib import Path

import pandas as pd

from src.models import (
    BranchRegions,
    OutputFormat,
    SurfaceSolution,
    Table1Row,
    TableStats,
    VerificationReport,
)

TABLE_COLUMNS = ["lambda", "mu", "beta", "alpha", "a", "b"]


def _jsonable(value):
    """Complex numbers become [re, im]; non-finite floats become "inf", "-inf" or "nan"."""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, complex):
        if math.isinf(value.real) or math.isinf(value.imag):
            return "inf"
        return [_jsonable(value.real), _jsonable(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if hasattr(value, "item"):
        return _jsonable(value.item())
    return value


def format_json(obj) -> str:
    """JSON with floats in their shortest round-trip form; independent of locale."""
    return json.dumps(_jsonable(obj), indent=2)


def solution_record(sol: SurfaceSolution) -> dict[str, float]:
    return sol.to_dict()


def render_frame(df: pd.DataFrame, fmt: OutputFormat) -> str:
    """Render a DataFrame as CSV (header row, 17 significant digits), JSON records or a table."""
    if fmt == OutputFormat.CSV:
        return df.to_csv(index=False, float_format="%.17g", lineterminator="\n")
    if fmt == OutputFormat.JSON:
        return format_json(df.to_dict(orient="records"))
    return df.to_string(index=False)


def render_solution(sol: SurfaceSolution, fmt: OutputFormat) -> str:
    if fmt == OutputFormat.JSON:
        return format_json(solution_record(sol))
    return render_frame(pd.DataFrame([solution_record(sol)]), fmt)


def _rows_frame(rows: list[Table1Row]) -> pd.DataFrame:
    return pd.DataFrame(
        [(r.lam, r.mu, r.beta, r.alpha, r.a, r.b) for r in rows], columns=TABLE_COLUMNS
    )


def table_frame(pairs: list[tuple[Table1Row, Table1Row]]) -> pd.DataFrame:
    """Computed rows with their max absolute deviation from the golden row."""
    df = _rows_frame([computed for computed, _ in pairs])
    df["max_dev"] = [computed.deviation(golden) for computed, golden in pairs]
    return df


def compute_table_stats(
    pairs: list[tuple[Table1Row, Table1Row]], tolerance: float
) -> TableStats:
    """Compute summary statistics."""
    if not pairs:
        return TableStats(0, 0.0, math.nan, math.nan, tolerance)
    worst, _ = max(pairs, key=lambda p: p[0].deviation(p[1]))
    return TableStats(
        total_rows=len(pairs),
        max_deviation=max(c.deviation(g) for c, g in pairs),
        worst_lam=worst.lam,
        worst_mu=worst.mu,
        tolerance=tolerance,
    )


def _build_summary_df(stats: TableStats) -> pd.DataFrame:
    """Build the summary sheet DataFrame."""
    rows = [
        {"Label": "Rows", "Value": stats.total_rows},
        {"Label": "Max deviation", "Value": stats.max_deviation},
        {"Label": "Worst lambda", "Value": stats.worst_lam},
        {"Label": "Worst mu", "Value": stats.worst_mu},
        {"Label": "Tolerance", "Value": stats.tolerance},
        {"Label": "Passed", "Value": stats.passed},
    ]
    return pd.DataFrame(rows)


def write_table_output(
    path: str | Path,
    pairs: list[tuple[Table1Row, Table1Row]],
    tolerance: float,
    format: str = "xlsx",
) -> TableStats:
    """Write the reproduced table to file(s).

    When format="xlsx": Single 3-sheet Excel workbook (Computed, Golden, Summary).
    When format="csv": Three CSV files, {stem}_computed.csv, {stem}_golden.csv,
                       {stem}_summary.csv.

    Returns TableStats with the deviation summary.
    """
    path = Path(path)
    stats = compute_table_stats(pairs, tolerance)
    df_computed = table_frame(pairs)
    df_golden = _rows_frame([golden for _, golden in pairs])
    df_summary = _build_summary_df(stats)

    if format == "csv":
        stem = path.parent / path.stem
        df_computed.to_csv(f"{stem}_computed.csv", index=False, float_format="%.17g")
        df_golden.to_csv(f"{stem}_golden.csv", index=False, float_format="%.17g")
        df_summary.to_csv(f"{stem}_summary.csv", index=False)
    else:
        with pd.ExcelWriter(path, engine="openpyxl") as writer:
            df_computed.to_excel(writer, sheet_name="Computed", index=False)
            df_golden.to_excel(writer, sheet_name="Golden", index=False)
            df_summary.to_excel(writer, sheet_name="Summary", index=False)

    return stats


def curves_frame(regions: BranchRegions) -> pd.DataFrame:
    """Branch-curve polylines, one row per vertex, for external plotting."""
    frames = [
        pd.DataFrame(
            {
                "curve": name,
                "index": range(len(curve)),
                "re": curve.real,
                "im": curve.imag,
            }
        )
        for name, curve in (("curve0", regions.curve0), ("curve2", regions.curve2))
    ]
    return pd.concat(frames, ignore_index=True)


def eval_frame(records: list[dict]) -> pd.DataFrame:
    """One row per evaluated point: w, sheet, bank and the psi value split into parts.

    Infinite w or psi values are written as the string "inf".
    """
    rows = []
    for rec in records:
        row = {"sheet": rec["sheet"], "bank": rec.get("bank") or ""}
        for key in ("w", "psi_value"):
            value = complex(rec[key])
            if math.isinf(value.real) or math.isinf(value.imag):
                row[f"{key}_re"], row[f"{key}_im"] = "inf", ""
            else:
                row[f"{key}_re"], row[f"{key}_im"] = value.real, value.imag
        rows.append(row)
    return pd.DataFrame(
        rows, columns=["w_re", "w_im", "sheet", "bank", "psi_value_re", "psi_value_im"]
    )


def report_json(report: VerificationReport) -> str:
    return format_json(report.to_dict())


def reports_frame(reports: list[tuple[float, float, VerificationReport]]) -> pd.DataFrame:
    """Flatten (lambda, mu, report) triples into one row per check."""
    rows = [
        {
            "lambda": lam,
            "mu": mu,
            "check": c.name,
            "passed": c.passed,
            "worst_residual": c.worst_residual,
            "tolerance": c.tolerance,
        }
        for lam, mu, report in reports
        for c in report.checks
    ]
    return pd.DataFrame(
        rows, columns=["lambda", "mu", "check", "passed", "worst_residual", "tolerance"]
    )
