"""Tests for the invariant suite and the golden-table reproduction."""

import hashlib

import pytest
import yaml

from src.exceptions import ConfigError
from src.models import IntervalPair, MapsConfig
from src.solver import continuation_solve
from src.verify import (
    TABLE_TOLERANCE,
    load_table1,
    max_deviation,
    perturbed_solution,
    registered_checks,
    reproduce_table1,
    run_invariant_suite,
    verify_table1,
)

SMALL_MAPS = MapsConfig(curve_resolution=256, laurent_radii=(1e3, 1e4), laurent_samples=32)


def _write_table(path, rows, digest=None):
    if digest is None:
        digest = hashlib.sha256("\n".join(rows).encode("utf-8")).hexdigest()
    path.write_text(yaml.safe_dump({"sha256": digest, "rows": rows}), encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def sol():
    return continuation_solve(IntervalPair(2.0, 5.0))


@pytest.fixture(scope="module")
def report(sol):
    return run_invariant_suite(sol)


class TestLoadTable1:
    def test_bundled_table(self):
        rows = load_table1()
        assert len(rows) == 36
        assert (rows[0].lam, rows[0].mu) == (1.01, 1.10)
        assert (rows[-1].lam, rows[-1].mu) == (50.0, 100.0)

    def test_rows_sum_to_zero(self):
        for row in load_table1():
            assert abs(sum(row.values())) <= 2e-8
            assert row.beta < row.alpha < row.a < row.b

    def test_custom_table(self, tmp_path):
        path = _write_table(tmp_path / "t.yaml", ["2.00 5.00 -1.47250352 -0.52657019 0.87477665 1.12429705"])
        rows = load_table1(path)
        assert len(rows) == 1
        assert rows[0].a == 0.87477665

    def test_checksum_mismatch(self, tmp_path):
        path = _write_table(
            tmp_path / "t.yaml",
            ["2.00 5.00 -1.47250352 -0.52657019 0.87477665 1.12429705"],
            digest="0" * 64,
        )
        with pytest.raises(ConfigError, match="checksum"):
            load_table1(path)

    def test_tampered_row(self, tmp_path):
        original = ["2.00 5.00 -1.47250352 -0.52657019 0.87477665 1.12429705"]
        digest = hashlib.sha256(original[0].encode("utf-8")).hexdigest()
        path = _write_table(
            tmp_path / "t.yaml",
            ["2.00 5.00 -1.47250352 -0.52657019 0.87477666 1.12429705"],
            digest=digest,
        )
        with pytest.raises(ConfigError):
            load_table1(path)

    def test_short_row(self, tmp_path):
        path = _write_table(tmp_path / "t.yaml", ["2.00 5.00 -1.47250352"])
        with pytest.raises(ConfigError, match="6 values"):
            load_table1(path)

    def test_non_numeric_row(self, tmp_path):
        path = _write_table(tmp_path / "t.yaml", ["2.00 5.00 a b c d"])
        with pytest.raises(ConfigError, match="not numeric"):
            load_table1(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_table1(tmp_path / "missing.yaml")

    def test_rows_not_a_list(self, tmp_path):
        path = tmp_path / "t.yaml"
        path.write_text("rows: 3\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_table1(path)


class TestInvariantSuite:
    def test_all_checks_pass(self, report):
        assert report.all_passed, [(c.name, c.worst_residual) for c in report.failed()]

    def test_check_names_in_order(self, report):
        assert [c.name for c in report.checks] == registered_checks()

    def test_symmetric_checks_only_for_symmetric_targets(self, report):
        names = {c.name for c in report.checks}
        assert "symmetric_reduction" not in names
        assert set(registered_checks(symmetric=True)) - names == {
            "symmetric_reduction",
            "symmetric_closed_forms",
            "symmetric_curves",
        }

    def test_symmetric_target(self):
        report = run_invariant_suite(continuation_solve(IntervalPair(2.0, 2.0)))
        assert [c.name for c in report.checks] == registered_checks(symmetric=True)
        assert report.all_passed, [(c.name, c.worst_residual) for c in report.failed()]

    def test_deterministic(self, sol, report):
        again = run_invariant_suite(sol)
        assert [c.worst_residual for c in again.checks] == [c.worst_residual for c in report.checks]

    def test_residuals_within_tolerance(self, report):
        for c in report.checks:
            assert c.worst_residual <= c.tolerance, c.name

    def test_perturbed_solution_fails(self, sol):
        bad = run_invariant_suite(perturbed_solution(sol, 1e-3))
        assert not bad.all_passed
        by_name = {c.name: c for c in bad.checks}
        assert not by_name["critical_values"].passed
        assert by_name["critical_values"].worst_residual > 1e-4

    def test_conjugation_exact_and_injective_on_thin_slits(self):
        report = run_invariant_suite(continuation_solve(IntervalPair(1.01, 1.10)), SMALL_MAPS)
        by_name = {c.name: c for c in report.checks}
        assert by_name["conjugation_symmetry"].worst_residual == 0.0
        assert by_name["injectivity"].passed
        assert by_name["injectivity"].worst_residual == 0.0

    @pytest.mark.parametrize("lam,mu", [(1.01, 1.10), (1.50, 5.00), (10.0, 100.0), (50.0, 100.0)])
    def test_table_rows(self, lam, mu):
        report = run_invariant_suite(continuation_solve(IntervalPair(lam, mu)), SMALL_MAPS)
        assert report.all_passed, [(c.name, c.worst_residual) for c in report.failed()]


class TestTableReproduction:
    def test_every_row_within_tolerance(self):
        pairs = reproduce_table1()
        assert len(pairs) == 36
        assert max_deviation(pairs) <= TABLE_TOLERANCE
        for computed, golden in pairs:
            assert (computed.lam, computed.mu) == (golden.lam, golden.mu)

    def test_parallel_matches_serial(self, tmp_path):
        rows = [
            "1.50 5.00 -1.50111605 -0.49858460 0.93306652 1.06663413",
            "2.00 5.00 -1.47250352 -0.52657019 0.87477665 1.12429705",
            "50.00 100.00 -1.85498816 -0.06912394 0.44519539 1.47891671",
        ]
        path = _write_table(tmp_path / "t.yaml", rows)
        serial = reproduce_table1(path=path)
        parallel = reproduce_table1(jobs=2, path=path)
        assert [c for c, _ in parallel] == [c for c, _ in serial]

    def test_max_deviation_empty(self):
        assert max_deviation([]) == 0.0

    def test_verify_table_subset(self, tmp_path):
        rows = ["2.00 5.00 -1.47250352 -0.52657019 0.87477665 1.12429705"]
        path = _write_table(tmp_path / "t.yaml", rows)
        results = verify_table1(maps_cfg=SMALL_MAPS, path=path)
        assert len(results) == 1
        golden, report = results[0]
        assert golden.lam == 2.0
        assert report.all_passed
