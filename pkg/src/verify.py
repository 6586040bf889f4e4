"""Invariant suite and reproduction of the published table.

Each check is registered with its own tolerance and returns the worst
residual it saw; the suite never raises, a check that errors out is
reported as failed with an infinite residual.
"""

import hashlib
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import yaml

from src.exceptions import ConfigError, SurfaceError
from src.maps import (
    CUT_SHEETS,
    cubic_coeffs,
    eval_G,
    eval_H,
    eval_H_prime,
    extract_laurent,
    invert_G,
    mobius_constant,
    preimages,
    psi_from_root,
    symmetric_cubic_coeffs,
    trace_branch_curves,
    winding_number,
)
from src.models import (
    SHEETS,
    BranchRegions,
    CheckResult,
    IntervalPair,
    MapsConfig,
    OracleConfig,
    SolverConfig,
    SurfacePoint,
    SurfaceSolution,
    Table1Row,
    VerificationReport,
)
from src.solver import (
    continuation_solve,
    forward_jacobian,
    forward_jacobian_det,
    oracle_solve,
    residual_norm,
    solve_symmetric,
    uv_identities,
    uv_map,
)
from src.surface import assemble_solution, lemma_condition, w_function

logger = logging.getLogger(__name__)

DEFAULT_TABLE_PATH = Path(__file__).parent.parent / "config" / "table1.yaml"
TABLE_TOLERANCE = 5e-7
ORACLE_TOLERANCE = 1e-8
SUITE_SEED = 20240917


@dataclass(frozen=True)
class _Check:
    name: str
    tolerance: float
    func: Callable[["_SuiteContext"], float]
    symmetric_only: bool = False


_CHECKS: list[_Check] = []


def _register(name: str, tolerance: float, symmetric_only: bool = False):
    def decorator(func):
        _CHECKS.append(_Check(name, tolerance, func, symmetric_only))
        return func

    return decorator


def registered_checks(symmetric: bool = False) -> list[str]:
    """Names of the checks run for a (non-)symmetric solution, in run order."""
    return [c.name for c in _CHECKS if symmetric or not c.symmetric_only]


class _SuiteContext:
    def __init__(self, sol: SurfaceSolution, cfg: MapsConfig):
        self.sol = sol
        self.cfg = cfg

    @cached_property
    def regions(self) -> BranchRegions:
        return trace_branch_curves(self.sol, self.cfg.curve_resolution)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(SUITE_SEED)

    def complex_samples(self, n: int) -> np.ndarray:
        """Points with |Im w| >= 0.05 spread over a box around both slits."""
        lam, mu = self.sol.intervals.lam, self.sol.intervals.mu
        rng = self.rng()
        re = rng.uniform(-2.0 * mu, 2.0 * lam, n)
        im = rng.uniform(0.05, lam + mu, n) * rng.choice([-1.0, 1.0], n)
        return re + 1j * im

    def thin_samples(self, n: int) -> np.ndarray:
        """Like complex_samples, with |Im w| log-uniform down to 1e-6 so points hug the real axis."""
        lam, mu = self.sol.intervals.lam, self.sol.intervals.mu
        rng = self.rng()
        re = rng.uniform(-2.0 * mu, 2.0 * lam, n)
        im = 10.0 ** rng.uniform(-6.0, np.log10(lam + mu), n) * rng.choice([-1.0, 1.0], n)
        return re + 1j * im

    def real_samples(self, n: int) -> np.ndarray:
        """Real points off both slits: left of -mu, in (-1, 1) and right of lambda."""
        lam, mu = self.sol.intervals.lam, self.sol.intervals.mu
        spread = np.linspace(0.01, 2.0, n)
        inner = np.linspace(-1.0, 1.0, n + 2)[1:-1] * 0.99
        return np.concatenate((-mu * (1.0 + spread), inner, lam * (1.0 + spread)))


def _triangle_samples(rng: np.random.Generator, n: int, margin: float = 0.02) -> np.ndarray:
    """n points (alpha, a) with -1 + margin <= alpha, alpha + margin <= a <= 1 - margin."""
    found = []
    while len(found) < n:
        pair = np.sort(rng.uniform(-1.0 + margin, 1.0 - margin, 2))
        if pair[1] - pair[0] >= margin:
            found.append(pair)
    return np.array(found)


def _pole_scale(value: complex, z: complex) -> float:
    """Size of a quantity computed from a root z, widened near the poles ±1.

    There the root is only known to an ulp while the value grows like
    1/|1 - z²|.
    """
    gap = abs(1 - z * z)
    if gap == 0.0:
        return math.inf
    return max(1.0, abs(value)) * max(1.0, 1.0 / gap)


# Closed-form identities


@_register("ordering", 0.0)
def _check_ordering(ctx: _SuiteContext) -> float:
    return 0.0 if ctx.sol.crit.is_ordered() else 1.0


@_register("coefficient_signs", 0.0)
def _check_coefficient_signs(ctx: _SuiteContext) -> float:
    c = ctx.sol.coeffs
    return float(sum((c.A >= 0.0, c.B >= 0.0, c.H_at_a <= 0.0)))


@_register("vieta_sum", 1e-12)
def _check_vieta_sum(ctx: _SuiteContext) -> float:
    return abs(sum(ctx.sol.crit.as_tuple()))


@_register("vieta_pairs", 1e-11)
def _check_vieta_pairs(ctx: _SuiteContext) -> float:
    c = ctx.sol.coeffs
    pairs = [x * y for x, y in itertools.combinations(ctx.sol.crit.as_tuple(), 2)]
    scale = sum(abs(p) for p in pairs) + abs(c.A) + abs(c.B) + 2.0
    return abs(math.fsum(pairs) - (c.A + c.B - 2.0)) / scale


@_register("vieta_triples", 1e-11)
def _check_vieta_triples(ctx: _SuiteContext) -> float:
    c = ctx.sol.coeffs
    triples = [x * y * z for x, y, z in itertools.combinations(ctx.sol.crit.as_tuple(), 3)]
    scale = sum(abs(t) for t in triples) + 2.0 * (abs(c.A) + abs(c.B))
    return abs(-math.fsum(triples) - (2.0 * c.A - 2.0 * c.B)) / scale


@_register("vieta_product", 1e-11)
def _check_vieta_product(ctx: _SuiteContext) -> float:
    c = ctx.sol.coeffs
    product = math.prod(ctx.sol.crit.as_tuple())
    return abs(product - (1.0 + c.A + c.B)) / (abs(product) + 1.0 + abs(c.A) + abs(c.B))


@_register("beta_b_identity", 1e-12)
def _check_beta_b(ctx: _SuiteContext) -> float:
    beta, alpha, a, b = ctx.sol.crit.as_tuple()
    q = (a - alpha) ** 2 / (1.0 - a * alpha) - 3.0
    return abs(beta * b - q) / max(1.0, abs(q))


@_register("h_identity", 1e-12)
def _check_h(ctx: _SuiteContext) -> float:
    beta, alpha, a, b = ctx.sol.crit.as_tuple()
    four_h = 4.0 * ctx.sol.coeffs.h
    other = (a + alpha) * (2.0 * a * alpha - 3.0 - beta * b)
    return abs(four_h - other) / max(1.0, abs(four_h))


@_register("h_at_a_identity", 1e-10)
def _check_h_at_a(ctx: _SuiteContext) -> float:
    c = ctx.sol.coeffs
    a = ctx.sol.crit.a
    scale = abs(c.h) + abs(a) + abs(c.A * a / (1.0 - a)) + abs(c.B * a / (1.0 + a))
    return abs(eval_H(ctx.sol, a) - c.H_at_a) / max(abs(c.H_at_a), scale)


@_register("lemma_condition", 0.0)
def _check_lemma(ctx: _SuiteContext) -> float:
    lhs, rhs = lemma_condition(ctx.sol.crit.alpha, ctx.sol.crit.a)
    return max(0.0, lhs - rhs)


@_register("w_below_two", 1e-12)
def _check_w_below_two(ctx: _SuiteContext) -> float:
    points = [(ctx.sol.crit.alpha, ctx.sol.crit.a)]
    points.extend(map(tuple, _triangle_samples(ctx.rng(), 200)))
    worst = 0.0
    for alpha, a in points:
        W, gap = w_function(alpha, a)
        if W >= 2.0 or gap <= 0.0:
            return math.inf
        worst = max(worst, abs((2.0 - W) - gap))
    return worst


# Derivative of H and critical values of G


@_register("h_prime_forms", 1e-11)
def _check_h_prime_forms(ctx: _SuiteContext) -> float:
    rng = ctx.rng()
    c = ctx.sol.coeffs
    samples = rng.uniform(-3.0, 3.0, 64) + 1j * rng.uniform(-3.0, 3.0, 64)
    samples = np.concatenate((samples, rng.uniform(-3.0, 3.0, 32)))
    worst = 0.0
    for z in samples:
        if abs(z - 1) < 1e-3 or abs(z + 1) < 1e-3:
            continue
        scale = 1.0 + abs(c.A) / abs(z - 1) ** 2 + abs(c.B) / abs(z + 1) ** 2
        diff = eval_H_prime(ctx.sol, z) - eval_H_prime(ctx.sol, z, form="factored")
        worst = max(worst, abs(diff) / scale)
    return worst


@_register("h_prime_at_critical_points", 1e-11)
def _check_h_prime_critical(ctx: _SuiteContext) -> float:
    c = ctx.sol.coeffs
    worst = 0.0
    for x in ctx.sol.crit.as_tuple():
        scale = 1.0 + abs(c.A) / (x - 1.0) ** 2 + abs(c.B) / (x + 1.0) ** 2
        worst = max(worst, abs(eval_H_prime(ctx.sol, x)) / scale)
    return worst


@_register("critical_values", 1e-9)
def _check_critical_values(ctx: _SuiteContext) -> float:
    beta, alpha, a, b = ctx.sol.crit.as_tuple()
    lam, mu = ctx.sol.intervals.lam, ctx.sol.intervals.mu
    expected = ((beta, -mu), (alpha, -1.0), (a, 1.0), (b, lam))
    return max(abs(eval_G(ctx.sol, x) - t) / max(1.0, abs(t)) for x, t in expected)


@_register("monotonicity", 0.0)
def _check_monotonicity(ctx: _SuiteContext) -> float:
    beta, alpha, a, b = ctx.sol.crit.as_tuple()
    n = 50
    fractions = (np.arange(n) + 0.5) / n
    tails = np.geomspace(0.01, 100.0, n)
    pieces = [
        (beta - (abs(beta) + 1.0) * tails, 1.0),
        (beta + (-1.0 - beta) * fractions, -1.0),
        (-1.0 + (alpha + 1.0) * fractions, -1.0),
        (alpha + (a - alpha) * fractions, 1.0),
        (a + (1.0 - a) * fractions, -1.0),
        (1.0 + (b - 1.0) * fractions, -1.0),
        (b + (b + 1.0) * tails, 1.0),
    ]
    violations = 0
    for xs, sign in pieces:
        for x in xs:
            if sign * eval_H_prime(ctx.sol, float(x)) <= 0.0:
                violations += 1
    return float(violations)


# Solver-side identities


@_register("syst_residual", 1e-11)
def _check_syst_residual(ctx: _SuiteContext) -> float:
    return residual_norm(ctx.sol.crit.alpha, ctx.sol.crit.a, ctx.sol.intervals)


@_register("uv_identities", 1e-10)
def _check_uv(ctx: _SuiteContext) -> float:
    alpha, a = ctx.sol.crit.alpha, ctx.sol.crit.a
    uv = uv_map(alpha, a)
    minus, plus = uv_identities(alpha, a)
    if minus < 0.0 or plus < 0.0:
        return math.inf
    worst = 0.0
    for closed, square in ((minus, (2.0 - uv.u) ** 2), (plus, (2.0 + uv.u) ** 2)):
        worst = max(worst, abs(closed - (uv.v - square)) / (uv.v + square))
    return worst


@_register("jacobian_determinant", 1e-5)
def _check_jacobian(ctx: _SuiteContext) -> float:
    points = [(ctx.sol.crit.alpha, ctx.sol.crit.a)]
    points.extend(map(tuple, _triangle_samples(ctx.rng(), 20)))
    worst = 0.0
    for alpha, a in points:
        numeric = float(np.linalg.det(forward_jacobian(alpha, a)))
        analytic = forward_jacobian_det(alpha, a)
        if numeric >= 0.0 or analytic >= 0.0:
            return math.inf
        worst = max(worst, abs(numeric - analytic) / abs(analytic))
    return worst


# Inverse branches and the conformal maps


@_register("branch_curves", 0.0)
def _check_branch_curves(ctx: _SuiteContext) -> float:
    regions = ctx.regions
    return float(
        abs(abs(winding_number(-1.0, regions.curve0)) - 1)
        + abs(abs(winding_number(1.0, regions.curve2)) - 1)
        + abs(winding_number(1.0, regions.curve0))
        + abs(winding_number(-1.0, regions.curve2))
    )


@_register("round_trip", 1e-10)
def _check_round_trip(ctx: _SuiteContext) -> float:
    worst = 0.0
    samples = np.concatenate((ctx.complex_samples(1000), ctx.real_samples(30)))
    for w in samples:
        roots = preimages(ctx.sol, w, regions=ctx.regions)
        zs = [roots[s].z for s in SHEETS]
        if min(abs(x - y) for x, y in itertools.combinations(zs, 2)) == 0.0:
            return math.inf
        for z in zs:
            worst = max(worst, abs(eval_G(ctx.sol, z) - w) / _pole_scale(w, z))
    return worst


@_register("injectivity", 0.0)
def _check_injectivity(ctx: _SuiteContext) -> float:
    """Coincident images among 500 distinct random surface points."""
    sheets = ctx.rng().integers(0, 3, 500)
    images = np.array([
        invert_G(ctx.sol, SurfacePoint(w, int(sheet)), regions=ctx.regions)
        for w, sheet in zip(ctx.complex_samples(500), sheets)
    ])
    gaps = np.abs(images[:, None] - images[None, :])
    upper = np.triu_indices(len(images), k=1)
    return float(np.count_nonzero(gaps[upper] == 0.0))


@_register("real_sheet_table", 0.0)
def _check_real_sheet_table(ctx: _SuiteContext) -> float:
    beta, alpha, a, b = ctx.sol.crit.as_tuple()
    violations = 0
    for x in ctx.real_samples(30):
        roots = preimages(ctx.sol, float(x))
        z0, z1, z2 = (roots[s].z for s in SHEETS)
        if any(z.imag != 0.0 for z in (z0, z1, z2)):
            violations += 1
            continue
        violations += not beta < z0.real < alpha
        violations += not a < z2.real < b
        violations += beta <= z1.real <= alpha or a <= z1.real <= b
    return float(violations)


@_register("conjugation_symmetry", 1e-11)
def _check_conjugation(ctx: _SuiteContext) -> float:
    worst = 0.0
    for w in ctx.thin_samples(1000):
        roots = preimages(ctx.sol, w, regions=ctx.regions)
        mirrored = preimages(ctx.sol, w.conjugate(), regions=ctx.regions)
        for sheet in SHEETS:
            z, zc = roots[sheet].z, mirrored[sheet].z
            for which in (1, 2):
                value = psi_from_root(ctx.sol, which, z)
                other = psi_from_root(ctx.sol, which, zc)
                worst = max(worst, abs(other - value.conjugate()) / max(1.0, abs(value)))
    return worst


@_register("real_branches", 1e-10)
def _check_real_branches(ctx: _SuiteContext) -> float:
    lam, mu = ctx.sol.intervals.lam, ctx.sol.intervals.mu
    points = [SurfacePoint(float(x), s) for x in ctx.real_samples(30) for s in SHEETS]
    # A slit is an ordinary real segment for the sheet it does not glue.
    fractions = (np.arange(10) + 0.5) / 10
    points += [SurfacePoint(float(-mu + (mu - 1.0) * f), 2) for f in fractions]
    points += [SurfacePoint(float(1.0 + (lam - 1.0) * f), 0) for f in fractions]

    worst = 0.0
    for p in points:
        z = invert_G(ctx.sol, p, regions=ctx.regions)
        for which in (1, 2):
            value = psi_from_root(ctx.sol, which, z)
            worst = max(worst, abs(value.imag) / _pole_scale(value, z))
    return worst


@_register("bank_matching", 1e-8)
def _check_bank_matching(ctx: _SuiteContext) -> float:
    lam, mu = ctx.sol.intervals.lam, ctx.sol.intervals.mu
    fractions = (np.arange(25) + 0.5) / 25
    cuts = ((-mu, -1.0, CUT_SHEETS[1][0]), (1.0, lam, CUT_SHEETS[2][1]))

    def value(t, sheet, bank, which):
        z = invert_G(ctx.sol, SurfacePoint(t, sheet, bank), regions=ctx.regions)
        return psi_from_root(ctx.sol, which, z), z

    worst = 0.0
    for left, right, neighbour in cuts:
        for f in fractions:
            t = float(left + (right - left) * f)
            for which in (1, 2):
                up, z = value(t, 1, "upper", which)
                low, _ = value(t, 1, "lower", which)
                up_n, _ = value(t, neighbour, "upper", which)
                low_n, _ = value(t, neighbour, "lower", which)
                diff = max(
                    abs(up - low.conjugate()),
                    abs(up - up_n.conjugate()),
                    abs(up - low_n),
                )
                worst = max(worst, diff / _pole_scale(up, z))
    return worst


@_register("mobius_relation", 1e-8)
def _check_mobius(ctx: _SuiteContext) -> float:
    sol = ctx.sol
    lam, mu = sol.intervals.lam, sol.intervals.mu
    at_inf2 = psi_from_root(sol, 1, complex(1.0))

    def pair(w, sheet):
        z = invert_G(sol, SurfacePoint(w, sheet), regions=ctx.regions)
        return psi_from_root(sol, 1, z), psi_from_root(sol, 2, z), z

    p1, p2, _ = pair(complex(0.5 * lam, 0.5 * (lam + mu)), 1)
    fitted = p2 * (p1 - at_inf2) / p1
    constant = mobius_constant(sol)
    worst = abs(fitted - constant) / abs(constant)

    sheets = ctx.rng().integers(0, 3, 100)
    for w, sheet in zip(ctx.complex_samples(100), sheets):
        p1, p2, z = pair(w, int(sheet))
        predicted = fitted * p1 / (p1 - at_inf2)
        worst = max(worst, abs(p2 - predicted) / _pole_scale(p2, z))
    return worst


@_register("laurent_normalization", 1e-6)
def _check_laurent(ctx: _SuiteContext) -> float:
    sol = ctx.sol
    head1 = extract_laurent(sol, 1, SurfacePoint.infinity(1), k=2, cfg=ctx.cfg, regions=ctx.regions)
    head2 = extract_laurent(sol, 2, SurfacePoint.infinity(2), k=2, cfg=ctx.cfg, regions=ctx.regions)
    zero_sheet = invert_G(sol, SurfacePoint.infinity(0))
    return max(
        abs(head1.coeffs[0] - 1.0),
        abs(head2.coeffs[0] - 1.0),
        abs(psi_from_root(sol, 1, zero_sheet)),
        abs(psi_from_root(sol, 2, zero_sheet)),
    )


# Symmetric case lambda = mu


@_register("symmetric_reduction", 1e-12, symmetric_only=True)
def _check_symmetric_reduction(ctx: _SuiteContext) -> float:
    beta, alpha, a, b = ctx.sol.crit.as_tuple()
    c = ctx.sol.coeffs
    return max(
        abs(c.h),
        abs(alpha + a),
        abs(beta + b),
        abs(c.A - c.B) / abs(c.A),
        abs(a - solve_symmetric(ctx.sol.intervals.lam)),
    )


@_register("symmetric_closed_forms", 1e-12, symmetric_only=True)
def _check_symmetric_closed_forms(ctx: _SuiteContext) -> float:
    sol = ctx.sol
    a = sol.crit.a
    a2 = a * a
    rng = ctx.rng()
    worst = 0.0
    for z in rng.uniform(-3.0, 3.0, 32) + 1j * rng.uniform(-3.0, 3.0, 32):
        tail = (1.0 - a2) ** 2 * z / ((1.0 + a2) * (1.0 - z * z))
        worst = max(worst, abs(eval_H(sol, z) - (z - tail)) / (abs(z) + abs(tail)))
    for w in ctx.complex_samples(32):
        general = cubic_coeffs(sol, w)
        reduced = symmetric_cubic_coeffs(a, w)
        for g, r in zip(general, reduced):
            worst = max(worst, abs(g - r) / max(1.0, abs(r)))
    return worst


@_register("symmetric_curves", 1e-9, symmetric_only=True)
def _check_symmetric_curves(ctx: _SuiteContext) -> float:
    curve0, curve2 = ctx.regions.curve0, ctx.regions.curve2
    distance = np.abs(curve2[:, None] + curve0[None, :]).min(axis=1)
    return float(distance.max())


def run_invariant_suite(
    sol: SurfaceSolution, cfg: Optional[MapsConfig] = None
) -> VerificationReport:
    """Run every registered check against ``sol``; failures are reported, not raised.

    Sampling is seeded, so two runs on the same solution give identical reports.
    """
    ctx = _SuiteContext(sol, cfg or MapsConfig())
    report = VerificationReport()
    for check in _CHECKS:
        if check.symmetric_only and not sol.intervals.is_symmetric:
            continue
        try:
            worst = float(check.func(ctx))
        except (SurfaceError, ArithmeticError) as e:
            logger.warning("Check %s raised %s: %s", check.name, type(e).__name__, e)
            worst = math.inf
        passed = worst <= check.tolerance
        report.checks.append(CheckResult(check.name, passed, worst, check.tolerance))
        logger.debug(
            "Check %s: worst=%.3e tol=%.1e %s",
            check.name, worst, check.tolerance, "ok" if passed else "FAILED",
        )

    if report.all_passed:
        logger.info("All %d checks passed for lambda=%s mu=%s",
                    len(report.checks), sol.intervals.lam, sol.intervals.mu)
    else:
        logger.info("Failed checks for lambda=%s mu=%s: %s", sol.intervals.lam,
                    sol.intervals.mu, ", ".join(c.name for c in report.failed()))
    return report


def perturbed_solution(sol: SurfaceSolution, delta: float) -> SurfaceSolution:
    """The same intervals re-assembled around a shifted by ``delta``; for negative testing."""
    return assemble_solution(sol.intervals, sol.chart, sol.crit.alpha, sol.crit.a + delta)


def oracle_deviation(sol: SurfaceSolution, cfg: Optional[OracleConfig] = None) -> float:
    """Largest componentwise gap between the solved (alpha, a) and the grid-search oracle."""
    alpha, a = oracle_solve(sol.intervals, cfg)
    deviation = max(abs(alpha - sol.crit.alpha), abs(a - sol.crit.a))
    logger.info(
        "Oracle for lambda=%s mu=%s: alpha=%.12g a=%.12g deviation=%.3e",
        sol.intervals.lam, sol.intervals.mu, alpha, a, deviation,
    )
    return deviation


def load_table1(path: Optional[Path] = None) -> list[Table1Row]:
    """Load the golden table and check its sha256 over the newline-joined row strings.

    Raises:
        ConfigError: missing file, invalid YAML, checksum mismatch or a malformed row.
    """
    if path is None:
        path = DEFAULT_TABLE_PATH
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f"Golden table not found: {path}")
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {path}: {e}")

    if not isinstance(data, dict) or not isinstance(data.get("rows"), list):
        raise ConfigError(f"Golden table {path} must map 'rows' to a list")

    lines = [str(r) for r in data["rows"]]
    digest = hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()
    if digest != data.get("sha256"):
        raise ConfigError(f"Golden table {path} failed its checksum: got {digest}")

    rows = []
    for i, line in enumerate(lines, 1):
        parts = line.split()
        if len(parts) != 6:
            raise ConfigError(f"Golden table row {i} needs 6 values, got {line!r}")
        try:
            rows.append(Table1Row(*(float(x) for x in parts)))
        except ValueError as e:
            raise ConfigError(f"Golden table row {i} is not numeric: {e}")
    logger.debug("Loaded %d golden rows from %s", len(rows), path)
    return rows


def solve_row(golden: Table1Row, cfg: Optional[SolverConfig] = None) -> Table1Row:
    """Solve for the (lambda, mu) of a golden row; the result carries the computed values."""
    sol = continuation_solve(IntervalPair(golden.lam, golden.mu), cfg)
    return Table1Row(golden.lam, golden.mu, *sol.crit.as_tuple())


def _verify_row(
    golden: Table1Row, solver_cfg: Optional[SolverConfig], maps_cfg: Optional[MapsConfig]
) -> VerificationReport:
    sol = continuation_solve(IntervalPair(golden.lam, golden.mu), solver_cfg)
    return run_invariant_suite(sol, maps_cfg)


def _map_rows(func, rows: list[Table1Row], jobs: int, *args) -> list:
    if jobs <= 1:
        return [func(row, *args) for row in rows]
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(func, rows, *(itertools.repeat(x) for x in args)))


def reproduce_table1(
    cfg: Optional[SolverConfig] = None, jobs: int = 1, path: Optional[Path] = None
) -> list[tuple[Table1Row, Table1Row]]:
    """(computed, golden) for every row of the golden table.

    Rows are solved in up to ``jobs`` worker processes; a solver failure
    propagates with the offending target attached.
    """
    golden = load_table1(path)
    computed = _map_rows(solve_row, golden, jobs, cfg)
    pairs = list(zip(computed, golden))
    logger.info("Reproduced %d rows, max deviation %.3e", len(pairs), max_deviation(pairs))
    return pairs


def verify_table1(
    solver_cfg: Optional[SolverConfig] = None,
    maps_cfg: Optional[MapsConfig] = None,
    jobs: int = 1,
    path: Optional[Path] = None,
) -> list[tuple[Table1Row, VerificationReport]]:
    """Solve every golden row and run the invariant suite on each."""
    golden = load_table1(path)
    reports = _map_rows(_verify_row, golden, jobs, solver_cfg, maps_cfg)
    return list(zip(golden, reports))


def max_deviation(pairs: list[tuple[Table1Row, Table1Row]]) -> float:
    return max((computed.deviation(golden) for computed, golden in pairs), default=0.0)
