"""Surface geometry: interval normalization and the closed-form map coefficients."""

import logging
import math

from src.exceptions import (
    DegenerateIntervalsError,
    GeometryError,
    InconsistentCoefficientsError,
)
from src.models import (
    AffineChart,
    CriticalPoints,
    IntervalPair,
    MapCoefficients,
    SurfaceSolution,
)
from src.numerics import solve_quadratic

logger = logging.getLogger(__name__)

H_AT_A_TOL = 1e-10


def normalize_intervals(
    d1_left: float, d1_right: float, d2_left: float, d2_right: float
) -> tuple[IntervalPair, AffineChart]:
    """Map two ordered disjoint intervals onto [-mu, -1] and [1, lambda].

    The inner endpoints go to -1 and 1, so the chart sends the midpoint
    of the gap to 0 and the half-gap to 1.
    """
    ends = (d1_left, d1_right, d2_left, d2_right)
    if not all(math.isfinite(x) for x in ends):
        raise DegenerateIntervalsError(f"Interval endpoints must be finite, got {ends}")
    if not d1_left < d1_right < d2_left < d2_right:
        raise DegenerateIntervalsError(
            f"Intervals [{d1_left}, {d1_right}] and [{d2_left}, {d2_right}] "
            "must be nondegenerate, disjoint and ordered left to right"
        )

    scale = (d2_left - d1_right) / 2.0
    shift = (d2_left + d1_right) / 2.0
    mu = (shift - d1_left) / scale
    lam = (d2_right - shift) / scale
    try:
        intervals = IntervalPair(lam, mu)
    except GeometryError as e:
        raise DegenerateIntervalsError(f"Intervals too thin to normalize: {e}") from e

    return intervals, AffineChart(scale, shift)


def _check_triangle(alpha: float, a: float) -> None:
    if not -1.0 < alpha < a < 1.0:
        raise GeometryError(f"(alpha, a) = ({alpha!r}, {a!r}) is outside -1 < alpha < a < 1")


def derive_critical_points(alpha: float, a: float) -> CriticalPoints:
    """Complete (alpha, a) with beta < b, the roots of x² + (a+α)x + (a-α)²/(1-aα) - 3."""
    _check_triangle(alpha, a)
    roots = solve_quadratic(a + alpha, (a - alpha) ** 2 / (1.0 - a * alpha) - 3.0)
    crit = CriticalPoints(beta=roots.x_minus, alpha=alpha, a=a, b=roots.x_plus)
    if not crit.is_ordered():
        raise GeometryError(f"Critical points lost their ordering in floating point: {crit}")
    return crit


def derive_coefficients(crit: CriticalPoints) -> MapCoefficients:
    """h, A, B and H(a) from the four critical points.

    A and B come out negative; they are the coefficients making
    H'(z) = 1 + A/(z-1)² + B/(z+1)² vanish at beta, alpha, a and b.

    Raises:
        InconsistentCoefficientsError: the closed form of H(a) disagrees with
            direct evaluation, which means (alpha, a) does not belong to beta, b.
    """
    beta, alpha, a, b = crit.as_tuple()
    one_minus = 1.0 - a * alpha

    h = 0.25 * (a + alpha) * (2.0 * a * alpha - (a - alpha) ** 2 / one_minus)
    A = 0.25 * (1.0 - beta) * (1.0 - alpha) * (1.0 - a) * (1.0 - b)
    B = 0.25 * (1.0 + beta) * (1.0 + alpha) * (1.0 + a) * (1.0 + b)
    H_at_a = (a - alpha) ** 3 / (4.0 * one_minus)

    terms = (h, a, A * a / (1.0 - a), B * a / (1.0 + a))
    direct = math.fsum(terms)
    scale = max(abs(H_at_a), sum(abs(t) for t in terms))
    if abs(direct - H_at_a) > H_AT_A_TOL * scale:
        raise InconsistentCoefficientsError(
            f"H(a) closed form {H_at_a!r} != direct evaluation {direct!r} "
            f"for critical points {crit.as_tuple()}"
        )

    return MapCoefficients(h=h, A=A, B=B, H_at_a=H_at_a)


def assemble_solution(
    intervals: IntervalPair, chart: AffineChart, alpha: float, a: float
) -> SurfaceSolution:
    """Package a solved (alpha, a) with everything derived from it."""
    crit = derive_critical_points(alpha, a)
    coeffs = derive_coefficients(crit)
    logger.debug(
        "Assembled surface for lambda=%s mu=%s: beta=%.12g alpha=%.12g a=%.12g b=%.12g",
        intervals.lam, intervals.mu, *crit.as_tuple(),
    )
    return SurfaceSolution(intervals=intervals, chart=chart, crit=crit, coeffs=coeffs)


def lemma_condition(alpha: float, a: float) -> tuple[float, float]:
    """(1 + |a+α|, 3 - (a-α)²/(1-aα)); beta < -1 and b > 1 iff the first is smaller."""
    return 1.0 + abs(a + alpha), 3.0 - (a - alpha) ** 2 / (1.0 - a * alpha)


def w_function(alpha: float, a: float) -> tuple[float, float]:
    """W(a, α) = a + α + (a-α)²/(1-aα) together with the factored value of 2 - W."""
    one_minus = 1.0 - a * alpha
    W = a + alpha + (a - alpha) ** 2 / one_minus
    gap = (1.0 - a) * (1.0 - alpha) * (2.0 + a + alpha) / one_minus
    return W, gap
