"""Solve the two-equation polynomial system for (alpha, a) given (lambda, mu).

The forward map F(alpha, a) = (lambda, mu) is a bijection of the open
triangle -1 < alpha < a < 1 onto lambda, mu > 1. Its inverse is computed by
Newton continuation from the symmetric case lambda = mu, where the problem
reduces to a biquartic in a.
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy.optimize import bisect

from src.exceptions import (
    GeometryError,
    LeftDomainError,
    NoConvergenceError,
    SingularJacobianError,
)
from src.models import (
    AffineChart,
    IntervalPair,
    OracleConfig,
    SolverConfig,
    SurfaceSolution,
    SystResidual,
    UVPoint,
)
from src.surface import assemble_solution

logger = logging.getLogger(__name__)

FD_REL_STEP = 1e-7
SINGULAR_RTOL = 1e-14


def _inside(alpha: float, a: float) -> bool:
    return -1.0 < alpha < a < 1.0


def _biquartic(t: float, lam: float) -> float:
    return ((t + (16.0 * lam * lam - 8.0)) * t + 18.0) * t * t - 27.0


def solve_symmetric(lam: float) -> float:
    """The a in (0, 1] solving the symmetric case lambda = mu.

    Bisection on t = a² of t⁴ + (16λ² - 8)t³ + 18t² - 27, which is negative
    at 0, positive at 1 for lambda > 1 and increasing in between.
    """
    if not lam >= 1.0 or not math.isfinite(lam):
        raise GeometryError(f"Symmetric case needs a finite lambda >= 1, got {lam!r}")
    if lam == 1.0:
        return 1.0

    t = bisect(
        _biquartic,
        0.0,
        1.0,
        args=(lam,),
        xtol=1e-300,
        rtol=4.0 * np.finfo(float).eps,
        maxiter=200,
    )
    return math.sqrt(t)


def _lam_mu(alpha, a):
    """Vectorized (lambda, mu) = F(alpha, a); no domain checks."""
    s = a + alpha
    d = a - alpha
    p = a * alpha
    u = -2.0 * s * (3.0 - p - s) * (3.0 - p + s) / d**3
    v = 4.0 * (3.0 + p) ** 3 * (1.0 - p) * (2.0 + s) * (2.0 - s) / d**6
    root_v = np.sqrt(v)
    return 0.5 * (u + root_v), 0.5 * (root_v - u)


def uv_map(alpha: float, a: float) -> UVPoint:
    """u = lambda - mu and v = (lambda + mu)² as closed forms in (alpha, a)."""
    s, d, p = a + alpha, a - alpha, a * alpha
    u = -2.0 * s * (3.0 - p - s) * (3.0 - p + s) / d**3
    v = 4.0 * (3.0 + p) ** 3 * (1.0 - p) * (2.0 + s) * (2.0 - s) / d**6
    return UVPoint(u=u, v=v)


def forward_map(alpha: float, a: float) -> IntervalPair:
    """(lambda, mu) of the surface whose critical points include alpha < a."""
    if not _inside(alpha, a):
        raise GeometryError(f"(alpha, a) = ({alpha!r}, {a!r}) is outside -1 < alpha < a < 1")
    lam, mu = _lam_mu(alpha, a)
    return IntervalPair(float(lam), float(mu))


def uv_identities(alpha: float, a: float) -> tuple[float, float]:
    """Closed forms of v - (2-u)² and v - (2+u)².

    These equal 4(λ-1)(μ+1) and 4(μ-1)(λ+1), so they vanish on the sides
    a = 1 and alpha = -1 of the triangle.
    """
    d6 = (a - alpha) ** 6
    minus = 16.0 * (a * a - 1.0) * (alpha * alpha + 2.0 * a * alpha - 3.0) ** 3 / d6
    plus = 16.0 * (alpha * alpha - 1.0) * (a * a + 2.0 * a * alpha - 3.0) ** 3 / d6
    return minus, plus


def _residual_terms(alpha: float, a: float, target: IntervalPair):
    s, d, p = a + alpha, a - alpha, a * alpha
    first = 2.0 * s * (3.0 - p - s) * (3.0 - p + s)
    d3 = d**3
    lhs2 = (target.lam + target.mu) ** 2 * d3 * d3
    rhs2 = 4.0 * (3.0 + p) ** 3 * (1.0 - p) * (2.0 + s) * (2.0 - s)
    r = SystResidual(
        r1=first + (target.lam - target.mu) * d3,
        r2=lhs2 - rhs2,
    )
    scales = (
        abs(first) + (abs(target.lam - target.mu) + target.lam + target.mu) * abs(d3),
        abs(lhs2) + abs(rhs2),
    )
    return r, scales


def syst_residual(alpha: float, a: float, target: IntervalPair) -> SystResidual:
    """Left sides of both equations (the second as left minus right) at (alpha, a)."""
    r, _ = _residual_terms(alpha, a, target)
    return r


def residual_norm(alpha: float, a: float, target: IntervalPair) -> float:
    """Dimensionless residual: each equation divided by the size of its own terms."""
    r, (m1, m2) = _residual_terms(alpha, a, target)
    return math.hypot(r.r1 / m1, r.r2 / m2)


def _newton_terms(alpha: float, a: float, target: IntervalPair) -> tuple[np.ndarray, np.ndarray]:
    """Residual and term sizes with the equations divided by (a-α)³ and (a-α)⁶.

    Same zero set; the Jacobian becomes -∂(u,v)/∂(alpha,a), which is
    nonsingular everywhere in the triangle.
    """
    r, (m1, m2) = _residual_terms(alpha, a, target)
    d3 = (a - alpha) ** 3
    factors = np.array([d3, d3 * d3])
    return np.array([r.r1, r.r2]) / factors, np.array([m1, m2]) / np.abs(factors)


def _fd_step(x: float) -> float:
    return max(FD_REL_STEP, FD_REL_STEP * abs(x))


def _fd_jacobian(func, alpha: float, a: float) -> np.ndarray:
    """Central differences of a 2-vector function; columns ordered (alpha, a)."""
    h_alpha, h_a = _fd_step(alpha), _fd_step(a)
    jac = np.empty((2, 2))
    jac[:, 0] = (func(alpha + h_alpha, a) - func(alpha - h_alpha, a)) / (2.0 * h_alpha)
    jac[:, 1] = (func(alpha, a + h_a) - func(alpha, a - h_a)) / (2.0 * h_a)
    return jac


def _check_singular(jac: np.ndarray, alpha: float, a: float) -> np.ndarray:
    det = np.linalg.det(jac)
    if not abs(det) >= SINGULAR_RTOL * float(np.sum(jac * jac)):
        raise SingularJacobianError(
            f"Jacobian singular at (alpha, a) = ({alpha!r}, {a!r}): det={det:.3e}"
        )
    return jac


def syst_jacobian(alpha: float, a: float, target: IntervalPair) -> np.ndarray:
    """Central-difference Jacobian of the residual; columns ordered (alpha, a).

    Raises:
        SingularJacobianError: |det| < 1e-14 * ||J||².
    """

    def residual(x_alpha, x_a):
        r = syst_residual(x_alpha, x_a, target)
        return np.array([r.r1, r.r2])

    return _check_singular(_fd_jacobian(residual, alpha, a), alpha, a)


def forward_jacobian(alpha: float, a: float) -> np.ndarray:
    """Central-difference Jacobian of F; rows (lambda, mu), columns (a, alpha)."""
    jac = _fd_jacobian(lambda x_alpha, x_a: np.array(_lam_mu(x_alpha, x_a)), alpha, a)
    return jac[:, ::-1]


def uv_jacobian_det(alpha: float, a: float) -> float:
    """Analytic det ∂(u,v)/∂(a,alpha) = -2⁷(a-α)⁻¹⁰(a²+2aα-3)²(3+aα)²(α²+2aα-3)²."""
    return (
        -128.0
        * (a * a + 2.0 * a * alpha - 3.0) ** 2
        * (3.0 + a * alpha) ** 2
        * (alpha * alpha + 2.0 * a * alpha - 3.0) ** 2
        / (a - alpha) ** 10
    )


def forward_jacobian_det(alpha: float, a: float) -> float:
    """Analytic det F' via the chain rule through (u, v); negative on the triangle."""
    return uv_jacobian_det(alpha, a) / (4.0 * math.sqrt(uv_map(alpha, a).v))


def newton_solve(
    target: IntervalPair, start: tuple[float, float], cfg: SolverConfig
) -> tuple[float, float]:
    """Damped Newton for ``target`` from ``start = (alpha, a)``.

    Works on the system divided by (a-α)³ and (a-α)⁶. Each step is halved
    until the iterate is inside the triangle and the residual, weighted at
    the current iterate, decreases. Once the dimensionless residual is
    below sigma one more full step is tried and kept if it does not hurt.

    Raises:
        LeftDomainError: no damped step stayed inside the triangle.
        NoConvergenceError: no descent, or iteration cap reached.
    """
    alpha, a = start
    if not _inside(alpha, a):
        raise GeometryError(f"Newton start ({alpha!r}, {a!r}) is outside the triangle")

    def residual(x_alpha, x_a):
        return _newton_terms(x_alpha, x_a, target)[0]

    for iteration in range(cfg.max_newton_iters):
        r, weights = _newton_terms(alpha, a, target)
        merit = float(np.linalg.norm(r / weights))
        logger.debug(
            "Newton iter %d: alpha=%.15g a=%.15g residual=%.3e", iteration, alpha, a, merit
        )

        jac = _check_singular(_fd_jacobian(residual, alpha, a), alpha, a)
        step = np.linalg.solve(jac, -r)

        if merit < cfg.sigma:
            cand_alpha, cand_a = alpha + step[0], a + step[1]
            if _inside(cand_alpha, cand_a):
                rc = residual(cand_alpha, cand_a)
                if np.linalg.norm(rc / weights) <= merit:
                    alpha, a = cand_alpha, cand_a
            return alpha, a

        t = 1.0
        seen_inside = False
        for _ in range(cfg.max_backtracks):
            cand_alpha, cand_a = alpha + t * step[0], a + t * step[1]
            if _inside(cand_alpha, cand_a):
                seen_inside = True
                rc = residual(cand_alpha, cand_a)
                if np.linalg.norm(rc / weights) < merit:
                    alpha, a = cand_alpha, cand_a
                    break
            t *= cfg.damping
        else:
            if not seen_inside:
                raise LeftDomainError(
                    f"Newton steps left the triangle from ({alpha!r}, {a!r}) "
                    f"for target lambda={target.lam}, mu={target.mu}",
                    target=target,
                )
            raise NoConvergenceError(
                f"Newton found no descent from ({alpha!r}, {a!r}) at residual {merit:.3e}",
                target=target,
            )

    raise NoConvergenceError(
        f"Newton did not reach sigma={cfg.sigma} in {cfg.max_newton_iters} iterations "
        f"for target lambda={target.lam}, mu={target.mu}",
        target=target,
    )


def continuation_solve(
    target: IntervalPair,
    cfg: Optional[SolverConfig] = None,
    chart: Optional[AffineChart] = None,
) -> SurfaceSolution:
    """Solve for ``target`` by walking from the symmetric surface with the same lambda + mu.

    Steps L_k = ((n-k)L_0 + k L_*)/n, k = 1..n, each Newton solve seeded with
    the previous result.

    Raises:
        NoConvergenceError: carries the failing step index in ``step``.
    """
    cfg = cfg or SolverConfig()
    chart = chart or AffineChart()

    lam0 = 0.5 * (target.lam + target.mu)
    a0 = solve_symmetric(lam0)
    alpha, a = -a0, a0
    logger.debug("Symmetric anchor lambda=mu=%.15g: a0=%.15g", lam0, a0)

    if target.is_symmetric:
        alpha, a = newton_solve(target, (alpha, a), cfg)
    else:
        n = cfg.n_steps
        for k in range(1, n + 1):
            step_target = IntervalPair(
                ((n - k) * lam0 + k * target.lam) / n,
                ((n - k) * lam0 + k * target.mu) / n,
            )
            try:
                alpha, a = newton_solve(step_target, (alpha, a), cfg)
            except NoConvergenceError as e:
                raise type(e)(
                    f"Continuation failed at step {k}/{n} towards lambda={target.lam}, "
                    f"mu={target.mu}: {e}",
                    step=k,
                    target=target,
                ) from e
            logger.debug("Continuation step %d/%d: alpha=%.15g a=%.15g", k, n, alpha, a)

    logger.info("Solved lambda=%s mu=%s: alpha=%.12g a=%.12g", target.lam, target.mu, alpha, a)
    return assemble_solution(target, chart, alpha, a)


def _oracle_objective(alpha: np.ndarray, a: np.ndarray, target: IntervalPair) -> np.ndarray:
    with np.errstate(all="ignore"):
        lam, mu = _lam_mu(alpha, a)
        obj = ((lam - target.lam) / target.lam) ** 2 + ((mu - target.mu) / target.mu) ** 2
    valid = (alpha > -1.0) & (alpha < a) & (a < 1.0) & np.isfinite(obj)
    return np.where(valid, obj, np.inf)


def oracle_solve(
    target: IntervalPair, cfg: Optional[OracleConfig] = None
) -> tuple[float, float]:
    """Grid search with recursive zoom for (alpha, a); no derivatives, no Newton.

    Each level evaluates a grid_points² grid over the current box and
    recentres a box ``shrink`` times smaller on the best point. A best
    point on the edge of the box only recentres, without shrinking, so
    the search can walk along a narrow valley.
    """
    cfg = cfg or OracleConfig()
    last = cfg.grid_points - 1
    center = (0.0, 0.0)
    half = 1.0
    best = (0.0, 0.5)
    level = 0

    for _ in range(4 * (cfg.depth + 1)):
        alphas = np.linspace(center[0] - half, center[0] + half, cfg.grid_points)
        avals = np.linspace(center[1] - half, center[1] + half, cfg.grid_points)
        grid_alpha, grid_a = np.meshgrid(alphas, avals, indexing="ij")
        obj = _oracle_objective(grid_alpha, grid_a, target)
        i, j = np.unravel_index(np.argmin(obj), obj.shape)
        if not np.isfinite(obj[i, j]):
            break

        best = (float(grid_alpha[i, j]), float(grid_a[i, j]))
        center = best
        on_edge = level > 0 and (i in (0, last) or j in (0, last))
        logger.debug(
            "Oracle level %d: best=%s objective=%.3e edge=%s", level, best, obj[i, j], on_edge
        )
        if not on_edge:
            level += 1
            if level > cfg.depth:
                break
            half /= cfg.shrink

    return best
