"""Closed-form quadratic and cubic solvers with Newton polishing.

Pure functions with no knowledge of the surface; the cubic solver is the
hot path behind every G⁻¹ evaluation.
"""

import cmath
import logging
import math
from collections.abc import Sequence

import numpy as np

from src.exceptions import NegativeDiscriminantError, NoConvergenceError
from src.models import CubicRoots, QuadraticRoots

logger = logging.getLogger(__name__)

POLISH_TOL = 1e-13
POLISH_MAX_ITER = 8

_OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)


def solve_quadratic(p: float, q: float) -> QuadraticRoots:
    """Real roots of x² + px + q = 0.

    The larger-magnitude root is computed first and the other recovered
    from the product q, which avoids cancellation when p² ≫ 4|q|.
    """
    disc = p * p - 4.0 * q
    if disc < 0.0:
        raise NegativeDiscriminantError(
            f"x^2 + ({p!r})x + ({q!r}) has negative discriminant {disc!r}"
        )

    t = -0.5 * (p + math.copysign(math.sqrt(disc), p))
    if t == 0.0:
        return QuadraticRoots(0.0, 0.0)

    r1, r2 = t, q / t
    return QuadraticRoots(min(r1, r2), max(r1, r2))


def polish_root(
    poly_coeffs: Sequence[complex],
    z0: complex,
    tol: float = POLISH_TOL,
    max_iter: int = POLISH_MAX_ITER,
) -> complex:
    """Newton-refine a simple root of a polynomial (coefficients highest degree first).

    Stops once |p(z)| <= tol * sum(|c_k| |z|^k), the evaluation scale of p at z.
    A step that would increase the residual is rejected, so the returned
    residual never exceeds the starting one.

    Raises:
        NoConvergenceError: tolerance not met within ``max_iter`` steps,
            typically because the root is (nearly) multiple.
    """
    coeffs = np.asarray(poly_coeffs, dtype=complex)
    abs_coeffs = np.abs(coeffs)
    deriv = np.polyder(coeffs)

    def converged(z: complex, value: complex) -> bool:
        scale = float(np.polyval(abs_coeffs, abs(z)))
        return abs(value) <= tol * max(scale, np.finfo(float).tiny)

    z = complex(z0)
    value = complex(np.polyval(coeffs, z))
    for _ in range(max_iter):
        if converged(z, value):
            return z

        slope = complex(np.polyval(deriv, z))
        if slope == 0:
            break
        candidate = z - value / slope
        candidate_value = complex(np.polyval(coeffs, candidate))
        if abs(candidate_value) > abs(value):
            break
        z, value = candidate, candidate_value

    if converged(z, value):
        return z
    raise NoConvergenceError(f"Newton polish stalled at z={z!r} with residual {abs(value):.3e}")


def _polish_or_keep(coeffs: tuple, z: complex) -> complex:
    try:
        return polish_root(coeffs, z)
    except NoConvergenceError as e:
        logger.debug("Keeping unpolished root: %s", e)
        return z


def _depressed(c2: complex, c1: complex, c0: complex):
    """Shift z = y - c2/3 giving y³ + p y + q = 0."""
    shift = c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0
    return shift, p, q


def _real_cubic(c2: float, c1: float, c0: float) -> tuple[complex, complex, complex]:
    shift, p, q = _depressed(c2, c1, c0)
    disc = (0.5 * q) ** 2 + (p / 3.0) ** 3
    coeffs = (1.0, c2, c1, c0)

    if disc < 0.0:
        # Three distinct real roots: trigonometric form, no complex cube roots.
        r = math.sqrt(-p / 3.0)
        cos_arg = min(1.0, max(-1.0, -q / (2.0 * r * r * r)))
        phi = math.acos(cos_arg)
        roots = [
            2.0 * r * math.cos((phi - 2.0 * math.pi * k) / 3.0) - shift
            for k in range(3)
        ]
        roots = sorted(_polish_or_keep(coeffs, x).real for x in roots)
        return tuple(complex(x, 0.0) for x in roots)

    # One real root plus a conjugate pair (or a multiple real root).
    u = -float(np.cbrt(0.5 * q + math.copysign(math.sqrt(disc), q)))
    v = -p / (3.0 * u) if u != 0.0 else 0.0
    y1 = u + v
    real_root = _polish_or_keep(coeffs, y1 - shift).real

    pair_im = math.sqrt(max(0.0, 0.75 * y1 * y1 + p))
    if pair_im == 0.0:
        others = sorted([-0.5 * y1 - shift, -0.5 * y1 - shift, real_root])
        return tuple(complex(x, 0.0) for x in others)

    upper = _polish_or_keep(coeffs, complex(-0.5 * y1 - shift, pair_im))
    if upper.imag < 0.0:
        upper = upper.conjugate()
    return (complex(real_root, 0.0), upper, upper.conjugate())


def _complex_cubic(c2: complex, c1: complex, c0: complex) -> tuple[complex, complex, complex]:
    shift, p, q = _depressed(c2, c1, c0)
    s = cmath.sqrt((0.5 * q) ** 2 + (p / 3.0) ** 3)
    t_plus, t_minus = -0.5 * q + s, -0.5 * q - s
    t = t_plus if abs(t_plus) >= abs(t_minus) else t_minus

    if t == 0:
        return (-shift, -shift, -shift)

    u = t ** (1.0 / 3.0)
    v = -p / (3.0 * u)
    coeffs = (1.0, c2, c1, c0)
    roots = []
    for k in range(3):
        y = u * _OMEGA**k + v * _OMEGA ** (-k)
        roots.append(_polish_or_keep(coeffs, y - shift))
    return tuple(roots)


def solve_cubic_monic(c2: complex, c1: complex, c0: complex) -> CubicRoots:
    """All three roots of z³ + c2 z² + c1 z + c0 = 0, polished by Newton.

    Real coefficients take a branch-stable path: three real roots are
    returned sorted and exactly real, otherwise one real root and an
    exactly conjugate pair (real, upper, lower).
    """
    c2, c1, c0 = complex(c2), complex(c1), complex(c0)
    if c2.imag == 0.0 and c1.imag == 0.0 and c0.imag == 0.0:
        return CubicRoots(_real_cubic(c2.real, c1.real, c0.real))
    return CubicRoots(_complex_cubic(c2, c1, c0))
