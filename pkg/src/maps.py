"""Evaluate H, G, the three branches of G⁻¹ and the conformal maps psi1, psi2.

G = H/H(a) is a degree-3 rational function realizing the surface as a
branched cover: the sheet-1 region of the z-plane is the unbounded one,
the sheet-0 region surrounds the pole -1 and the sheet-2 region the pole
+1. The two bounded regions are cut out by the G-preimages of the slits,
traced numerically once per solution.
"""

import cmath
import logging
from functools import lru_cache
from typing import Optional

import numpy as np

from src.exceptions import (
    BranchPointError,
    OnCutError,
    PoleError,
    TraceFailureError,
)
from src.models import (
    INFINITY,
    BranchRegions,
    LaurentHead,
    MapsConfig,
    Preimage,
    SurfacePoint,
    SurfaceSolution,
)
from src.numerics import solve_cubic_monic

logger = logging.getLogger(__name__)

BRANCH_TOL = 1e-12
DEFAULT_CURVE_RESOLUTION = 512
MAX_SKIPPED_FRACTION = 0.1

# Sheets glued along each slit.
CUT_SHEETS = {1: (0, 1), 2: (1, 2)}

CURVE_CACHE_SIZE = 32


def _check_pole(z: complex) -> None:
    if z == 1 or z == -1:
        raise PoleError(f"Pole of H at z={z}")


def eval_H(sol: SurfaceSolution, z: complex) -> complex:
    """H(z) = h + z + Az/(1-z) + Bz/(1+z)."""
    _check_pole(z)
    c = sol.coeffs
    return c.h + z + c.A * z / (1 - z) + c.B * z / (1 + z)


def eval_H_prime(sol: SurfaceSolution, z: complex, form: str = "additive") -> complex:
    """H'(z) as 1 + A/(z-1)² + B/(z+1)² or as (z-β)(z-α)(z-a)(z-b)/(z²-1)²."""
    _check_pole(z)
    if form == "additive":
        c = sol.coeffs
        return 1 + c.A / (z - 1) ** 2 + c.B / (z + 1) ** 2
    if form == "factored":
        beta, alpha, a, b = sol.crit.as_tuple()
        return (z - beta) * (z - alpha) * (z - a) * (z - b) / (z * z - 1) ** 2
    raise ValueError(f"Unknown H' form: {form!r}")


def eval_G(sol: SurfaceSolution, z: complex) -> complex:
    """G(z) = H(z)/H(a), normalized so that G(a) = 1."""
    return eval_H(sol, z) / sol.coeffs.H_at_a


def cubic_coeffs(sol: SurfaceSolution, w: complex) -> tuple[complex, complex, complex]:
    """(c2, c1, c0) of the monic cubic whose roots are the z with G(z) = w."""
    c = sol.coeffs
    W = c.H_at_a * w
    return -(W + c.A - c.B - c.h), -(1.0 + c.A + c.B), W - c.h


def symmetric_cubic_coeffs(a: float, w: complex) -> tuple[complex, complex, complex]:
    """The same cubic for alpha = -a, written with W = 2a³w/(1+a²)."""
    a2 = a * a
    W = 2.0 * a2 * a / (1.0 + a2) * w
    return -W, (a2 * a2 - 3.0 * a2) / (1.0 + a2), W


def winding_numbers(points: np.ndarray, polyline: np.ndarray) -> np.ndarray:
    """Winding number of a closed complex polyline around each of ``points``.

    Crossing rule: an upward edge with the point on its left counts +1,
    a downward edge with the point on its right counts -1.
    """
    pts = np.atleast_1d(np.asarray(points, dtype=complex))[:, None]
    v0 = polyline[:-1][None, :]
    v1 = polyline[1:][None, :]

    is_left = (v1.real - v0.real) * (pts.imag - v0.imag) - (pts.real - v0.real) * (
        v1.imag - v0.imag
    )
    upward = (v0.imag <= pts.imag) & (v1.imag > pts.imag) & (is_left > 0)
    downward = (v0.imag > pts.imag) & (v1.imag <= pts.imag) & (is_left < 0)
    return upward.sum(axis=1) - downward.sum(axis=1)


def winding_number(point: complex, polyline: np.ndarray) -> int:
    return int(winding_numbers(np.array([point]), polyline)[0])


def _cut_samples(left: float, right: float, n: int) -> np.ndarray:
    """Cosine-clustered interior points of (left, right), ascending."""
    theta = np.pi * (np.arange(n) + 0.5) / n
    return 0.5 * (left + right) - 0.5 * (right - left) * np.cos(theta)


def _trace_arc(sol: SurfaceSolution, left: float, right: float, n: int) -> tuple[np.ndarray, int]:
    upper = []
    skipped = 0
    for t in _cut_samples(left, right, n):
        roots = solve_cubic_monic(*cubic_coeffs(sol, t)).roots
        pair = [r for r in roots if r.imag > 0.0]
        if not pair:
            skipped += 1
            continue
        upper.append(pair[0])
    return np.array(upper, dtype=complex), skipped


def _close_curve(start: float, upper: np.ndarray, end: float) -> np.ndarray:
    return np.concatenate(
        ([complex(start)], upper, [complex(end)], np.conj(upper[::-1]), [complex(start)])
    )


@lru_cache(maxsize=CURVE_CACHE_SIZE)
def _trace(sol: SurfaceSolution, resolution: int) -> BranchRegions:
    lam, mu = sol.intervals.lam, sol.intervals.mu
    beta, alpha, a, b = sol.crit.as_tuple()

    upper0, skipped0 = _trace_arc(sol, -mu, -1.0, resolution)
    upper2, skipped2 = _trace_arc(sol, 1.0, lam, resolution)
    skipped = skipped0 + skipped2
    if skipped:
        logger.warning("Curve tracing dropped %d of %d cut samples", skipped, 2 * resolution)
    if skipped > MAX_SKIPPED_FRACTION * 2 * resolution:
        raise TraceFailureError(
            f"{skipped} cut samples had no conjugate pair of preimages; "
            "the solution does not describe a valid surface"
        )

    curve0 = _close_curve(beta, upper0, alpha)
    curve2 = _close_curve(a, upper2, b)

    if abs(winding_number(-1.0, curve0)) != 1 or abs(winding_number(1.0, curve2)) != 1:
        raise TraceFailureError("Traced branch curves do not enclose the poles -1 and +1")
    if np.any(winding_numbers(curve2, curve0) != 0) or np.any(
        winding_numbers(curve0, curve2) != 0
    ):
        raise TraceFailureError("Traced branch curves overlap")

    logger.debug("Traced branch curves with %d points each", len(curve0))
    return BranchRegions(curve0=curve0, curve2=curve2, resolution=resolution)


def trace_branch_curves(
    sol: SurfaceSolution, resolution: int = DEFAULT_CURVE_RESOLUTION
) -> BranchRegions:
    """Closed preimages of the two slits bounding the sheet-0 and sheet-2 regions.

    curve0 runs beta -> upper arc -> alpha -> lower arc -> beta, curve2 the same
    through a and b. The most recent CURVE_CACHE_SIZE (solution, resolution)
    pairs are memoized.

    Raises:
        TraceFailureError: samples without a conjugate pair, curves that do
            not wind around their pole, or curves that overlap.
    """
    if resolution < 64:
        raise ValueError(f"Curve resolution must be >= 64, got {resolution}")
    return _trace(sol, resolution)


def near_branch_point(sol: SurfaceSolution, w: complex, tol: float = BRANCH_TOL) -> Optional[float]:
    """The branch point within ``tol`` (relative to its size) of w, if any."""
    for bp in sol.intervals.branch_points():
        if abs(w - bp) < tol * max(1.0, abs(bp)):
            return bp
    return None


def _cut_index(sol: SurfaceSolution, x: float) -> Optional[int]:
    if -sol.intervals.mu < x < -1.0:
        return 1
    if 1.0 < x < sol.intervals.lam:
        return 2
    return None


def _branch_preimages(sol: SurfaceSolution, w: complex, bp: float) -> dict[int, Preimage]:
    beta, alpha, a, b = sol.crit.as_tuple()
    lam, mu = sol.intervals.lam, sol.intervals.mu
    crit, merged, third_sheet = {
        -mu: (beta, (0, 1), 2),
        -1.0: (alpha, (0, 1), 2),
        1.0: (a, (1, 2), 0),
        lam: (b, (1, 2), 0),
    }[bp]

    c2, _, _ = cubic_coeffs(sol, w)
    third = -c2 - 2.0 * crit
    result = {s: Preimage(complex(crit), s, multiplicity=2) for s in merged}
    result[third_sheet] = Preimage(complex(third), third_sheet)
    return result


def _real_preimages(sol: SurfaceSolution, x: float, roots) -> dict[int, Preimage]:
    ordered = sorted(r.real for r in roots)
    if x < -sol.intervals.mu:
        sheets = (1, 0, 2)
    elif x > sol.intervals.lam:
        sheets = (0, 2, 1)
    else:
        sheets = (0, 1, 2)
    return {s: Preimage(complex(z, 0.0), s) for s, z in zip(sheets, ordered)}


def _on_cut_preimages(roots, cut: int, bank: str) -> dict[int, Preimage]:
    ranked = sorted(roots, key=lambda r: abs(r.imag))
    real_root = complex(ranked[0].real, 0.0)
    z_up, z_dn = sorted(ranked[1:], key=lambda r: r.imag, reverse=True)

    real_sheet = 2 if cut == 1 else 0
    pair_sheet = 0 if cut == 1 else 2
    if bank == "lower":
        z_up, z_dn = z_dn, z_up
    return {
        real_sheet: Preimage(real_root, real_sheet),
        1: Preimage(z_up, 1),
        pair_sheet: Preimage(z_dn, pair_sheet),
    }


def _region_preimages(
    sol: SurfaceSolution, w: complex, roots, regions: BranchRegions
) -> dict[int, Preimage]:
    roots = list(roots)
    if w.imag > 0.0:
        i1 = max(range(3), key=lambda i: roots[i].imag)
    else:
        # Real w whose roots came back non-real: the unbounded region wins.
        inside = winding_numbers(np.array(roots), regions.curve0) != 0
        inside |= winding_numbers(np.array(roots), regions.curve2) != 0
        i1 = int(np.argmin(inside))

    rest = [roots[i] for i in range(3) if i != i1]
    pts = np.array(rest)
    score = (winding_numbers(pts, regions.curve0) != 0).astype(int) - (
        winding_numbers(pts, regions.curve2) != 0
    ).astype(int)
    if score[0] > score[1] or (score[0] == score[1] and rest[0].real <= rest[1].real):
        z0, z2 = rest
    else:
        z2, z0 = rest
    return {0: Preimage(z0, 0), 1: Preimage(roots[i1], 1), 2: Preimage(z2, 2)}


def preimages(
    sol: SurfaceSolution,
    w: complex,
    bank: Optional[str] = None,
    regions: Optional[BranchRegions] = None,
) -> dict[int, Preimage]:
    """All three solutions of G(z) = w keyed by sheet.

    Within 1e-12 of a branch point the two merging sheets share the
    critical point (multiplicity 2) and the third root comes from the
    root sum. Points below the real axis are solved at the mirror point
    and conjugated, so preimages(conj w) == conj preimages(w) exactly.

    Raises:
        OnCutError: w lies strictly inside a slit and ``bank`` is None.
    """
    w = complex(w)
    if cmath.isinf(w):
        return {
            0: Preimage(complex(-1.0, 0.0), 0),
            1: Preimage(INFINITY, 1),
            2: Preimage(complex(1.0, 0.0), 2),
        }
    if w.imag < 0.0:
        mirrored = preimages(sol, w.conjugate(), bank, regions)
        return {
            s: Preimage(root.z.conjugate(), s, root.multiplicity)
            for s, root in mirrored.items()
        }

    bp = near_branch_point(sol, w)
    if bp is not None:
        return _branch_preimages(sol, w, bp)

    roots = solve_cubic_monic(*cubic_coeffs(sol, w)).roots
    if w.imag == 0.0:
        cut = _cut_index(sol, w.real)
        if cut is not None:
            if bank is None:
                raise OnCutError(
                    f"w={w.real!r} lies inside the slit {'Δ1' if cut == 1 else 'Δ2'}; "
                    "pass bank='upper' or bank='lower'"
                )
            return _on_cut_preimages(roots, cut, bank)
        if all(r.imag == 0.0 for r in roots):
            return _real_preimages(sol, w.real, roots)

    if regions is None:
        regions = trace_branch_curves(sol)
    return _region_preimages(sol, w, roots, regions)


def invert_G(
    sol: SurfaceSolution,
    p: SurfacePoint,
    strict: bool = False,
    regions: Optional[BranchRegions] = None,
) -> complex:
    """The z with G(z) = p.w in the region of sheet p.sheet.

    A slit only needs a bank on the two sheets it glues; the third sheet
    sees an ordinary real point there.

    Raises:
        OnCutError: on-slit point of a glued sheet without a bank.
        BranchPointError: with ``strict``, when the root is a merged one.
    """
    bank = p.bank
    w = complex(p.w)
    if bank is None and not p.is_infinite and w.imag == 0.0:
        cut = _cut_index(sol, w.real)
        if cut is not None and p.sheet not in CUT_SHEETS[cut]:
            bank = "upper"

    root = preimages(sol, w, bank, regions)[p.sheet]
    if strict and root.multiplicity > 1:
        bp = near_branch_point(sol, w)
        raise BranchPointError(
            f"w={w} is within {BRANCH_TOL} of the branch point {bp}; "
            f"sheets merge at z={root.z.real!r}",
            branch_point=bp,
            root=root.z,
            multiplicity=root.multiplicity,
        )
    return root.z


def mobius_constant(sol: SurfaceSolution) -> float:
    """C2 = -A/(2H(a)), with psi2 = C2 psi1 / (psi1 - psi1(∞ on sheet 2)); also psi2 at ∞ on sheet 1."""
    return -sol.coeffs.A / (2.0 * sol.coeffs.H_at_a)


def psi_from_root(sol: SurfaceSolution, which: int, z: complex) -> complex:
    """psi1 = (1 + z)/H(a) or psi2 = (A/2H(a)) (1 + z)/(1 - z) at a root z = G⁻¹(w)."""
    H_at_a = sol.coeffs.H_at_a
    if which == 1:
        if cmath.isinf(z):
            raise PoleError("psi1 has its pole at infinity on sheet 1")
        return (1 + z) / H_at_a
    if which == 2:
        if cmath.isinf(z):
            return complex(mobius_constant(sol))
        if z == 1:
            raise PoleError("psi2 has its pole at infinity on sheet 2")
        return sol.coeffs.A / (2.0 * H_at_a) * (1 + z) / (1 - z)
    raise ValueError(f"psi index must be 1 or 2, got {which!r}")


def psi1(
    sol: SurfaceSolution,
    p: SurfacePoint,
    strict: bool = False,
    regions: Optional[BranchRegions] = None,
) -> complex:
    """psi1: zero at ∞ on sheet 0, w + O(1) at ∞ on sheet 1."""
    return psi_from_root(sol, 1, invert_G(sol, p, strict, regions))


def psi2(
    sol: SurfaceSolution,
    p: SurfacePoint,
    strict: bool = False,
    regions: Optional[BranchRegions] = None,
) -> complex:
    """psi2: zero at ∞ on sheet 0, w + O(1) at ∞ on sheet 2."""
    return psi_from_root(sol, 2, invert_G(sol, p, strict, regions))


PSI = {1: psi1, 2: psi2}


def psi_user(
    sol: SurfaceSolution,
    which: int,
    p: SurfacePoint,
    strict: bool = False,
    regions: Optional[BranchRegions] = None,
) -> complex:
    """psi at a point given in user coordinates, scaled so that it is still w + O(1)."""
    w = p.w if p.is_infinite else sol.chart.to_canonical(complex(p.w))
    value = PSI[which](sol, SurfacePoint(w, p.sheet, p.bank), strict, regions)
    return sol.chart.scale * value


def extract_laurent(
    sol: SurfaceSolution,
    which_psi: int,
    center: SurfacePoint,
    k: int = 3,
    cfg: Optional[MapsConfig] = None,
    regions: Optional[BranchRegions] = None,
) -> LaurentHead:
    """Coefficients of w¹, w⁰, w⁻¹, ... of psi near an infinity point.

    Trapezoidal rule on circles |w| = R, which is exact up to aliasing for
    Laurent series. The coefficients come from the smallest radius and
    ``error`` is the spread of the two leading ones across radii.
    """
    if not center.is_infinite:
        raise ValueError("Laurent expansions are taken at infinity points only")
    if not 1 <= k <= 4:
        raise ValueError(f"k must be in 1..4, got {k}")

    cfg = cfg or MapsConfig()
    if regions is None:
        regions = trace_branch_curves(sol, cfg.curve_resolution)

    psi = PSI[which_psi]
    floor = 10.0 * max(sol.intervals.lam, sol.intervals.mu)
    radii = sorted(max(r, floor) for r in cfg.laurent_radii)
    n = cfg.laurent_samples
    # Half-step offset keeps every sample off the real axis.
    theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    unit = np.exp(1j * theta)
    powers = range(1, 1 - k, -1)

    per_radius = []
    for radius in radii:
        values = np.array(
            [psi(sol, SurfacePoint(radius * u, center.sheet), regions=regions) for u in unit]
        )
        spectrum = np.fft.fft(values) / n
        per_radius.append(
            [
                spectrum[power % n] * np.exp(-1j * np.pi * power / n) * radius ** (-power)
                for power in powers
            ]
        )

    table = np.array(per_radius)
    lead = table[:, : min(2, k)]
    error = float(np.max(np.abs(lead - lead[0]))) if len(radii) > 1 else 0.0
    logger.debug("Laurent head psi%d at infinity on sheet %d: %s", which_psi, center.sheet, table[0])
    return LaurentHead(
        coeffs=tuple(complex(c) for c in table[0]),
        center=center,
        leading_power=1,
        error=error,
    )
