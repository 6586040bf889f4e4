"""Data models for the surface-mapper library."""

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from src.exceptions import GeometryError

SHEETS = (0, 1, 2)
BANKS = ("upper", "lower")

INFINITY = complex(math.inf, 0.0)


@dataclass(frozen=True)
class QuadraticRoots:
    """Both real roots of x² + px + q = 0, sorted ascending."""

    x_minus: float
    x_plus: float


@dataclass(frozen=True)
class CubicRoots:
    """The three roots (with multiplicity) of a monic cubic."""

    roots: tuple[complex, complex, complex]

    def as_array(self) -> np.ndarray:
        return np.array(self.roots, dtype=complex)


@dataclass(frozen=True)
class IntervalPair:
    """Canonical geometry: Δ₁ = [-mu, -1] and Δ₂ = [1, lam]."""

    lam: float
    mu: float

    def __post_init__(self):
        if not (self.lam > 1.0 and self.mu > 1.0):
            raise GeometryError(
                f"Canonical intervals need lambda > 1 and mu > 1, got "
                f"lambda={self.lam!r}, mu={self.mu!r}"
            )
        if not (math.isfinite(self.lam) and math.isfinite(self.mu)):
            raise GeometryError("lambda and mu must be finite")

    @property
    def is_symmetric(self) -> bool:
        return self.lam == self.mu

    def branch_points(self) -> tuple[float, float, float, float]:
        """The four critical values -mu < -1 < 1 < lambda."""
        return (-self.mu, -1.0, 1.0, self.lam)


@dataclass(frozen=True)
class AffineChart:
    """Orientation-preserving map t -> scale * t + shift from canonical to user coordinates."""

    scale: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if not self.scale > 0.0:
            raise GeometryError(f"Chart scale must be positive, got {self.scale!r}")

    def to_user(self, t: complex) -> complex:
        return self.scale * t + self.shift

    def to_canonical(self, x: complex) -> complex:
        return (x - self.shift) / self.scale


@dataclass(frozen=True)
class CriticalPoints:
    """Real critical points of G, ordered beta < -1 < alpha < a < 1 < b."""

    beta: float
    alpha: float
    a: float
    b: float

    def is_ordered(self) -> bool:
        return self.beta < -1.0 < self.alpha < self.a < 1.0 < self.b

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.beta, self.alpha, self.a, self.b)


@dataclass(frozen=True)
class MapCoefficients:
    """Everything needed to evaluate H(z) = h + z + Az/(1-z) + Bz/(1+z) and G = H/H(a)."""

    h: float
    A: float
    B: float
    H_at_a: float


@dataclass(frozen=True)
class SurfaceSolution:
    """Solved surface: geometry, chart back to user coordinates, critical points, coefficients."""

    intervals: IntervalPair
    chart: AffineChart
    crit: CriticalPoints
    coeffs: MapCoefficients

    def to_dict(self) -> dict[str, float]:
        """Flat record with the keys of the JSON interface."""
        return {
            "lambda": self.intervals.lam,
            "mu": self.intervals.mu,
            "scale": self.chart.scale,
            "shift": self.chart.shift,
            "beta": self.crit.beta,
            "alpha": self.crit.alpha,
            "a": self.crit.a,
            "b": self.crit.b,
            "h": self.coeffs.h,
            "A": self.coeffs.A,
            "B": self.coeffs.B,
            "H_at_a": self.coeffs.H_at_a,
        }


@dataclass(frozen=True)
class SurfacePoint:
    """Point of the Riemann surface: base value w on a given sheet.

    Real points strictly inside a cut need a bank tag ("upper" or "lower");
    ``w = INFINITY`` denotes the point at infinity of the sheet.
    """

    w: complex
    sheet: int
    bank: Optional[str] = None

    def __post_init__(self):
        if self.sheet not in SHEETS:
            raise ValueError(f"sheet must be one of {SHEETS}, got {self.sheet!r}")
        if self.bank is not None and self.bank not in BANKS:
            raise ValueError(f"bank must be one of {BANKS} or None, got {self.bank!r}")

    @classmethod
    def infinity(cls, sheet: int) -> "SurfacePoint":
        return cls(INFINITY, sheet)

    @property
    def is_infinite(self) -> bool:
        return cmath.isinf(complex(self.w))

    def conjugate(self) -> "SurfacePoint":
        """Mirror point; the bank flips with the conjugation."""
        flipped = {"upper": "lower", "lower": "upper"}.get(self.bank) if self.bank else None
        if self.is_infinite:
            return self
        return SurfacePoint(complex(self.w).conjugate(), self.sheet, flipped)


@dataclass(frozen=True)
class Preimage:
    """A root of G(z) = w assigned to a sheet; multiplicity 2 at branch points."""

    z: complex
    sheet: int
    multiplicity: int = 1


@dataclass(frozen=True)
class SystResidual:
    """Left sides of the two polynomial equations (second one as left minus right)."""

    r1: float
    r2: float


@dataclass(frozen=True)
class UVPoint:
    """u = lambda - mu, v = (lambda + mu)²."""

    u: float
    v: float


@dataclass(frozen=True)
class SolverConfig:
    """Continuation and Newton parameters."""

    n_steps: int = 32
    sigma: float = 1e-12
    max_newton_iters: int = 50
    damping: float = 0.5
    max_backtracks: int = 30

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.max_newton_iters < 1:
            raise ValueError(f"max_newton_iters must be >= 1, got {self.max_newton_iters}")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError(f"damping must be in (0, 1], got {self.damping}")
        if self.max_backtracks < 1:
            raise ValueError(f"max_backtracks must be >= 1, got {self.max_backtracks}")


@dataclass(frozen=True)
class MapsConfig:
    """Evaluation settings for branch-curve tracing and Laurent extraction."""

    curve_resolution: int = 512
    laurent_radii: tuple[float, ...] = (1e3, 1e4, 1e5)
    laurent_samples: int = 64


@dataclass(frozen=True)
class OracleConfig:
    """Grid-refinement oracle settings."""

    grid_points: int = 33
    shrink: float = 4.0
    depth: int = 20


@dataclass(frozen=True, eq=False)
class BranchRegions:
    """Closed polylines bounding the sheet-0 (around -1) and sheet-2 (around +1) preimage regions."""

    curve0: np.ndarray = field(repr=False)
    curve2: np.ndarray = field(repr=False)
    resolution: int = 512


@dataclass(frozen=True)
class LaurentHead:
    """Leading Laurent coefficients at an infinity point.

    ``coeffs[i]`` multiplies ``w ** (leading_power - i)``.
    """

    coeffs: tuple[complex, ...]
    center: SurfacePoint
    leading_power: int
    error: float = 0.0


@dataclass(frozen=True)
class Table1Row:
    """One row of the published numerical table."""

    lam: float
    mu: float
    beta: float
    alpha: float
    a: float
    b: float

    def values(self) -> tuple[float, float, float, float]:
        return (self.beta, self.alpha, self.a, self.b)

    def deviation(self, other: "Table1Row") -> float:
        return max(abs(x - y) for x, y in zip(self.values(), other.values()))


@dataclass
class TableStats:
    """Summary of one reproduction of the golden table."""

    total_rows: int
    max_deviation: float
    worst_lam: float
    worst_mu: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


@dataclass
class CheckResult:
    """Outcome of one registered invariant check."""

    name: str
    passed: bool
    worst_residual: float
    tolerance: float


@dataclass
class VerificationReport:
    """All invariant checks run against one solution."""

    checks: list[CheckResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "worst_residual": c.worst_residual,
                    "tolerance": c.tolerance,
                }
                for c in self.checks
            ],
            "all_passed": self.all_passed,
        }


class OutputFormat(str, Enum):
    """Output rendering selected on the command line."""

    JSON = "json"
    CSV = "csv"
    PRETTY = "pretty"
