"""Evaluation grids and the shared monotonicity / convexity engine."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

RTOL = 1e-9
NOISE_FLOOR = 1e-12
_EPS = np.finfo(float).eps


class Spacing(str, enum.Enum):
    LINEAR = "linear"
    LOG = "log"


@dataclass(frozen=True)
class GridSpec:
    """Closed interval [t_min, t_max] sampled at ``points`` abscissae."""

    t_min: float
    t_max: float
    points: int = 2000
    spacing: Spacing = Spacing.LOG

    def __post_init__(self):
        object.__setattr__(self, "spacing", Spacing(self.spacing))
        if not (np.isfinite(self.t_min) and np.isfinite(self.t_max)):
            raise ValueError("grid bounds must be finite")
        if not self.t_min < self.t_max:
            raise ValueError(f"t_min={self.t_min} must be below t_max={self.t_max}")
        if int(self.points) < 2:
            raise ValueError("a grid needs at least 2 points")
        if self.spacing is Spacing.LOG and self.t_min <= 0:
            raise ValueError("log spacing needs t_min > 0")
        object.__setattr__(self, "points", int(self.points))

    def values(self) -> np.ndarray:
        if self.spacing is Spacing.LOG:
            return np.geomspace(self.t_min, self.t_max, self.points)
        return np.linspace(self.t_min, self.t_max, self.points)


def as_grid(grid) -> np.ndarray:
    """Accept a GridSpec or an explicit ascending array of abscissae."""
    if isinstance(grid, GridSpec):
        return grid.values()
    x = np.asarray(grid, dtype=float).ravel()
    if x.size < 2 or np.any(np.diff(x) <= 0):
        raise ValueError("grid must be strictly increasing with at least 2 points")
    return x


class Verdict(str, enum.Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    verdict: Verdict
    witness: Optional[float] = None
    grid: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False, compare=False)
    detail: str = ""

    @property
    def satisfied(self) -> bool:
        return self.verdict is Verdict.SATISFIED

    def __bool__(self) -> bool:
        return self.satisfied


def _screen(label, x, d, tol, witness_x):
    """Classify signed excesses ``d`` (negative means the wrong direction)."""
    bad = d < -tol
    if not np.any(bad):
        return ConditionReport(label, Verdict.SATISFIED, grid=x)
    loud = bad & (np.abs(d) >= NOISE_FLOOR)
    if not np.any(loud):
        k = int(np.flatnonzero(bad)[0])
        return ConditionReport(label, Verdict.INCONCLUSIVE, witness=float(witness_x[k]), grid=x,
                               detail="violations below the noise floor")
    worst = int(np.argmin(np.where(loud, d + tol, np.inf)))
    return ConditionReport(label, Verdict.VIOLATED, witness=float(witness_x[worst]), grid=x,
                           detail=f"excess {-d[worst]:.3e}")


def monotone_report(x, values, direction: str, label: str = "", rtol: float = RTOL) -> ConditionReport:
    """Adjacent-difference test of ``values`` sampled on ascending ``x``."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(values, dtype=float)
    label = label or direction
    if direction not in ("increasing", "decreasing"):
        raise ValueError(f"unknown direction {direction!r}")
    if not np.all(np.isfinite(v)):
        k = int(np.flatnonzero(~np.isfinite(v))[0])
        return ConditionReport(label, Verdict.INCONCLUSIVE, witness=float(x[k]), grid=x,
                               detail="non-finite values")
    d = np.diff(v)
    if direction == "decreasing":
        d = -d
    tol = rtol * np.maximum(np.abs(v[1:]), np.abs(v[:-1]))
    return _screen(label, x, d, tol, x[1:])


def convex_report(x, values, label: str = "convex", concave: bool = False,
                  rtol: float = RTOL) -> ConditionReport:
    """Convexity via nondecreasing divided-difference slopes."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(values, dtype=float)
    if concave:
        v = -v
    if not np.all(np.isfinite(v)):
        k = int(np.flatnonzero(~np.isfinite(v))[0])
        return ConditionReport(label, Verdict.INCONCLUSIVE, witness=float(x[k]), grid=x,
                               detail="non-finite values")
    dx = np.diff(x)
    s = np.diff(v) / dx
    ds = np.diff(s)
    mag = np.maximum.reduce([np.abs(v[:-2]), np.abs(v[1:-1]), np.abs(v[2:])])
    # rounding in a divided difference grows like eps*|v|/dx
    tol = np.maximum(rtol * np.maximum(np.abs(s[1:]), np.abs(s[:-1])),
                     8 * _EPS * mag / np.minimum(dx[1:], dx[:-1]))
    # compare on the scale of value changes so the noise floor is meaningful
    h = np.minimum(dx[1:], dx[:-1])
    return _screen(label, x, ds * h, tol * h, x[1:-1])
