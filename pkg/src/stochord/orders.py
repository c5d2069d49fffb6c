"""Gridded stochastic-order checks between two portfolios, the numerical
Schur-Ostrowski test, and the auxiliary functions k1 and k2.

A verdict of ``holds`` means no violation was found on the grid; it is never
a proof.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._grid import (ConditionReport, GridSpec, Verdict, as_grid, convex_report,
                    monotone_report)
from .portfolio import DomainError, Portfolio, default_grid, log_max_cdf, max_cdf, max_rhr

ORDER_TOL = 1e-10
SATURATED = 1e-14
_EPS = np.finfo(float).eps


class Status(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class OrderVerdict:
    relation: str
    direction: str
    status: Status
    witness: Optional[float]
    margin: float
    method: str = ""
    excluded: int = 0

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    def describe(self) -> str:
        if self.status is Status.HOLDS:
            text = f"{self.direction} [{self.relation}]: no violation found on grid"
        elif self.status is Status.FAILS:
            text = f"{self.direction} [{self.relation}]: violated at t={self.witness:.10g}"
        else:
            text = f"{self.direction} [{self.relation}]: inconclusive"
        text += f" (margin {self.margin:.3e}"
        if self.excluded:
            text += f", {self.excluded} saturated points excluded"
        return text + ")"


def _verdict_from_slack(relation, direction, t, slack, tol, method="", excluded=0):
    """``slack`` >= -tol everywhere means the order holds."""
    finite = np.isfinite(slack)
    if not np.any(finite):
        return OrderVerdict(relation, direction, Status.INCONCLUSIVE, None, float("nan"),
                            method, excluded)
    margin = float(np.min(slack[finite]))
    excess = np.where(finite, slack + tol, np.inf)
    k = int(np.argmin(excess))
    if excess[k] < 0:
        return OrderVerdict(relation, direction, Status.FAILS, float(t[k]), margin, method, excluded)
    if not np.all(finite):
        k = int(np.flatnonzero(~finite)[0])
        return OrderVerdict(relation, direction, Status.INCONCLUSIVE, float(t[k]), margin,
                            method, excluded)
    return OrderVerdict(relation, direction, Status.HOLDS, None, margin, method, excluded)


def curve_dominance(t, cdf_a, cdf_b, direction="a >=st b") -> OrderVerdict:
    """a >=_st b on the grid iff cdf_a <= cdf_b pointwise."""
    t = np.asarray(t, dtype=float)
    slack = np.asarray(cdf_b, dtype=float) - np.asarray(cdf_a, dtype=float)
    return _verdict_from_slack("st", direction, t, slack, ORDER_TOL, "cdf")


def check_st(a: Portfolio, b: Portfolio, grid=None) -> OrderVerdict:
    """Usual stochastic order of the largest claims: a >=_st b."""
    t = as_grid(grid if grid is not None else default_grid(a, b))
    return curve_dominance(t, max_cdf(a, t), max_cdf(b, t), "U_a >=st U_b")


def check_rh(a: Portfolio, b: Portfolio, grid=None, method: str = "rhr_compare") -> OrderVerdict:
    """Reversed hazard rate order of the largest claims: a >=_rh b.

    ``rhr_compare`` compares reversed hazard rates pointwise;
    ``ratio_monotone`` requires F_a / F_b to be nondecreasing, tested on
    adjacent differences of log F_a - log F_b.
    """
    t = as_grid(grid if grid is not None else default_grid(a, b))
    top = max(a.lam.max(), b.lam.max())
    if t[0] <= top:
        raise DomainError(f"rh checks need a grid strictly above the largest location {top}")
    la, lb = log_max_cdf(a, t), log_max_cdf(b, t)
    saturated = (-np.expm1(la) < SATURATED) & (-np.expm1(lb) < SATURATED)
    excluded = int(saturated.sum())
    direction = "U_a >=rh U_b"
    if method == "rhr_compare":
        ra, rb = max_rhr(a, t), max_rhr(b, t)
        slack = np.where(saturated, np.inf, ra - rb)
        # relative: reversed hazards decay in the tail, and an absolute
        # allowance there would admit real violations
        tol = ORDER_TOL * np.maximum(np.abs(ra), np.abs(rb)) + 1e-300
        if excluded == t.size:
            return OrderVerdict("rh", direction, Status.INCONCLUSIVE, None, float("nan"),
                                method, excluded)
        return _verdict_from_slack("rh", direction, t, slack, tol, method, excluded)
    if method == "ratio_monotone":
        g = la - lb
        d = np.diff(g)
        skip = saturated[1:] | saturated[:-1]
        slack = np.where(skip, np.inf, d)
        tol = (ORDER_TOL * (np.abs(np.diff(la)) + np.abs(np.diff(lb)))
               + 4 * _EPS * (np.abs(la[1:]) + np.abs(la[:-1]) + np.abs(lb[1:]) + np.abs(lb[:-1])))
        if np.all(skip):
            return OrderVerdict("rh", direction, Status.INCONCLUSIVE, None, float("nan"),
                                method, excluded)
        return _verdict_from_slack("rh", direction, t[1:], slack, tol, method, excluded)
    raise ValueError(f"unknown rh method {method!r}")


def schur_ostrowski_check(fn: Callable, point, cls: str, rel_step: float = 1e-6) -> bool:
    """Pairwise Schur-Ostrowski sign test at ``point``.

    Schur-convex requires (x_i - x_j)(df/dx_i - df/dx_j) >= 0 for all pairs,
    Schur-concave requires <= 0. Partials use centered differences.
    """
    if cls not in ("convex", "concave"):
        raise ValueError("cls must be 'convex' or 'concave'")
    x = np.asarray(point, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("point must be a vector of length >= 2")
    grad = np.empty_like(x)
    for i in range(x.size):
        h = rel_step * (abs(x[i]) if x[i] != 0 else 1.0)
        up, dn = x.copy(), x.copy()
        up[i] += h
        dn[i] -= h
        grad[i] = (float(fn(up)) - float(fn(dn))) / (2 * h)
    dx = x[:, None] - x[None, :]
    dg = grad[:, None] - grad[None, :]
    crit = dx * dg
    tol = 1e-6 * np.abs(dx) * (np.abs(grad)[:, None] + np.abs(grad)[None, :]) + 1e-300
    if cls == "convex":
        return bool(np.all(crit >= -tol))
    return bool(np.all(crit <= tol))


def k1_eval(alpha, t, p):
    """(1 - t^alpha) / (1 - p (1 - t^alpha))."""
    s = -np.expm1(alpha * np.log(t))
    return s / (1 - p * s)


def k2_eval(alpha, t, p):
    """p t^alpha log(t) / (1 - p (1 - t^alpha)); negative for t in (0, 1)."""
    ta = np.exp(alpha * np.log(t))
    return p * ta * np.log(t) / (1 - p * (1 - ta))


def monotonicity_check(fn: Callable, grid, direction: str, label: str = "") -> ConditionReport:
    x = as_grid(grid)
    return monotone_report(x, _evaluate(fn, x), direction, label or direction)


def convexity_check(fn: Callable, grid, concave: bool = False, label: str = "") -> ConditionReport:
    x = as_grid(grid)
    return convex_report(x, _evaluate(fn, x), label or ("concave" if concave else "convex"), concave)


def _evaluate(fn, x):
    try:
        v = np.asarray(fn(x), dtype=float)
        if v.shape == x.shape:
            return v
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(xi)) for xi in x])


__all__ = [
    "ConditionReport", "GridSpec", "OrderVerdict", "Status", "Verdict", "check_rh",
    "check_st", "convexity_check", "curve_dominance", "k1_eval", "k2_eval",
    "monotonicity_check", "schur_ostrowski_check",
]
