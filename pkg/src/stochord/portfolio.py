"""Bernoulli-thinned exponentiated location-scale claims and their order
statistics.

Risk i pays U_i = J_i X_i with J_i ~ Bernoulli(p_i) and
P(X_i <= x) = F((x - lambda_i) / theta_i) ** alpha_i for a baseline F.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ._grid import GridSpec, Spacing, as_grid
from .baseline import BaselineDistribution, bisect_quantile

MAX_ENUMERATION = 20


class PortfolioSizeError(ValueError):
    """Exact subset enumeration is limited to n <= 20."""


class DomainError(ValueError):
    """A reversed hazard was requested at or below a location parameter."""


def _vector(name, values, n=None):
    v = np.array(values, dtype=float, ndmin=1)
    if v.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if n is not None and v.size != n:
        raise ValueError(f"{name} has length {v.size}, expected {n}")
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise ValueError(f"{name} entries must be finite and strictly positive")
    v.setflags(write=False)
    return v


@dataclass(frozen=True, eq=False)
class Portfolio:
    """n independent risks sharing one baseline distribution."""

    baseline: BaselineDistribution
    alpha: np.ndarray
    lam: np.ndarray
    theta: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        alpha = _vector("alpha", self.alpha)
        n = alpha.size
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "lam", _vector("lambda", self.lam, n))
        object.__setattr__(self, "theta", _vector("theta", self.theta, n))
        p = _vector("p", self.p, n)
        if np.any(p > 1):
            raise ValueError("occurrence probabilities must lie in (0, 1]")
        object.__setattr__(self, "p", p)

    @classmethod
    def homogeneous(cls, baseline, n, alpha=1.0, lam=1.0, theta=1.0, p=1.0):
        return cls(baseline, *(np.full(n, float(v)) for v in (alpha, lam, theta, p)))

    @property
    def n(self) -> int:
        return self.alpha.size

    def replace(self, **changes) -> "Portfolio":
        fields = {"baseline": self.baseline, "alpha": self.alpha, "lam": self.lam,
                  "theta": self.theta, "p": self.p}
        fields.update(changes)
        return Portfolio(**fields)

    def arguments(self, t) -> np.ndarray:
        """Baseline arguments (t - lambda_i) / theta_i, shape (len(t), n)."""
        t = np.asarray(t, dtype=float)
        return (t[..., None] - self.lam) / self.theta

    def risk_cdfs(self, t) -> np.ndarray:
        """Per-risk CDFs H_i(t) = 1 - p_i (1 - F^alpha_i(x_i)), zero for t < 0."""
        t = np.asarray(t, dtype=float)
        logf = self.baseline.logcdf(self.arguments(t))
        h = 1.0 - self.p * -np.expm1(self.alpha * logf)
        return np.where(t[..., None] < 0, 0.0, h)

    def __repr__(self):
        return (f"Portfolio(n={self.n}, baseline={self.baseline!r}, alpha={self.alpha.tolist()}, "
                f"lambda={self.lam.tolist()}, theta={self.theta.tolist()}, p={self.p.tolist()})")


def _scalar_out(t, out):
    return float(out) if np.ndim(t) == 0 else out


def max_cdf(pf: Portfolio, t):
    """P(max_i U_i <= t)."""
    return _scalar_out(t, np.prod(pf.risk_cdfs(t), axis=-1))


def log_max_cdf(pf: Portfolio, t):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        logf = pf.baseline.logcdf(pf.arguments(t))
        out = np.sum(np.log1p(pf.p * np.expm1(pf.alpha * logf)), axis=-1)
    return _scalar_out(t, np.where(t < 0, -np.inf, out))


def max_rhr(pf: Portfolio, t):
    """Reversed hazard rate d/dt log P(max U_i <= t), for t above every location."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= pf.lam.max()):
        raise DomainError(f"reversed hazard needs t > max location {pf.lam.max()}")
    x = pf.arguments(t)
    base = pf.baseline
    logf = base.logcdf(x)
    h = 1.0 - pf.p * -np.expm1(pf.alpha * logf)
    terms = (pf.alpha / pf.theta) * pf.p * base.pdf(x) * np.exp((pf.alpha - 1) * logf) / h
    return _scalar_out(t, np.sum(terms, axis=-1))


def _kth_from_risks(h, k):
    n = h.shape[-1]
    total = np.zeros(h.shape[:-1])
    g = 1.0 - h
    for j in range(k, n + 1):
        for subset in itertools.combinations(range(n), j):
            mask = np.zeros(n, dtype=bool)
            mask[list(subset)] = True
            total = total + np.prod(np.where(mask, h, g), axis=-1)
    return np.clip(total, 0.0, 1.0)


def kth_cdf(pf: Portfolio, k: int, t):
    """P(U_{k:n} <= t), U_{k:n} the k-th smallest claim, by subset enumeration."""
    n = pf.n
    if n > MAX_ENUMERATION:
        raise PortfolioSizeError(f"n={n} exceeds the enumeration limit {MAX_ENUMERATION}")
    if not 1 <= int(k) <= n:
        raise ValueError(f"k must lie in 1..{n}")
    return _scalar_out(t, _kth_from_risks(pf.risk_cdfs(t), int(k)))


def sample_max(pf: Portfolio, seed: int, count: int) -> np.ndarray:
    """Independent draws of max_i J_i X_i from a generator seeded with ``seed``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    occurs = rng.random((count, pf.n)) < pf.p
    u = rng.random((count, pf.n))
    # F^alpha(x) = u  <=>  F(x) = u^(1/alpha); u = 0 maps to the lower support end
    level = np.exp(np.log(np.maximum(u, 1e-300)) / pf.alpha)
    level = np.clip(level, 1e-300, np.nextafter(1.0, 0.0))
    claims = pf.lam + pf.theta * pf.baseline.ppf(level)
    return np.max(np.where(occurs, claims, 0.0), axis=1)


def ks_distance(pf: Portfolio, samples) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF of ``samples``
    and the analytic CDF of the portfolio maximum.

    The maximum has an atom at 0 of mass prod(1 - p_i); the comparison
    uses both one-sided limits of the analytic CDF at each sample, so the
    jump does not count as a discrepancy.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("no samples")
    upper = max_cdf(pf, x)
    lower = max_cdf(pf, np.nextafter(x, -np.inf))
    ecdf_hi = np.arange(1, n + 1) / n
    ecdf_lo = np.arange(0, n) / n
    return float(max(np.max(ecdf_hi - upper), np.max(lower - ecdf_lo), 0.0))


def reliability_lower_bound(p1, p2, lam, theta1, theta2, alpha, baseline: BaselineDistribution, t):
    """Lower bound on P(U_{2:2} > t) for two risks with common location and
    shape, obtained from the fully mixed parameter matrix with psi(p) = exp(-p)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < lam):
        raise ValueError("the bound is stated for t >= lambda")
    mean_scale_arg = (t - lam) * (theta1 + theta2) / (2 * theta1 * theta2)
    fa = np.exp(alpha * baseline.logcdf(mean_scale_arg))
    inner = 1.0 + np.log((np.exp(-p1) + np.exp(-p2)) / 2) * (1.0 - fa)
    return _scalar_out(t, 1.0 - inner ** 2)


def default_grid(*portfolios: Portfolio, points: int = 2000, level: float = 0.9999) -> GridSpec:
    """Log-spaced grid from just above the largest location to the ``level``
    quantile of the slower-tailed portfolio maximum."""
    lo = max(pf.lam.max() for pf in portfolios) + 1e-6
    hi = max(max_quantile(pf, level) for pf in portfolios)
    if hi <= lo:
        hi = lo * 2
    return GridSpec(lo, hi, points, Spacing.LOG)


def saturating_grid(*portfolios: Portfolio, points: int = 2000, tail: float = 1e-13) -> GridSpec:
    """Log-spaced grid from just above the largest location to the point
    where every portfolio maximum has CDF at least 1 - ``tail``.

    On such a grid a nondecreasing CDF ratio forces usual stochastic
    dominance, since the ratio ends within ``tail`` of one.
    """
    return default_grid(*portfolios, points=points, level=1.0 - tail)


def max_quantile(pf: Portfolio, level: float) -> float:
    """Smallest t with P(max U_i <= t) >= level (bisection)."""
    if level <= np.prod(1 - pf.p):
        return 0.0
    return float(bisect_quantile(lambda t: max_cdf(pf, t), level))


def grid_values(grid) -> np.ndarray:
    return as_grid(grid)


__all__ = [
    "DomainError", "GridSpec", "Portfolio", "PortfolioSizeError", "default_grid", "ks_distance",
    "kth_cdf", "log_max_cdf", "max_cdf", "max_quantile", "max_rhr",
    "reliability_lower_bound", "sample_max", "saturating_grid",
]
