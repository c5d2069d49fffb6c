"""Baseline distributions on [0, inf), the psi transform family and the
grid checks for the hazard-shape conditions C1-C8 and psi conditions C9/C10.

Every distribution is extended by F(x) = 0 for x < 0 so that location-shifted
portfolio formulas are total functions of t.
"""

from __future__ import annotations

import abc
import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, ClassVar, Optional

import numpy as np

from ._grid import (ConditionReport, GridSpec, Verdict, as_grid, convex_report,
                    monotone_report)

SATURATION = 1e-14
_TINY = 1e-300


class Family(str, enum.Enum):
    GLFR = "GLFR"
    MOEQL = "MOEQL"
    BURR_POWER = "BurrPower"
    LOMAX_POWER = "LomaxPower"
    CUSTOM = "Custom"


class SaturationError(ArithmeticError):
    """The survival function is too small for f/(1-F) to be meaningful."""


class BracketError(RuntimeError):
    """Quantile bracketing failed; the distribution looks malformed."""


def _positive(name, value, allow_zero=False):
    value = float(value)
    ok = value >= 0 if allow_zero else value > 0
    if not (ok and math.isfinite(value)):
        bound = ">= 0" if allow_zero else "> 0"
        raise ValueError(f"parameter {name} must be finite and {bound}, got {value}")
    return value


def fd_step(x):
    return np.maximum(1e-6, 1e-6 * np.abs(x))


class BaselineDistribution(abc.ABC):
    """Absolutely continuous distribution supported on [0, inf).

    Subclasses implement the ``_interior_*`` methods for x > 0; the public
    methods handle the x <= 0 extension and array broadcasting.
    """

    family: ClassVar[Family]

    @property
    @abc.abstractmethod
    def params(self) -> dict:
        ...

    @abc.abstractmethod
    def _interior_logcdf(self, x):
        ...

    @abc.abstractmethod
    def _interior_sf(self, x):
        ...

    @abc.abstractmethod
    def _interior_pdf(self, x):
        ...

    def _interior_hazard(self, x):
        return self._interior_pdf(x) / self._interior_sf(x)

    def _apply(self, method, x, outside):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, outside, dtype=float)
        pos = x > 0
        if np.any(pos):
            out[pos] = method(x[pos])
        return out if out.ndim else float(out)

    def cdf(self, x):
        return self._apply(lambda z: np.exp(self._interior_logcdf(z)), x, 0.0)

    def logcdf(self, x):
        return self._apply(self._interior_logcdf, x, -np.inf)

    def sf(self, x):
        return self._apply(self._interior_sf, x, 1.0)

    def pdf(self, x):
        return self._apply(self._interior_pdf, x, 0.0)

    def hazard(self, x):
        """Hazard f/(1-F), closed form where the family allows it.

        At x = 0 the right limit is returned.
        """
        x = np.asarray(x, dtype=float)
        z = np.where(x > 0, x, np.nextafter(0.0, 1.0))
        out = self._interior_hazard(z)
        out = np.where(x < 0, 0.0, out)
        return out if np.ndim(out) else float(out)

    def quantile(self, q):
        return bisect_quantile(self.cdf, q)

    def _closed_ppf(self, q):
        return None

    def ppf(self, q):
        """Inverse CDF, closed form when the family has one, else bisection."""
        q = np.asarray(q, dtype=float)
        out = self._closed_ppf(q)
        if out is None:
            return self.quantile(q)
        return out if out.ndim else float(out)

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({args})"


@dataclass(frozen=True, repr=False)
class GLFR(BaselineDistribution):
    """Generalized linear failure rate: F(x) = [1 - exp(-(a x + b x^2 / 2))]^d."""

    a: float
    b: float
    d: float
    family: ClassVar[Family] = Family.GLFR

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "b", _positive("b", self.b, allow_zero=True))
        object.__setattr__(self, "d", _positive("d", self.d))

    @property
    def params(self):
        return {"a": self.a, "b": self.b, "d": self.d}

    def _cumhaz(self, x):
        return self.a * x + 0.5 * self.b * x * x

    def _interior_logcdf(self, x):
        return self.d * np.log(-np.expm1(-self._cumhaz(x)))

    def _interior_sf(self, x):
        return -np.expm1(self.d * np.log1p(-np.exp(-self._cumhaz(x))))

    def _interior_pdf(self, x):
        h = self._cumhaz(x)
        u = -np.expm1(-h)
        return self.d * np.exp((self.d - 1) * np.log(u) - h) * (self.a + self.b * x)

    def _closed_ppf(self, q):
        h = -np.log1p(-np.power(q, 1.0 / self.d))
        return 2 * h / (self.a + np.sqrt(self.a ** 2 + 2 * self.b * h))

    def _interior_hazard(self, x):
        h = self._cumhaz(x)
        v = np.exp(-h)
        u = -np.expm1(-h)
        # (1 - u^d) / v tends to d as v -> 0
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(v > _TINY, -np.expm1(self.d * np.log1p(-v)) / np.maximum(v, _TINY),
                             self.d)
        return self.d * np.exp((self.d - 1) * np.log(u)) * (self.a + self.b * x) / ratio


@dataclass(frozen=True, repr=False)
class MOEQL(BaselineDistribution):
    """Marshall-Olkin extended quasi Lindley distribution in the form

        F(x) = (1 - S0(x)) / (1 - (1 - a) d S0(x)),
        S0(x) = (b + 1 + d x) / (b + 1) * exp(-d x).

    ``printed_form=False`` drops the factor d from the denominator, giving the
    standard Marshall-Olkin tilt of the quasi Lindley law. The form is only a
    proper distribution when b >= 0 and the tilt 1 - (1 - a) d is positive;
    other parameters are accepted so that they can be evaluated, with a warning.
    """

    a: float
    b: float
    d: float
    printed_form: bool = True
    family: ClassVar[Family] = Family.MOEQL

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "d", _positive("d", self.d))
        b = float(self.b)
        if not (b > -1 and math.isfinite(b)):
            raise ValueError(f"parameter b must be finite and > -1, got {b}")
        object.__setattr__(self, "b", b)
        if self.tilt_coefficient == 1.0:
            raise ValueError("(1 - a) * d = 1 makes the distribution degenerate at 0")
        if not self.is_proper:
            warnings.warn(f"{self!r} is not a proper distribution function", stacklevel=3)

    @property
    def params(self):
        return {"a": self.a, "b": self.b, "d": self.d}

    @property
    def tilt_coefficient(self) -> float:
        return (1 - self.a) * (self.d if self.printed_form else 1.0)

    @property
    def is_proper(self) -> bool:
        return self.b >= 0 and self.tilt_coefficient < 1

    def _base_sf(self, x):
        return (self.b + 1 + self.d * x) / (self.b + 1) * np.exp(-self.d * x)

    def _interior_logcdf(self, x):
        dx = self.d * x
        num = -np.expm1(-dx) - dx / (self.b + 1) * np.exp(-dx)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.log(num / (1 - self.tilt_coefficient * self._base_sf(x)))

    def cdf(self, x):
        # evaluated directly so that improper parameter sets show their true values
        x = np.asarray(x, dtype=float)
        z = np.maximum(x, 0.0)
        dz = self.d * z
        num = -np.expm1(-dz) - dz / (self.b + 1) * np.exp(-dz)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(x > 0, num / (1 - self.tilt_coefficient * self._base_sf(z)), 0.0)
        return out if out.ndim else float(out)

    def _interior_sf(self, x):
        s0 = self._base_sf(x)
        c = self.tilt_coefficient
        return (1 - c) * s0 / (1 - c * s0)

    def _interior_pdf(self, x):
        s0 = self._base_sf(x)
        c = self.tilt_coefficient
        ds0 = self.d * np.exp(-self.d * x) * (self.b + self.d * x) / (self.b + 1)
        return (1 - c) * ds0 / (1 - c * s0) ** 2

    def _interior_hazard(self, x):
        s0 = self._base_sf(x)
        dx = self.d * x
        return self.d * (self.b + dx) / ((self.b + 1 + dx) * (1 - self.tilt_coefficient * s0))


@dataclass(frozen=True, repr=False)
class BurrPower(BaselineDistribution):
    """F(x) = 1 - (1 + x^c)^(-k)."""

    c: float
    k: float
    family: ClassVar[Family] = Family.BURR_POWER

    def __post_init__(self):
        object.__setattr__(self, "c", _positive("c", self.c))
        object.__setattr__(self, "k", _positive("k", self.k))

    @property
    def params(self):
        return {"c": self.c, "k": self.k}

    def _interior_logcdf(self, x):
        return np.log(-np.expm1(-self.k * np.log1p(x ** self.c)))

    def _interior_sf(self, x):
        return np.exp(-self.k * np.log1p(x ** self.c))

    def _interior_pdf(self, x):
        return self.k * self.c * x ** (self.c - 1) * np.exp(-(self.k + 1) * np.log1p(x ** self.c))

    def _interior_hazard(self, x):
        return self.k * self.c * x ** (self.c - 1) / (1 + x ** self.c)

    def _closed_ppf(self, q):
        return np.power(np.expm1(-np.log1p(-q) / self.k), 1.0 / self.c)


@dataclass(frozen=True, repr=False)
class LomaxPower(BaselineDistribution):
    """F(x) = 1 - (1 + c x)^(-k)."""

    c: float
    k: float
    family: ClassVar[Family] = Family.LOMAX_POWER

    def __post_init__(self):
        object.__setattr__(self, "c", _positive("c", self.c))
        object.__setattr__(self, "k", _positive("k", self.k))

    @property
    def params(self):
        return {"c": self.c, "k": self.k}

    def _interior_logcdf(self, x):
        return np.log(-np.expm1(-self.k * np.log1p(self.c * x)))

    def _interior_sf(self, x):
        return np.exp(-self.k * np.log1p(self.c * x))

    def _interior_pdf(self, x):
        return self.c * self.k * np.exp(-(self.k + 1) * np.log1p(self.c * x))

    def _interior_hazard(self, x):
        return self.c * self.k / (1 + self.c * x)

    def _closed_ppf(self, q):
        return np.expm1(-np.log1p(-q) / self.k) / self.c


@dataclass(frozen=True, repr=False)
class Custom(BaselineDistribution):
    """User-supplied CDF with optional density, survival and hazard callables.

    Missing densities fall back to a centered finite difference of the CDF.
    """

    cdf_fn: Callable
    pdf_fn: Optional[Callable] = None
    sf_fn: Optional[Callable] = None
    hazard_fn: Optional[Callable] = None
    name: str = "custom"
    spec: dict = field(default_factory=dict)
    family: ClassVar[Family] = Family.CUSTOM

    @property
    def params(self):
        return {"name": self.name, **self.spec}

    def _interior_logcdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(np.asarray(self.cdf_fn(x), dtype=float))

    def _interior_sf(self, x):
        if self.sf_fn is not None:
            return np.asarray(self.sf_fn(x), dtype=float)
        return 1.0 - np.asarray(self.cdf_fn(x), dtype=float)

    def _interior_pdf(self, x):
        if self.pdf_fn is not None:
            return np.asarray(self.pdf_fn(x), dtype=float)
        return fd_density(self.cdf, x)

    def _interior_hazard(self, x):
        if self.hazard_fn is not None:
            return np.asarray(self.hazard_fn(x), dtype=float)
        return self._interior_pdf(x) / self._interior_sf(x)

    def __repr__(self):
        return f"Custom({self.name!r}, {self.spec!r})"


def exp_mixture(weights, rates) -> Custom:
    """Finite mixture of exponentials (a hyperexponential law).

    Its hazard falls from the weighted mean rate to the smallest rate, which
    produces windows where C1-C8 hold simultaneously.
    """
    w = np.asarray(weights, dtype=float)
    lam = np.asarray(rates, dtype=float)
    if w.shape != lam.shape or w.ndim != 1 or w.size == 0:
        raise ValueError("weights and rates must be equal-length 1-d sequences")
    if np.any(w <= 0) or np.any(lam <= 0) or not math.isclose(w.sum(), 1.0, abs_tol=1e-12):
        raise ValueError("weights must be positive and sum to 1; rates must be positive")
    lmin = lam.min()

    def sf(x):
        x = np.asarray(x, dtype=float)[..., None]
        return np.sum(w * np.exp(-lam * x), axis=-1)

    def cdf(x):
        x = np.asarray(x, dtype=float)[..., None]
        return np.sum(-w * np.expm1(-lam * x), axis=-1)

    def pdf(x):
        x = np.asarray(x, dtype=float)[..., None]
        return np.sum(w * lam * np.exp(-lam * x), axis=-1)

    def hazard(x):
        x = np.asarray(x, dtype=float)[..., None]
        e = w * np.exp(-(lam - lmin) * x)
        return np.sum(lam * e, axis=-1) / np.sum(e, axis=-1)

    return Custom(cdf, pdf, sf, hazard, name="exp-mixture",
                  spec={"weights": w.tolist(), "rates": lam.tolist()})


def fd_density(cdf: Callable, x):
    """Centered finite-difference density, forward near the origin."""
    x = np.asarray(x, dtype=float)
    h = fd_step(x)
    lo = np.where(x - h > 0, x - h, x)
    hi = x + h
    return (cdf(hi) - cdf(lo)) / (hi - lo)


def bisect_quantile(cdf: Callable, q, tol: float = 1e-12, max_doublings: int = 200):
    """Invert a CDF by bisection on [0, hi] with hi grown from 1 by doubling."""
    q = np.asarray(q, dtype=float)
    if np.any((q <= 0) | (q >= 1)):
        raise ValueError("quantile levels must lie in (0, 1)")
    qq = np.atleast_1d(q).ravel()
    lo = np.zeros_like(qq)
    hi = np.ones_like(qq)
    for _ in range(max_doublings):
        short = cdf(hi) < qq
        if not np.any(short):
            break
        lo = np.where(short, hi, lo)
        hi = np.where(short, 2 * hi, hi)
    else:
        raise BracketError(f"no bracket after {max_doublings} doublings")
    mid = 0.5 * (lo + hi)
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        fm = cdf(mid)
        # run to full precision; the |F - q| <= tol contract follows for continuous F
        done = (fm == qq) | (hi - lo <= 4 * np.finfo(float).eps * np.maximum(hi, _TINY))
        if np.all(done):
            break
        below = fm < qq
        lo = np.where(done | ~below, lo, mid)
        hi = np.where(done | below, hi, mid)
    return mid.reshape(q.shape) if q.ndim else float(mid[0])


def cdf_eval(dist: BaselineDistribution, x):
    return dist.cdf(x)


def hazard_eval(dist: BaselineDistribution, x):
    """Hazard with the saturation guard; requires x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("hazard is evaluated on x >= 0")
    if np.any(dist.sf(x) < SATURATION):
        raise SaturationError("1 - F(x) < 1e-14; hazard is numerically meaningless")
    return dist.hazard(x)


def quantile(dist: BaselineDistribution, q):
    return dist.quantile(q)


# ---------------------------------------------------------------- psi family

class PsiFamily(str, enum.Enum):
    POWER = "Power"
    EXP = "Exp"
    NEG_EXP = "NegExp"
    NEG_LOG = "NegLog"
    ONE_MINUS_POWER = "OneMinusPower"


@dataclass(frozen=True)
class PsiFunction:
    """Strictly monotone transform of occurrence probabilities on (0, 1).

    Power: p**k (k != 0); Exp: exp(c p) (c != 0); NegExp: exp(-p);
    NegLog: -log(p); OneMinusPower: 1 - p**k (k > 0).
    """

    family: PsiFamily
    k: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", PsiFamily(self.family))
        k = float(self.k)
        if not math.isfinite(k) or k == 0:
            raise ValueError("psi parameter must be finite and nonzero")
        if self.family is PsiFamily.ONE_MINUS_POWER and k <= 0:
            raise ValueError("OneMinusPower needs k > 0")
        object.__setattr__(self, "k", k)

    @classmethod
    def power(cls, k):
        return cls(PsiFamily.POWER, k)

    @classmethod
    def exp(cls, c=1.0):
        return cls(PsiFamily.EXP, c)

    @classmethod
    def neg_exp(cls):
        return cls(PsiFamily.NEG_EXP)

    @classmethod
    def neg_log(cls):
        return cls(PsiFamily.NEG_LOG)

    @classmethod
    def one_minus_power(cls, k):
        return cls(PsiFamily.ONE_MINUS_POWER, k)

    @property
    def params(self) -> dict:
        if self.family in (PsiFamily.NEG_EXP, PsiFamily.NEG_LOG):
            return {}
        key = "c" if self.family is PsiFamily.EXP else "k"
        return {key: self.k}

    @property
    def increasing(self) -> bool:
        if self.family is PsiFamily.POWER:
            return self.k > 0
        if self.family is PsiFamily.EXP:
            return self.k > 0
        return False

    def image(self) -> tuple[float, float]:
        """Open interval psi((0, 1))."""
        ends = sorted((self._raw(0.0), self._raw(1.0)))
        return ends[0], ends[1]

    def _raw(self, p):
        with np.errstate(divide="ignore"):
            p = np.asarray(p, dtype=float)
            fam = self.family
            if fam is PsiFamily.POWER:
                return np.power(p, self.k)
            if fam is PsiFamily.EXP:
                return np.exp(self.k * p)
            if fam is PsiFamily.NEG_EXP:
                return np.exp(-p)
            if fam is PsiFamily.NEG_LOG:
                return -np.log(p)
            return 1.0 - np.power(p, self.k)

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        if np.any((p <= 0) | (p >= 1)):
            raise ValueError("psi is defined on (0, 1)")
        out = self._raw(p)
        return out if out.ndim else float(out)

    def inverse(self, w):
        w = np.asarray(w, dtype=float)
        lo, hi = self.image()
        if np.any((w <= lo) | (w >= hi)) or not np.all(np.isfinite(w)):
            raise ValueError(f"value outside the image ({lo}, {hi}) of {self}")
        fam = self.family
        if fam is PsiFamily.POWER:
            out = np.power(w, 1.0 / self.k)
        elif fam is PsiFamily.EXP:
            out = np.log(w) / self.k
        elif fam is PsiFamily.NEG_EXP:
            out = -np.log(w)
        elif fam is PsiFamily.NEG_LOG:
            out = np.exp(-w)
        else:
            out = np.power(1.0 - w, 1.0 / self.k)
        return out if out.ndim else float(out)

    def __str__(self):
        args = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.family.value}({args})"


def psi_eval(psi: PsiFunction, p):
    return psi(p)


def psi_inverse(psi: PsiFunction, w):
    return psi.inverse(w)


PSI_GRID = np.linspace(0.001, 0.999, 1000)


def _combine(label, reports, grid):
    for verdict in (Verdict.VIOLATED, Verdict.INCONCLUSIVE):
        for r in reports:
            if r.verdict is verdict:
                return ConditionReport(label, verdict, r.witness, grid, f"{r.condition}: {r.detail}")
    return ConditionReport(label, Verdict.SATISFIED, grid=grid)


def psi_check(psi: PsiFunction, cond: str) -> ConditionReport:
    """C9: convex and increasing; C10: convex and decreasing."""
    if cond not in ("C9", "C10"):
        raise ValueError(f"psi conditions are C9 and C10, got {cond!r}")
    x = PSI_GRID
    v = psi(x)
    direction = "increasing" if cond == "C9" else "decreasing"
    return _combine(cond, [monotone_report(x, v, direction, direction),
                           convex_report(x, v, "convex")], x)


# ---------------------------------------------------------- hazard conditions

HAZARD_CONDITIONS = ("C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8")

CONDITION_TEXT = {
    "C1": "r(x) decreasing",
    "C2": "x r(x) decreasing",
    "C3": "x^2 r(x) decreasing",
    "C4": "r'(x)/r(x) increasing",
    "C5": "x r(x) convex",
    "C6": "x^3 r(x)^2 decreasing",
    "C7": "x^2 [x r(x)]' increasing",
    "C8": "r(x) convex",
    "C9": "psi convex and increasing",
    "C10": "psi convex and decreasing",
}


def _hazard_derivative(dist, x):
    h = fd_step(x)
    lo = np.where(x - h >= 0, x - h, x)
    hi = x + h
    return (dist.hazard(hi) - dist.hazard(lo)) / (hi - lo)


def check_condition(dist: BaselineDistribution, cond: str, grid) -> ConditionReport:
    """Grid check of one hazard-shape condition C1-C8 on x >= 0."""
    if cond not in HAZARD_CONDITIONS:
        raise ValueError(f"unknown hazard condition {cond!r}")
    x = as_grid(grid)
    if x.size < 50:
        raise ValueError("condition checks need at least 50 grid points")
    if x[0] < 0:
        raise ValueError("condition grids must lie in [0, inf)")
    with np.errstate(all="ignore"):
        r = dist.hazard(x)
        if cond == "C1":
            return monotone_report(x, r, "decreasing", cond)
        if cond == "C2":
            return monotone_report(x, x * r, "decreasing", cond)
        if cond == "C3":
            return monotone_report(x, x * x * r, "decreasing", cond)
        if cond == "C5":
            return convex_report(x, x * r, cond)
        if cond == "C6":
            return monotone_report(x, x ** 3 * r * r, "decreasing", cond)
        if cond == "C8":
            return convex_report(x, r, cond)
        dr = _hazard_derivative(dist, x)
        if cond == "C4":
            return monotone_report(x, dr / r, "increasing", cond)
        return monotone_report(x, x * x * (r + x * dr), "increasing", cond)


def check_conditions(dist: BaselineDistribution, conds, grid) -> dict[str, ConditionReport]:
    return {c: check_condition(dist, c, grid) for c in conds}


def make_baseline(family: str, params: dict) -> BaselineDistribution:
    """Build a baseline from a family name and a parameter mapping."""
    fam = Family(family)
    params = dict(params)
    if fam is Family.GLFR:
        return GLFR(**params)
    if fam is Family.MOEQL:
        return MOEQL(**params)
    if fam is Family.BURR_POWER:
        return BurrPower(**params)
    if fam is Family.LOMAX_POWER:
        return LomaxPower(**params)
    kind = params.pop("name", None)
    if kind != "exp-mixture":
        raise ValueError("Custom baselines from data support only name='exp-mixture'")
    return exp_mixture(**params)


def make_psi(family: str, params: Optional[dict] = None) -> PsiFunction:
    params = dict(params or {})
    fam = PsiFamily(family)
    if fam in (PsiFamily.NEG_EXP, PsiFamily.NEG_LOG):
        if params:
            raise ValueError(f"{fam.value} takes no parameters")
        return PsiFunction(fam)
    key = "c" if fam is PsiFamily.EXP else "k"
    if set(params) != {key}:
        raise ValueError(f"{fam.value} takes exactly the parameter {key!r}")
    return PsiFunction(fam, params[key])


__all__ = [
    "BaselineDistribution", "BracketError", "BurrPower", "CONDITION_TEXT", "Custom",
    "Family", "GLFR", "GridSpec", "HAZARD_CONDITIONS", "LomaxPower", "MOEQL",
    "PsiFamily", "PsiFunction", "SaturationError", "bisect_quantile", "cdf_eval",
    "check_condition", "check_conditions", "exp_mixture", "fd_density", "hazard_eval",
    "make_baseline", "make_psi", "psi_check", "psi_eval", "psi_inverse", "quantile",
]
