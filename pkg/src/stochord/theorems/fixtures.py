"""Built-in reference scenarios: three counterexamples and two illustrative scenarios."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._grid import GridSpec, Spacing
from ..baseline import GLFR, MOEQL, BurrPower, LomaxPower, PsiFunction
from ..majorization import TTransform
from ..portfolio import Portfolio, max_cdf, max_rhr
from .engine import verify_scenario
from .scenario import Scenario, TheoremReport

COUNTEREXAMPLES = ("CE31", "CE32", "CE33")
FIXTURE_IDS = ("CE31", "CE32", "CE33", "EX34", "EX52")

# abscissa -> expected sign of the difference curve
SIGN_CHECKS = {
    "CE31": ((1.5, +1), (1.6, -1)),
    "CE32": ((1.6, -1), (1.7, +1)),
    "CE33": ((1.7, +1), (1.8, -1)),
}
CURVE_KIND = {"CE31": "cdf", "CE32": "cdf", "CE33": "rhr"}
CURVE_WINDOW = (0.905, 4.0, 2000)


def _two(baseline, alpha, lam, theta, p):
    return Portfolio(baseline, np.broadcast_to(alpha, 2), np.broadcast_to(lam, 2),
                     np.broadcast_to(theta, 2), p)


def _build(fid: str) -> Scenario:
    if fid == "CE31":
        b = BurrPower(c=5.0, k=4.0)
        u = _two(b, 0.01, 0.9, 1 / np.array([0.7, 0.6]), np.cbrt([0.2, 0.5]))
        v = _two(b, 0.01, 0.9, 1 / np.array([0.66, 0.64]), np.cbrt([0.32, 0.38]))
        return Scenario("CE31", "chain-st-n2-ii", b, u, v, PsiFunction.one_minus_power(3),
                        (TTransform(0.6, 0, 1, 2),), GridSpec(0.905, 4.0, 2000, Spacing.LINEAR))
    if fid == "CE32":
        b = BurrPower(c=5.0, k=4.0)
        u = _two(b, 0.01, 0.9, 1 / np.array([0.5, 0.3]), np.exp(-np.array([0.23, 0.69])))
        v = _two(b, 0.01, 0.9, 1 / np.array([0.32, 0.48]), np.exp(-np.array([0.644, 0.276])))
        return Scenario("CE32", "chain-st-n2-ii", b, u, v, PsiFunction.neg_log(),
                        (TTransform(0.1, 0, 1, 2),), GridSpec(0.905, 4.0, 2000, Spacing.LINEAR))
    if fid == "CE33":
        b = LomaxPower(c=5.0, k=0.2)
        u = _two(b, 1.0, [0.9, 0.6], 0.5, np.sqrt([0.2, 0.3]))
        v = _two(b, 1.0, [0.81, 0.69], 0.5, np.sqrt([0.23, 0.27]))
        return Scenario("CE33", "chain-rh-n2-ii", b, u, v, PsiFunction.one_minus_power(2),
                        (TTransform(0.7, 0, 1, 2),), GridSpec(0.905, 4.0, 2000, Spacing.LINEAR))
    if fid == "EX34":
        b = GLFR(a=1.0, b=0.0, d=0.5)
        p = [0.2, 0.8, 0.9]
        u = Portfolio(b, [1.0] * 3, [1.0, 2.5, 5.0], [2.0, 5.0, 9.0], p)
        v = Portfolio(b, [1.0] * 3, [0.5, 2.0, 3.0], [2.0, 5.0, 9.0], p)
        return Scenario("EX34", "glfr-location-rh", b, u, v)
    if fid == "EX52":
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            b = MOEQL(a=0.1, b=-0.9, d=0.8)
        u = _two(b, 0.52, [5.0, 6.1], 0.01, np.sqrt([0.2, 0.5]))
        v = _two(b, 0.52, [5.44, 5.66], 0.01, np.sqrt([0.32, 0.38]))
        return Scenario("EX52", "moeql-chain-st-n2", b, u, v, PsiFunction.power(2),
                        (TTransform(0.6, 0, 1, 2),), GridSpec(6.1 + 1e-6, 6.4, 2000, Spacing.LINEAR))
    raise KeyError(f"unknown fixture {fid!r}; known: {', '.join(FIXTURE_IDS)}")


def fixture(fid: str) -> Scenario:
    """A fresh copy of a built-in scenario."""
    return _build(fid)


@dataclass(frozen=True)
class SignCheck:
    t: float
    value: float
    expected: int

    @property
    def ok(self) -> bool:
        return np.sign(self.value) == self.expected


@dataclass(frozen=True)
class CounterexampleResult:
    report: TheoremReport
    t: np.ndarray
    F_u: np.ndarray
    F_v: np.ndarray
    rhr_u: np.ndarray
    rhr_v: np.ndarray
    difference: np.ndarray      # F_u - F_v, or rhr_u - rhr_v for rh counterexamples
    signs: tuple[SignCheck, ...]

    @property
    def signs_ok(self) -> bool:
        return all(c.ok for c in self.signs)


def curve_grid(fid: str) -> np.ndarray:
    lo, hi, n = CURVE_WINDOW
    marks = [t for t, _ in SIGN_CHECKS.get(fid, ())]
    return np.union1d(np.linspace(lo, hi, n), marks)


def difference_at(fid: str, t) -> np.ndarray:
    s = fixture(fid)
    t = np.asarray(t, dtype=float)
    if CURVE_KIND[fid] == "rhr":
        return max_rhr(s.portfolio_u, t) - max_rhr(s.portfolio_v, t)
    return max_cdf(s.portfolio_u, t) - max_cdf(s.portfolio_v, t)


def run_counterexample(fid: str) -> CounterexampleResult:
    if fid not in COUNTEREXAMPLES:
        raise KeyError(f"unknown counterexample {fid!r}; known: {', '.join(COUNTEREXAMPLES)}")
    s = fixture(fid)
    report = verify_scenario(s)
    t = curve_grid(fid)
    fu, fv = max_cdf(s.portfolio_u, t), max_cdf(s.portfolio_v, t)
    ru, rv = max_rhr(s.portfolio_u, t), max_rhr(s.portfolio_v, t)
    diff = ru - rv if CURVE_KIND[fid] == "rhr" else fu - fv
    signs = tuple(SignCheck(x, float(diff[np.searchsorted(t, x)]), sign)
                  for x, sign in SIGN_CHECKS[fid])
    return CounterexampleResult(report, t, fu, fv, ru, rv, diff, signs)
