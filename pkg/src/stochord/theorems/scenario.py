"""Scenario bundles, hypothesis evaluation and theorem reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .._grid import ConditionReport, GridSpec, Spacing, Verdict
from ..baseline import (HAZARD_CONDITIONS, BaselineDistribution, PsiFunction, check_condition,
                        psi_check)
from ..majorization import ParamMatrix, TTransform
from ..orders import OrderVerdict
from ..portfolio import Portfolio, default_grid

CONDITION_POINTS = 400
EQ_TOL = 1e-12


class ScenarioShapeError(ValueError):
    """The scenario lacks something the theorem needs (psi, transforms, k, ...)."""


@dataclass(frozen=True, eq=False)
class Scenario:
    id: str
    theorem: str
    baseline: BaselineDistribution
    portfolio_u: Portfolio
    portfolio_v: Portfolio
    psi: Optional[PsiFunction] = None
    transforms: tuple[TTransform, ...] = ()
    grid: Optional[GridSpec] = None
    k: Optional[int] = None

    def __post_init__(self):
        if self.portfolio_u.n != self.portfolio_v.n:
            raise ValueError("the two portfolios must have the same number of risks")
        if self.portfolio_u.baseline is not self.baseline or self.portfolio_v.baseline is not self.baseline:
            raise ValueError("both portfolios must use the scenario baseline")
        object.__setattr__(self, "transforms", tuple(self.transforms))

    @property
    def n(self) -> int:
        return self.portfolio_u.n

    def evaluation_grid(self) -> np.ndarray:
        grid = self.grid if self.grid is not None else default_grid(self.portfolio_u, self.portfolio_v)
        return grid.values()

    def vector(self, name: str) -> np.ndarray:
        """Parameter vector by name, e.g. ``u.lambda`` or ``v.psi_p``."""
        side, _, key = name.partition(".")
        if side not in ("u", "v"):
            raise KeyError(name)
        pf = self.portfolio_u if side == "u" else self.portfolio_v
        if key == "alpha":
            return pf.alpha
        if key == "lambda":
            return pf.lam
        if key == "theta":
            return pf.theta
        if key == "inv_theta":
            return 1.0 / pf.theta
        if key == "p":
            return pf.p
        if key == "psi_p":
            if self.psi is None:
                raise ScenarioShapeError("this theorem needs a psi function")
            return np.asarray(self.psi(pf.p), dtype=float)
        raise KeyError(name)

    def matrix(self, rows: Sequence[str]) -> ParamMatrix:
        return ParamMatrix.from_rows(self.vector(rows[0]), self.vector(rows[1]))

    def argument_window(self) -> tuple[float, float]:
        """Range of baseline arguments (t - location) / scale reached on the
        evaluation grid by any location and scale between the extremes of
        either portfolio."""
        t = self.evaluation_grid()
        locs = np.concatenate([self.portfolio_u.lam, self.portfolio_v.lam])
        scales = np.concatenate([self.portfolio_u.theta, self.portfolio_v.theta])
        hi = (t[-1] - locs.min()) / scales.min()
        lo = (t[0] - locs.max()) / scales.max()
        if lo <= 0:
            lo = min((t[0] - loc) / s for loc, s in zip(locs, scales) if t[0] > loc) \
                if np.any(t[0] > locs) else hi * 1e-9
        return float(lo), float(hi)

    def condition_grid(self) -> np.ndarray:
        lo, hi = self.argument_window()
        if hi <= lo:
            hi = lo * (1 + 1e-6)
        return np.geomspace(lo, hi, CONDITION_POINTS)


@dataclass(frozen=True)
class HypothesisResult:
    label: str
    passed: bool
    detail: str = ""
    report: Optional[ConditionReport] = None


@dataclass(frozen=True)
class Hypothesis:
    label: str
    check: Callable[[Scenario], HypothesisResult]

    def __call__(self, s: Scenario) -> HypothesisResult:
        return self.check(s)


@dataclass(frozen=True)
class TheoremReport:
    scenario_id: str
    theorem: str
    hypothesis_results: tuple[HypothesisResult, ...]
    applicable: bool
    conclusion: OrderVerdict
    consistent: bool
    cross_checks: dict = field(default_factory=dict)

    @property
    def hierarchy_ok(self) -> bool:
        return (self.cross_checks.get("rh_implies_st", True)
                and self.cross_checks.get("rh_implies_st_reverse", True))

    def lines(self) -> list[str]:
        out = [f"scenario {self.scenario_id} under {self.theorem}"]
        for h in self.hypothesis_results:
            mark = "ok " if h.passed else "NO "
            out.append(f"  [{mark}] {h.label}" + (f"  ({h.detail})" if h.detail else ""))
        out.append(f"  applicable: {self.applicable}")
        out.append(f"  conclusion: {self.conclusion.describe()}")
        for key, value in self.cross_checks.items():
            out.append(f"  {key}: {value}")
        out.append(f"  consistent: {self.consistent}")
        return out

    def to_dict(self) -> dict:
        c = self.conclusion
        return {
            "scenario": self.scenario_id,
            "theorem": self.theorem,
            "hypotheses": [{"label": h.label, "passed": h.passed, "detail": h.detail}
                           for h in self.hypothesis_results],
            "applicable": self.applicable,
            "conclusion": {"relation": c.relation, "direction": c.direction,
                           "status": c.status.value, "witness": c.witness, "margin": c.margin},
            "cross_checks": dict(self.cross_checks),
            "consistent": self.consistent,
        }


# ------------------------------------------------------------ hypothesis kit

def condition(cond: str) -> Hypothesis:
    def run(s: Scenario) -> HypothesisResult:
        if cond in HAZARD_CONDITIONS:
            rep = check_condition(s.baseline, cond, s.condition_grid())
            lo, hi = s.argument_window()
            where = f"x in [{lo:.4g}, {hi:.4g}]"
        else:
            if s.psi is None:
                raise ScenarioShapeError(f"{cond} needs a psi function")
            rep = psi_check(s.psi, cond)
            where = str(s.psi)
        detail = f"{rep.verdict.value} on {where}"
        if rep.witness is not None and rep.verdict is not Verdict.SATISFIED:
            detail += f", witness {rep.witness:.6g}"
        return HypothesisResult(cond, rep.verdict is Verdict.SATISFIED, detail, rep)
    return Hypothesis(cond, run)


def equal(key: str) -> Hypothesis:
    def run(s):
        a, b = s.vector("u." + key), s.vector("v." + key)
        ok = bool(np.all(np.abs(a - b) <= EQ_TOL * np.maximum(1.0, np.abs(a))))
        return HypothesisResult(f"u.{key} = v.{key}", ok)
    return Hypothesis(f"u.{key} = v.{key}", run)


def common(key: str) -> Hypothesis:
    """Both portfolios carry the same constant vector for ``key``."""
    def run(s):
        a, b = s.vector("u." + key), s.vector("v." + key)
        ref = a[0]
        ok = bool(np.all(np.abs(np.concatenate([a, b]) - ref) <= EQ_TOL * max(1.0, abs(ref))))
        return HypothesisResult(f"{key} common scalar in both portfolios", ok)
    return Hypothesis(f"{key} common scalar", run)


def bounded(key: str, upper: float, strict: bool = False) -> Hypothesis:
    sym = "<" if strict else "<="
    label = f"{key} {sym} {upper:g}"

    def run(s):
        vals = np.concatenate([s.vector("u." + key), s.vector("v." + key)])
        ok = bool(np.all(vals < upper) if strict else np.all(vals <= upper + EQ_TOL))
        return HypothesisResult(label, ok)
    return Hypothesis(label, run)


def fixed(key: str, value: float) -> Hypothesis:
    label = f"{key} = {value:g} in both portfolios"

    def run(s):
        vals = np.concatenate([s.vector("u." + key), s.vector("v." + key)])
        return HypothesisResult(label, bool(np.all(np.abs(vals - value) <= EQ_TOL)))
    return Hypothesis(label, run)


def size(n: int) -> Hypothesis:
    return Hypothesis(f"n = {n}", lambda s: HypothesisResult(f"n = {n}", s.n == n))


def _in(v, cls):
    from ..majorization import in_class
    return in_class(v, cls)


def same_class(keys: Sequence[str]) -> Hypothesis:
    """All listed vectors in E+, or all in D+."""
    label = f"{', '.join(keys)} all in E+ or all in D+"

    def run(s):
        vecs = [s.vector(k) for k in keys]
        for cls in ("Eplus", "Dplus"):
            if all(_in(v, cls) for v in vecs):
                return HypothesisResult(label, True, cls)
        return HypothesisResult(label, False)
    return Hypothesis(label, run)


def opposite_classes(first: Sequence[str], second: Sequence[str]) -> Hypothesis:
    """``first`` in E+ and ``second`` in D+, or the other way round."""
    label = f"{', '.join(first)} in E+ and {', '.join(second)} in D+ (or reversed)"

    def run(s):
        a = [s.vector(k) for k in first]
        b = [s.vector(k) for k in second]
        for c1, c2 in (("Eplus", "Dplus"), ("Dplus", "Eplus")):
            if all(_in(v, c1) for v in a) and all(_in(v, c2) for v in b):
                return HypothesisResult(label, True, f"{c1}/{c2}")
        return HypothesisResult(label, False)
    return Hypothesis(label, run)


def relation(name: str, x: str, y: str, text: str) -> Hypothesis:
    from ..majorization import RELATIONS

    def run(s):
        ok = RELATIONS[name](s.vector(x), s.vector(y))
        return HypothesisResult(text, ok, f"{name}({x}, {y})")
    return Hypothesis(text, run)


def componentwise_geq(key: str) -> Hypothesis:
    label = f"u.{key} >= v.{key} componentwise"

    def run(s):
        a, b = s.vector("u." + key), s.vector("v." + key)
        return HypothesisResult(label, bool(np.all(a >= b - EQ_TOL)))
    return Hypothesis(label, run)


def matrix_class(rows: Sequence[str], cls: str) -> Hypothesis:
    from ..majorization import matrix_in_class
    label = f"({rows[0]}; {rows[1]}) in {cls}"
    return Hypothesis(label, lambda s: HypothesisResult(label, matrix_in_class(s.matrix(rows), cls)))


def chain(rows_u: Sequence[str], rows_v: Sequence[str], kind: str, cls: str) -> Hypothesis:
    """V-matrix equals the U-matrix times the scenario's T-transforms.

    kind: 'single' (one transform), 'same' (one or more sharing one pair of
    columns) or 'different' (two or more, not all on the same pair, every
    intermediate matrix still in ``cls``).
    """
    from ..majorization import chain_apply, chain_path, matrix_in_class
    label = f"({rows_v[0]}; {rows_v[1]}) = ({rows_u[0]}; {rows_u[1]}) T-chain [{kind}]"

    def run(s):
        ts = s.transforms
        if not ts:
            raise ScenarioShapeError("chain theorems need at least one T-transform")
        structures = {t.structure for t in ts}
        if kind == "single" and len(ts) != 1:
            return HypothesisResult(label, False, f"{len(ts)} transforms given, need exactly 1")
        if kind == "same" and len(structures) != 1:
            return HypothesisResult(label, False, "transforms act on different column pairs")
        if kind == "different":
            if len(ts) < 2 or len(structures) < 2:
                return HypothesisResult(label, False, "need >= 2 transforms on different pairs")
        cu, cv = s.matrix(rows_u), s.matrix(rows_v)
        if any(t.n != s.n for t in ts):
            return HypothesisResult(label, False, "transform dimension mismatch")
        if not chain_apply(cu, ts).allclose(cv, 1e-9):
            return HypothesisResult(label, False, "V-matrix differs from the transformed U-matrix")
        if kind == "different":
            inner = chain_path(cu, ts)[1:-1]
            if not all(matrix_in_class(m, cls) for m in inner):
                return HypothesisResult(label, False, f"an intermediate matrix leaves {cls}")
        return HypothesisResult(label, True, f"{len(ts)} transform(s)")
    return Hypothesis(label, run)


def baseline_is(expected: BaselineDistribution) -> Hypothesis:
    label = f"baseline is {expected!r}"

    def run(s):
        b = s.baseline
        ok = type(b) is type(expected) and all(
            np.isclose(b.params[k], v, rtol=0, atol=1e-12) for k, v in expected.params.items())
        return HypothesisResult(label, bool(ok))
    return Hypothesis(label, run)


def psi_is(expected: PsiFunction) -> Hypothesis:
    label = f"psi is {expected}"
    return Hypothesis(label, lambda s: HypothesisResult(label, s.psi == expected))


def spaced(lo, hi, points=2000, spacing=Spacing.LINEAR) -> GridSpec:
    return GridSpec(float(lo), float(hi), points, spacing)
