"""Run a theorem's hypothesis list on a scenario, then check its conclusion."""

from __future__ import annotations

import numpy as np

from ..orders import Status, check_rh, check_st, curve_dominance
from ..portfolio import DomainError, kth_cdf, saturating_grid
from .catalog import get_theorem
from .scenario import Scenario, ScenarioShapeError, TheoremReport


def _conclusion(spec, s: Scenario, t: np.ndarray):
    u, v = s.portfolio_u, s.portfolio_v
    extra = {}
    if spec.conclusion == "st":
        return check_st(u, v, t), extra
    if spec.conclusion == "st_reverse":
        verdict = check_st(v, u, t)
        return _renamed(verdict, "U <=st V"), extra
    if spec.conclusion == "kth_reverse":
        k = s.k if s.k is not None else s.n
        if not 1 <= k <= s.n:
            raise ScenarioShapeError(f"k={k} outside 1..{s.n}")
        verdict = curve_dominance(t, kth_cdf(v, k, t), kth_cdf(u, k, t), f"U_{k}:n <=st V_{k}:n")
        return verdict, {"k": k}
    if spec.conclusion == "rh":
        pointwise = check_rh(u, v, t, "rhr_compare")
        ratio = check_rh(u, v, t, "ratio_monotone")
        extra["rh_ratio_route"] = ratio.status.value
        extra["routes_agree"] = pointwise.status is ratio.status
        extra["st_on_grid"] = check_st(u, v, t).status.value
        return pointwise, extra
    raise ValueError(f"unknown conclusion kind {spec.conclusion!r}")


def hierarchy_check(u, v) -> dict:
    """rh dominance implies st dominance, in both directions.

    Checked on a grid running into the saturated upper tail: a truncated
    grid cannot carry the implication, because a CDF ratio that increases
    on a window need not stay below one there.
    """
    out = {}
    try:
        t = saturating_grid(u, v).values()
    except (ArithmeticError, RuntimeError, ValueError):
        return out
    for name, a, b in (("rh_implies_st", u, v), ("rh_implies_st_reverse", v, u)):
        try:
            rh = check_rh(a, b, t)
        except DomainError:
            continue
        out[name] = not rh.holds or check_st(a, b, t).holds
    return out


def _renamed(v, direction):
    return type(v)(v.relation, direction, v.status, v.witness, v.margin, v.method, v.excluded)


def verify_scenario(s: Scenario, theorem: str | None = None) -> TheoremReport:
    """Evaluate every hypothesis of the theorem, then the numerical conclusion.

    ``theorem`` overrides the scenario's own theorem id.
    """
    tid = theorem or s.theorem
    spec = get_theorem(tid)
    if spec.chain_kind is None and s.transforms:
        raise ScenarioShapeError(f"{tid} takes no T-transforms")
    if spec.conclusion != "kth_reverse" and s.k is not None:
        raise ScenarioShapeError(f"{tid} takes no order-statistic index k")
    results = []
    for hyp in spec.hypotheses:
        try:
            results.append(hyp(s))
        except (ValueError, ArithmeticError) as exc:
            if isinstance(exc, ScenarioShapeError):
                raise
            from .scenario import HypothesisResult
            results.append(HypothesisResult(hyp.label, False, f"evaluation error: {exc}"))
    applicable = all(r.passed for r in results)
    t = s.evaluation_grid()
    with np.errstate(all="ignore"):
        verdict, extra = _conclusion(spec, s, t)
        extra.update(hierarchy_check(s.portfolio_u, s.portfolio_v))
    consistent = not (applicable and verdict.status is Status.FAILS)
    return TheoremReport(s.id, tid, tuple(results), applicable, verdict, consistent, extra)
