"""Catalogue of comparison results: hypothesis lists and conclusion kinds.

Notation in labels: ``u.*`` are the parameters of the first portfolio
(alpha, lambda, theta, p), ``v.*`` those of the second (beta, mu, delta, q).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

from ..baseline import GLFR, MOEQL, PsiFunction
from . import scenario as h


@dataclass(frozen=True)
class TheoremSpec:
    id: str
    conclusion: str          # "st", "rh", "st_reverse" (V dominates) or "kth_reverse"
    hypotheses: tuple
    family: str              # generator family key
    conditions: tuple = ()   # C-conditions on baseline (generators use this)
    psi_condition: Optional[str] = None
    chain_kind: Optional[str] = None
    description: str = ""
    alias_of: Optional[str] = None


def _cond(*cs):
    return tuple(h.condition(c) for c in cs)


def _alpha_le_one():
    return (h.common("alpha"), h.bounded("alpha", 1.0))


def _alpha_one():
    return (h.fixed("alpha", 1.0),)


def _inv(x):
    return "u.inv_theta" if x == "u" else "v.inv_theta"


REGISTRY: dict[str, TheoremSpec] = {}


def _register(spec: TheoremSpec):
    if spec.id in REGISTRY:
        raise RuntimeError(f"duplicate theorem id {spec.id}")
    REGISTRY[spec.id] = spec


_CHAIN_VARIANTS = {
    "n2": ("single", True),
    "n": ("single", False),
    "same": ("same", False),
    "diff": ("different", False),
}

# (rows, matrix class, extra hypotheses, conditions, psi condition, conclusion)
_CHAIN_FAMILIES = {
    "chain-st-{}-i": (("psi_p", "lambda"), "Mn",
                      lambda: (h.common("theta"),) + _alpha_le_one(),
                      ("C1",), "C9", "st"),
    "chain-st-{}-ii": (("psi_p", "inv_theta"), "Mn",
                       lambda: (h.common("lambda"),) + _alpha_le_one(),
                       ("C1",), "C10", "st"),
    "chain-rh-{}-i": (("lambda", "inv_theta"), "Qn",
                      lambda: (h.common("theta"), h.common("p")) + _alpha_one(),
                      ("C2", "C3", "C4", "C5"), None, "rh"),
    "chain-rh-{}-ii": (("lambda", "psi_p"), "Mn",
                       lambda: (h.common("theta"),) + _alpha_one(),
                       ("C1", "C8"), "C9", "rh"),
    "chain-rh-{}-iii": (("inv_theta", "psi_p"), "Qn",
                        lambda: (h.common("lambda"),) + _alpha_one(),
                        ("C2", "C5"), "C9", "rh"),
}

for _pattern, (_rows, _cls, _extra, _conds, _psi, _concl) in _CHAIN_FAMILIES.items():
    for _variant, (_kind, _two) in _CHAIN_VARIANTS.items():
        _tid = _pattern.format(_variant)
        _ru = tuple("u." + r for r in _rows)
        _rv = tuple("v." + r for r in _rows)
        _hyps = _cond(*_conds) + ((h.condition(_psi),) if _psi else ()) + _extra()
        if _two:
            _hyps = (h.size(2),) + _hyps
        _hyps += (h.matrix_class(_ru, _cls), h.chain(_ru, _rv, _kind, _cls))
        _register(TheoremSpec(
            _tid, _concl, _hyps, family=_pattern.split("-{}")[0] + _pattern.split("{}")[1],
            conditions=_conds, psi_condition=_psi, chain_kind=_variant,
            description=f"{_concl} comparison under chain majorization of ({_rows[0]}; {_rows[1]})"))


def _vector(tid, concl, hyps, family, conds=(), psi=None, description=""):
    _register(TheoremSpec(tid, concl, _cond(*conds) + ((h.condition(psi),) if psi else ()) + hyps,
                          family=family, conditions=conds, psi_condition=psi,
                          description=description))


_vector(
    "shape-supermajor-st", "st_reverse",
    (h.common("lambda"), h.common("theta"), h.equal("p"),
     h.opposite_classes(["u.alpha", "v.alpha"], ["u.p"]),
     h.relation("weak_super", "v.alpha", "u.alpha", "u.alpha weakly supermajorizes v.alpha")),
    "shape", description="U <=st V when the shape vector of U is more spread and smaller")

_vector(
    "psi-submajor-st", "st",
    (h.equal("alpha"), h.equal("theta"), h.equal("lambda"),
     h.same_class(["u.theta", "u.lambda", "u.alpha", "u.p", "v.p"]),
     h.relation("weak_sub", "v.psi_p", "u.psi_p", "u.psi_p weakly submajorizes v.psi_p")),
    "psi", psi="C9", description="U >=st V under weak submajorization of psi(p)")

_vector(
    "scale-plarger-st", "st",
    _alpha_le_one() + (h.equal("p"), h.equal("lambda"),
                       h.same_class(["u.p", "u.theta", "v.theta", "u.lambda"]),
                       h.relation("p_larger", "u.inv_theta", "v.inv_theta",
                                  "1/theta is p-larger than 1/delta")),
    "scale", conds=("C2",), description="U >=st V under p-larger ordering of reciprocal scales")

_vector(
    "scale-reciprocal-st", "st",
    _alpha_le_one() + (h.equal("p"), h.equal("lambda"),
                       h.same_class(["u.p", "u.theta", "v.theta", "u.lambda"]),
                       h.relation("reciprocal", "v.inv_theta", "u.inv_theta",
                                  "1/theta reciprocally majorizes 1/delta")),
    "scale", conds=("C3",),
    description="U >=st V under reciprocal majorization of reciprocal scales")

_vector(
    "location-submajor-st", "st",
    _alpha_le_one() + (h.equal("theta"), h.equal("p"),
                       h.same_class(["u.theta", "u.lambda", "v.lambda", "u.p"]),
                       h.relation("weak_sub", "v.lambda", "u.lambda",
                                  "lambda weakly submajorizes mu")),
    "location", conds=("C2",), description="U >=st V under weak submajorization of locations")

_COMBINED_CLASS = ["u.theta", "u.lambda", "v.lambda", "v.theta", "u.p", "v.p"]

_vector(
    "combined-st-i", "st",
    _alpha_le_one() + (h.same_class(_COMBINED_CLASS),
                       h.relation("p_larger", "u.inv_theta", "v.inv_theta",
                                  "1/theta is p-larger than 1/delta"),
                       h.relation("weak_sub", "v.psi_p", "u.psi_p",
                                  "u.psi_p weakly submajorizes v.psi_p"),
                       h.relation("weak_sub", "v.lambda", "u.lambda",
                                  "lambda weakly submajorizes mu")),
    "combined", conds=("C2",), psi="C9",
    description="U >=st V with scale, occurrence and location heterogeneity together")

_vector(
    "combined-st-ii", "st",
    _alpha_le_one() + (h.same_class(_COMBINED_CLASS),
                       h.relation("reciprocal", "v.inv_theta", "u.inv_theta",
                                  "1/theta reciprocally majorizes 1/delta"),
                       h.relation("weak_sub", "v.psi_p", "u.psi_p",
                                  "u.psi_p weakly submajorizes v.psi_p"),
                       h.relation("weak_sub", "v.lambda", "u.lambda",
                                  "lambda weakly submajorizes mu")),
    "combined", conds=("C2", "C3"), psi="C9",
    description="combined comparison with reciprocal majorization of reciprocal scales")

_vector(
    "kth-st", "kth_reverse",
    (h.common("lambda"), h.common("theta"), h.common("p"),
     h.relation("majorized", "v.alpha", "u.alpha", "u.alpha majorizes v.alpha")),
    "kth", description="U_{k:n} <=st V_{k:n} when the shape vector of U majorizes that of V")

_vector(
    "location-rh", "rh",
    _alpha_one() + (h.equal("p"), h.equal("theta"),
                    h.same_class(["u.lambda", "u.theta", "v.lambda", "u.p"]),
                    h.relation("weak_sub", "v.lambda", "u.lambda",
                               "lambda weakly submajorizes mu")),
    "location", conds=("C2", "C3", "C4"), description="U >=rh V under weak submajorization of locations")

_vector(
    "scale-weak-rh", "rh",
    _alpha_one() + (h.equal("p"), h.equal("lambda"),
                    h.same_class(["u.lambda", "u.theta", "v.theta", "u.p"]),
                    h.relation("weak_super", "v.inv_theta", "u.inv_theta",
                               "1/theta weakly supermajorizes 1/delta")),
    "scale", conds=("C2", "C5"), description="U >=rh V under weak supermajorization of reciprocal scales")

_vector(
    "scale-reciprocal-rh", "rh",
    _alpha_one() + (h.equal("p"), h.equal("lambda"),
                    h.same_class(["u.lambda", "u.theta", "v.theta", "u.p"]),
                    h.relation("reciprocal", "v.inv_theta", "u.inv_theta",
                               "1/theta reciprocally majorizes 1/delta")),
    "scale", conds=("C2", "C6", "C7"),
    description="U >=rh V under reciprocal majorization of reciprocal scales")

_vector(
    "componentwise-rh-i", "rh",
    _alpha_one() + (h.componentwise_geq("theta"), h.componentwise_geq("lambda"),
                    h.componentwise_geq("p")),
    "componentwise", conds=("C2",), description="U >=rh V under componentwise dominance, unit shape")

_vector(
    "componentwise-rh-ii", "rh",
    (h.common("alpha"), h.bounded("alpha", 1.0, strict=True),
     h.componentwise_geq("theta"), h.componentwise_geq("lambda"), h.componentwise_geq("p")),
    "componentwise", conds=("C2",), description="U >=rh V under componentwise dominance, shape below one")

_vector(
    "psi-rh", "rh",
    _alpha_le_one() + (h.equal("theta"), h.equal("lambda"),
                       h.same_class(["u.lambda", "u.theta", "u.p", "v.p"]),
                       h.relation("weak_sub", "v.psi_p", "u.psi_p",
                                  "u.psi_p weakly submajorizes v.psi_p")),
    "psi", conds=("C2",), psi="C9", description="U >=rh V under weak submajorization of psi(p)")

_vector(
    "combined-rh-i", "rh",
    _alpha_one() + (h.same_class(_COMBINED_CLASS),
                    h.relation("weak_super", "v.inv_theta", "u.inv_theta",
                               "1/theta weakly supermajorizes 1/delta"),
                    h.relation("weak_sub", "v.psi_p", "u.psi_p",
                               "u.psi_p weakly submajorizes v.psi_p"),
                    h.relation("weak_sub", "v.lambda", "u.lambda",
                               "lambda weakly submajorizes mu")),
    "combined", conds=("C2", "C5"), psi="C9",
    description="U >=rh V with scale, occurrence and location heterogeneity together")

_vector(
    "combined-rh-ii", "rh",
    _alpha_one() + (h.same_class(_COMBINED_CLASS),
                    h.relation("reciprocal", "v.inv_theta", "u.inv_theta",
                               "1/theta reciprocally majorizes 1/delta"),
                    h.relation("weak_sub", "v.psi_p", "u.psi_p",
                               "u.psi_p weakly submajorizes v.psi_p"),
                    h.relation("weak_sub", "v.lambda", "u.lambda",
                               "lambda weakly submajorizes mu")),
    "combined", conds=("C2", "C3", "C6", "C7"), psi="C9",
    description="combined rh comparison with reciprocal majorization of reciprocal scales")


# Named special cases with a fixed baseline or psi.
def _alias(tid, base_id, extra, description):
    base = REGISTRY[base_id]
    _register(TheoremSpec(tid, base.conclusion, base.hypotheses + extra, base.family,
                          base.conditions, base.psi_condition, base.chain_kind,
                          description, alias_of=base_id))


GLFR_REFERENCE = GLFR(a=1.0, b=0.0, d=0.5)
with warnings.catch_warnings():
    warnings.simplefilter("ignore", UserWarning)
    MOEQL_REFERENCE = MOEQL(a=0.1, b=-0.9, d=0.8)

_alias("glfr-scale-plarger-st", "scale-plarger-st", (h.baseline_is(GLFR_REFERENCE),),
       "scale p-larger comparison for the GLFR(1, 0, 0.5) baseline")
_alias("glfr-location-rh", "location-rh", (h.baseline_is(GLFR_REFERENCE),),
       "location rh comparison for the GLFR(1, 0, 0.5) baseline")
_alias("moeql-chain-st-n2", "chain-st-n2-i",
       (h.baseline_is(MOEQL_REFERENCE), h.psi_is(PsiFunction.power(2))),
       "two-risk chain st comparison for the MOEQL baseline and psi(p) = p^2")
_alias("moeql-combined-rh", "combined-rh-i",
       (h.baseline_is(MOEQL_REFERENCE), h.psi_is(PsiFunction.exp(1.0))),
       "combined rh comparison for the MOEQL baseline and psi(p) = exp(p)")

THEOREM_IDS = tuple(REGISTRY)
CORE_THEOREM_IDS = tuple(t for t, s in REGISTRY.items() if s.alias_of is None)


def get_theorem(tid: str) -> TheoremSpec:
    try:
        return REGISTRY[tid]
    except KeyError:
        raise KeyError(f"unknown theorem id {tid!r}; known ids: {', '.join(THEOREM_IDS)}") from None
