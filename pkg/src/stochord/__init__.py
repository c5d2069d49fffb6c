"""Stochastic comparisons of largest claim amounts from heterogeneous
portfolios whose risks follow exponentiated location-scale laws.

Subpackages and modules:

- ``baseline``: baseline distributions, psi transforms, hazard-shape checks
- ``portfolio``: largest-claim and order-statistic CDFs, sampling
- ``majorization``: vector preorders, matrix classes, T-transforms
- ``orders``: grid checks of the usual stochastic and reversed hazard orders
- ``theorems``: hypothesis checking, generators, built-in reference scenarios
- ``cli``: command-line front end
"""

from ._grid import ConditionReport, GridSpec, Spacing, Verdict
from .baseline import (GLFR, MOEQL, BurrPower, Custom, LomaxPower, PsiFunction, check_condition,
                       exp_mixture, make_baseline, make_psi, psi_check)
from .majorization import (ParamMatrix, TTransform, chain_apply, is_majorized, is_p_larger,
                           is_reciprocal, is_weak_sub, is_weak_super, matrix_in_class,
                           solve_single_t)
from .orders import OrderVerdict, Status, check_rh, check_st
from .portfolio import Portfolio, kth_cdf, max_cdf, max_rhr, sample_max

__version__ = "0.1.0"

__all__ = [
    "BurrPower", "ConditionReport", "Custom", "GLFR", "GridSpec", "LomaxPower", "MOEQL",
    "OrderVerdict", "ParamMatrix", "Portfolio", "PsiFunction", "Spacing", "Status", "TTransform",
    "Verdict", "chain_apply", "check_condition", "check_rh", "check_st", "exp_mixture",
    "is_majorized", "is_p_larger", "is_reciprocal", "is_weak_sub", "is_weak_super", "kth_cdf",
    "make_baseline", "make_psi", "matrix_in_class", "max_cdf", "max_rhr", "psi_check",
    "sample_max", "solve_single_t",
]
