"""Theorem catalogue, scenario verification, generators and built-in fixtures."""

from .catalog import CORE_THEOREM_IDS, REGISTRY, THEOREM_IDS, TheoremSpec, get_theorem
from .engine import verify_scenario
from .fixtures import (COUNTEREXAMPLES, FIXTURE_IDS, CounterexampleResult, SignCheck, curve_grid,
                       difference_at, fixture, run_counterexample)
from .generators import (GeneratorExhausted, SweepResult, generate_scenario, mixture_for, sweep,
                         thread_count)
from .scenario import (Hypothesis, HypothesisResult, Scenario, ScenarioShapeError,
                       TheoremReport)

__all__ = [
    "COUNTEREXAMPLES", "CORE_THEOREM_IDS", "CounterexampleResult", "FIXTURE_IDS",
    "GeneratorExhausted", "Hypothesis", "HypothesisResult", "REGISTRY", "Scenario",
    "ScenarioShapeError", "SignCheck", "SweepResult", "THEOREM_IDS", "TheoremReport",
    "TheoremSpec", "curve_grid", "difference_at", "fixture", "generate_scenario", "get_theorem",
    "mixture_for", "run_counterexample", "sweep", "thread_count", "verify_scenario",
]
