"""Front tracking for 1-D hyperbolic systems and a decay check for positive waves.

Positive wave measures of a front-tracking solution are rearranged into odd
concave profiles and compared with an exactly evolved Burgers solution that
receives an impulse each time the interaction potential drops.
"""

from __future__ import annotations

from .burgers import apply_impulse, burgers_evolve, profile_from_measure, solve_impulsive
from .errors import BudgetExceeded, NoConvergence, NonAdmissibleState, ScenarioError, WaveDecayError
from .fronts import (
    BumpTest,
    EventLog,
    FrontState,
    Trajectory,
    evolve,
    front_state_at,
    init_approx,
    solution_at,
    weak_residual,
)
from .measure import Interval, LineMeasure, negative_part, positive_part, restrict, sup_mass, total_variation_measure
from .rearrangement import (
    OddConcaveProfile,
    odd_rearrangement,
    precedes,
    profile_leq,
    shift_profile,
    symmetric_rearrange,
)
from .scenario import Scenario, load_scenario
from .systems import (
    AdmissibleRegion,
    HyperbolicSystem,
    RiemannFan,
    builtin_burgers,
    builtin_p_system,
    riemann_solve,
)
from .verify import DecayReport, oleinik_check, positive_wave_density, simulate, sweep_kappa, verify_decay
from .waves import (
    PiecewiseConstantFn,
    WaveDecomposition,
    glimm_Q,
    glimm_upsilon,
    glimm_V,
    wave_measures,
)

__all__ = [
    "AdmissibleRegion", "BudgetExceeded", "BumpTest", "DecayReport", "EventLog", "FrontState",
    "HyperbolicSystem", "Interval", "LineMeasure", "NoConvergence", "NonAdmissibleState",
    "OddConcaveProfile", "PiecewiseConstantFn", "RiemannFan", "Scenario", "ScenarioError",
    "Trajectory", "WaveDecayError", "WaveDecomposition", "apply_impulse", "builtin_burgers",
    "builtin_p_system", "burgers_evolve", "evolve", "front_state_at", "glimm_Q", "glimm_V",
    "glimm_upsilon", "init_approx", "load_scenario", "negative_part", "odd_rearrangement",
    "oleinik_check", "positive_part", "positive_wave_density", "precedes", "profile_from_measure",
    "profile_leq", "restrict", "riemann_solve", "shift_profile", "simulate", "solution_at", "solve_impulsive",
    "sup_mass", "sweep_kappa", "symmetric_rearrange", "total_variation_measure", "verify_decay",
    "wave_measures", "weak_residual",
]
