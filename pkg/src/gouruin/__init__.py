"""Ruin regimes, bound sets and simulation for generalized Ornstein-Uhlenbeck processes."""

from .asymptotics import (
    Asymptotic,
    AsymptoticClass,
    LimitConditions,
    TailFunction,
    classify,
    derive_K_measure,
    I_integral,
    limit_conditions,
    mean_xi1,
)
from .bounds import (
    BoundsReport,
    DegenerateInfo,
    absorbing_sets,
    classify_combination,
    compute_bounds,
    compute_L,
    compute_Lstar,
    compute_U,
    compute_Ustar,
    delta,
    detect_degenerate,
    g_descriptor,
    g_eval,
    structure_conditions_check,
    upsilon,
)
from .fixtures import FIXTURES, Fixture, get_fixture, verify_examples
from .intervals import ExtInterval, Kind, Span
from .kernels import BACKEND
from .levy import (
    AtomicJumpMeasure,
    BivariateTriplet,
    GaussianCovariance,
    JumpAtom,
    MarginalTriplet,
    ModelError,
    is_subordinator,
    marginal,
)
from .modelio import ModelFileError, dump_model, load_model, loads_model
from .ruin import Regime, RuinRegime, certain_ruin_threshold, classify_ruin, z_infinity_support
from .simulate import (
    SimConfig,
    SimulationError,
    estimate_extremes,
    estimate_ruin,
    estimate_ruin_curve,
    run_batch,
    simulate_path,
    verify_barrier,
)
from .thresholds import ThetaProfile, theta, theta_profile, theta_prime

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
