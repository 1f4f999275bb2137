"""Distinguishability limits for hypotheses about open quantum system dynamics."""

from .analytic import GaussianScenario, GridOracleConfig, gaussian_grid_oracle, gaussian_overlap
from .bounds import (
    error_from_overlap,
    fig2_bundle,
    helstrom_error,
    no_jump_evolution,
)
from .errors import IntegrationError, NumericalError, QhypoError, ValidationError
from .estimation import GaussianFamily, ParametrizedScenario, cramer_rao, fisher_information
from .model import (
    Hypothesis,
    HypothesisPair,
    TimeDependentHamiltonian,
    TwoLevelParams,
    build_two_level,
    two_level_pair,
    validate_pair,
)
from .numerics import OdeSettings
from .spectral import convergence_rate, scan_rate_over_rabi, vectorize_two_sided
from .trajectories import EnsembleConfig, build_augmented, run_ensemble
from .twosided import solve_lindblad, solve_two_sided, two_sided_derivative

__version__ = "0.1.0"
