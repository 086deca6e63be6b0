"""Multi-outcome Bell functional, quantum violation search and local bounds."""
from .asymptotics import FitModel, closed_form_epr, epr_limit_series, fit_asymptote, optimal_modulus
from .errors import (BellscopeError, DimensionMismatchError, EnumerationCapError, InvalidDimensionError,
                     ParameterCountError, RankDeficientError)
from .functional import (BellBreakdown, CorrelationVector, JointDistribution, LhvBounds, bell_from_distributions,
                         bell_quantity, bell_weights, correlation_vector, lhv_bounds)
from .geometry import OutcomeVectorSet, build_outcome_vectors
from .kernels import BACKEND
from .lhv import DeterministicStrategy, enumerate_lhv_extrema, strategy_bell_value
from .optimize import OptimizationProblem, OptimizationResult, StateSpec, maximize_bell, r_profile
from .quantum import (MeasurementUnitary, SchmidtDiagonalState, UnitaryParams, cglmp_settings, epr_state,
                      joint_probabilities, nopa_truncated_state, parametrize_unitary)

__version__ = "0.1.0"
