"""Three-mode continuous-variable entanglement at desk scale.

Build the entangled state produced by mixing three squeezed vacua on a
tritter, degrade it with loss and phase-jitter channels, and test full
inseparability through the sum-variance criteria, with seeded homodyne
sampling and a parameter fitter that ties measured noise levels back to
effective network parameters.
"""

from .channels import ChannelSpec, apply_channel, loss, phase_jitter, visibility_to_efficiency
from .criteria import (
    FULLY_INSEPARABLE,
    UNDETERMINED,
    UNIT_GAINS,
    CriteriaReport,
    GainSet,
    db_to_variance,
    evaluate_criteria,
    inequality_combinations,
    momentum_sum,
    noise_db,
    numeric_optimal_gain,
    optimal_gain,
    optimal_gain_set,
    x_difference,
)
from .fitting import FitResult, FitTargets, SearchSpace, fit, predict_targets
from .gaussian import (
    DEFAULT_TOLERANCES,
    GaussianState,
    PhysicalityReport,
    QuadCombination,
    SymplecticTransform,
    Tolerances,
    apply,
    beamsplitter,
    check_physicality,
    combination_variance,
    phase_rotation,
    squeezer,
    symplectic_form,
    vacuum,
    vacuum_reference,
)
from .network import NetworkParams, build_tritter, closed_form_ghz_covariance, ghz_state
from .sampling import (
    MeasurementSeries,
    SampleBatch,
    VarianceEstimate,
    derive_seed,
    estimate_variance,
    format_combination,
    measurement_series,
    sample_combination,
    state_digest,
    write_batch_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelSpec",
    "apply_channel",
    "loss",
    "phase_jitter",
    "visibility_to_efficiency",
    "FULLY_INSEPARABLE",
    "UNDETERMINED",
    "UNIT_GAINS",
    "CriteriaReport",
    "GainSet",
    "db_to_variance",
    "evaluate_criteria",
    "inequality_combinations",
    "momentum_sum",
    "noise_db",
    "numeric_optimal_gain",
    "optimal_gain",
    "optimal_gain_set",
    "x_difference",
    "FitResult",
    "FitTargets",
    "SearchSpace",
    "fit",
    "predict_targets",
    "DEFAULT_TOLERANCES",
    "GaussianState",
    "PhysicalityReport",
    "QuadCombination",
    "SymplecticTransform",
    "Tolerances",
    "apply",
    "beamsplitter",
    "check_physicality",
    "combination_variance",
    "phase_rotation",
    "squeezer",
    "symplectic_form",
    "vacuum",
    "vacuum_reference",
    "NetworkParams",
    "build_tritter",
    "closed_form_ghz_covariance",
    "ghz_state",
    "MeasurementSeries",
    "SampleBatch",
    "VarianceEstimate",
    "derive_seed",
    "estimate_variance",
    "format_combination",
    "measurement_series",
    "sample_combination",
    "state_digest",
    "write_batch_csv",
]
