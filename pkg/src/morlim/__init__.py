"""morlim: frequency-limited model order reduction for LTI state-space models.

Reduction methods that are pseudo-optimal in a band-limited H2 sense
(matching a rational Krylov interpolant so the reduced model inherits
mirrored poles, an explicit band-limited Gramian, and an exact energy
identity), together with frequency-limited balanced truncation, modal
truncation, swing-equation test fixtures, and a quadrature-based
verification harness that certifies every claimed identity.
"""

from .errors import (
    BadInterpolationSet,
    BranchCutEigenvalue,
    DefectiveEigenvalue,
    DimensionMismatch,
    IndefiniteGramian,
    MorlimError,
    NoConvergence,
    NotAnEigenvalue,
    NotAntistable,
    NotStable,
    NotSymmetric,
    NumericalFailure,
    RankDeficientBasis,
    RankDeficientGramians,
    ShiftIsPole,
    SingularShift,
    SpectraOverlap,
    UncontrollablePair,
    UnobservablePair,
    UnstableMode,
)
from .ltimodel import (
    AugmentedSystem,
    CrossGramians,
    GramianPair,
    StateSpace,
    augment_input,
    augment_output,
    cross_gramians,
    error_system,
    freq_response_samples,
    gramians_limited,
    gramians_unlimited,
    h2_norm,
    h2_norm_squared,
    h2w_norm,
    h2w_norm_squared,
    is_stable,
    poles,
    transfer_eval,
)
from .matfun import (
    FrequencyBand,
    compute_F,
    compute_F_antistable,
    matrix_log,
    solve_lyapunov,
    solve_sylvester,
)
from .powergrid import (
    Equilibrium,
    MachineParams,
    NetworkModel,
    electrical_power,
    linearize_classical,
    solve_equilibrium,
    swing_rhs,
    synth_benchmark,
    synth_network,
)
from .reduction import (
    InterpolationSet,
    ReductionReport,
    SylvesterData,
    augment_input_data,
    augment_output_data,
    default_directions,
    flbt,
    flpork,
    mirror_interpolation,
    modal_truncation,
    oflpork,
    pork,
    real_input_data,
    real_output_data,
    select_modes,
)
from .verify import (
    Certificate,
    NegativeControlTrial,
    ResidueForm,
    all_passed,
    any_failed,
    any_inconclusive,
    band_weight_scalar,
    certify,
    certify_flpork,
    certify_oflpork,
    certify_pork,
    negative_controls,
    oracle_F,
    oracle_gramian,
    oracle_h2w,
    perturb_matrix,
    to_residue_form,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentedSystem", "BadInterpolationSet", "BranchCutEigenvalue",
    "Certificate", "CrossGramians", "DefectiveEigenvalue",
    "DimensionMismatch", "Equilibrium", "FrequencyBand", "GramianPair",
    "IndefiniteGramian", "InterpolationSet", "MachineParams", "MorlimError",
    "NegativeControlTrial", "NetworkModel", "NoConvergence", "NotAnEigenvalue",
    "NotAntistable", "NotStable", "NotSymmetric", "NumericalFailure",
    "RankDeficientBasis", "RankDeficientGramians", "ReductionReport",
    "ResidueForm", "ShiftIsPole", "SingularShift", "SpectraOverlap",
    "StateSpace", "SylvesterData", "UncontrollablePair", "UnobservablePair",
    "UnstableMode", "all_passed", "any_failed", "any_inconclusive",
    "augment_input", "augment_input_data", "augment_output",
    "augment_output_data", "band_weight_scalar", "certify", "certify_flpork",
    "certify_oflpork", "certify_pork", "compute_F", "compute_F_antistable",
    "cross_gramians", "default_directions", "electrical_power",
    "error_system", "flbt", "flpork", "freq_response_samples",
    "gramians_limited", "gramians_unlimited", "h2_norm", "h2_norm_squared",
    "h2w_norm", "h2w_norm_squared", "is_stable", "linearize_classical",
    "matrix_log", "mirror_interpolation", "modal_truncation",
    "negative_controls", "oflpork", "oracle_F", "oracle_gramian",
    "oracle_h2w", "perturb_matrix", "poles", "pork", "real_input_data",
    "real_output_data", "select_modes", "solve_equilibrium", "solve_lyapunov",
    "solve_sylvester", "swing_rhs", "synth_benchmark", "synth_network",
    "to_residue_form", "transfer_eval",
]
