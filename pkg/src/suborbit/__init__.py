"""Suborbit approximation of sequences by weighted shift operators.

Given a family ``{f_k}`` in a weighted ``l^p`` space (or a discretized
weighted ``L^p`` on the half-line), the package builds a weight ``lam``, a
power schedule ``alpha(k)`` and a generating vector ``phi`` such that
``||f_k - T^{alpha(k)} phi|| <= sum_{j>k} eps_j``, then measures every error
against that bound.
"""

from .construct import (
    ErrorReport,
    ErrorRow,
    OrbitRepresentation,
    build_phi,
    evaluate_suborbit,
    evaluate_suborbit_naive,
    run_finite_pipeline,
    run_localized_pipeline,
    verify_bounds,
    verify_eps_close,
)
from .decomposition import (
    AtomicSystem,
    check_closeness,
    frame_bounds_p2,
    perturbed_bounds,
    run_decomposition_pipeline,
)
from .estimators import (
    FiniteSuborbitApproximator,
    FunctionSuborbitApproximator,
    LocalizedSuborbitApproximator,
)
from .exceptions import (
    ConfigError,
    ContractionError,
    DecayTooSlowError,
    GridMismatchError,
    GrowthConditionError,
    InvalidIndexError,
    InvalidInputError,
    MaterializationOverflowError,
    NoCertificateError,
    PreconditionError,
    SuborbitError,
    UnboundedOperatorError,
    UnsupportedWeightError,
)
from .function_space import (
    DecayCertificate,
    GridFunction,
    ModerateWeight,
    apply_S_func,
    apply_T_func,
    fit_tail_certificate,
    gabor_half_system,
    run_function_pipeline,
    translate,
)
from .schedule import (
    EpsSchedule,
    PowerSchedule,
    eps_schedule,
    schedule_finite,
    schedule_function,
    schedule_localized,
)
from .shifts import (
    ShiftOperators,
    apply_L_pow,
    apply_R_pow,
    apply_S_pow,
    apply_T_pow,
    sample_priesz_bounds,
    shift_norms,
)
from .spaces import (
    DecayProfile,
    SeqVector,
    WeightedLpSpace,
    WeightSequence,
    norm,
    scaled_basis_vector,
    tail_norm,
)

__version__ = "0.1.0"
