"""Pseudospectral simulator and verification harness for forced KdV solitons.

The equation is u_t = -u_xxx - 2 u u_x + eps f(eps t / E) u on a periodic
box: a KdV soliton driven by a slowly varying multiplicative forcing.  The
package tracks the soliton's amplitude and phase against closed-form
predictors, monitors the conserved-quantity evolution laws, verifies the
spectral structure of the linearized operator in exponentially weighted
spaces, and packages the whole verification battery behind a CLI.
"""

from .forcing import ForcingSpec
from .grid import (
    Field,
    GridSpec,
    dealias,
    derivative,
    dilate,
    dilate_values,
    inner_product,
    l2_norm,
    make_grid,
    parseval_coefficient_norm_sq,
    translate,
)
from .harness import (
    ConfigError,
    InsufficientHorizonError,
    RunConfig,
    RunReport,
    Tolerances,
    TRACK_COLUMNS,
    build_initial_field,
    c2_midpoint_check,
    doubling_config,
    halving_config,
    lemma_scaling_residuals,
    linear_suite,
    load_config,
    loads_config,
    persist,
    read_track_csv,
    run_scenario,
    sweep,
    theorem_suite,
    write_track_csv,
)
from .linearized import (
    DualBasis,
    OperatorMatrix,
    SemigroupDecay,
    SpectrumResult,
    assemble_Lc,
    assemble_conjugated,
    conjugated_derivative,
    derivative_matrix,
    dual_basis,
    essential_edge,
    kernel_residuals,
    project,
    semigroup_decay,
    spectral_projector,
    spectrum,
)
from .modulation import (
    DecompositionResult,
    EnergyDiagnostics,
    ExtractionError,
    K_matrix,
    ModulationState,
    ModulationTrack,
    NearSingularKError,
    approximation_gap,
    coevolve,
    energy_diagnostics,
    extract,
    k_diagnostic,
    modulation_rhs,
    predict_c_limit,
    predictors,
    rescale_to_moving_frame,
    restore_from_moving_frame,
)
from .soliton import (
    SolitonInvariants,
    SolitonParams,
    dphi_dc,
    dphi_dx,
    dzeta_dc,
    eta1,
    eta2,
    phi,
    phi_field,
    soliton_invariants,
    zeta,
    zeta_field,
)
from .solver import (
    BlowUpError,
    InvariantRecord,
    SolverConfig,
    SpongeSpec,
    Stepper,
    Trajectory,
    identity_monitor,
    invariants,
    kdv_rhs,
    load_checkpoint,
    save_checkpoint,
    simulate,
    step,
)
from .weights import (
    WeightPair,
    WeightSchedule,
    q_bound_constant,
    q_factor,
    q_weighted_sup,
    schedule_weights,
    split_at_origin,
    weighted_norm_asym,
    weighted_norm_h1,
    weighted_norm_l2,
)

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
