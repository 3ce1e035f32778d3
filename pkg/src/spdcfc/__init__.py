"""Fiber-coupling efficiency model and design tools for photon-pair sources."""

from .core import (
    AlphaBeta,
    EfficiencyResult,
    ExperimentConfig,
    ShapeParams,
    WalkOffSet,
    compute_alpha_beta,
    effective_to_raw,
    efficiency,
    erf,
    erf_over_sigma,
    eta_closed_form,
    magnification,
    mode_field_radius,
    pump_waist_from_diameter,
    raw_to_effective,
    shape_params,
    sigma_over_erf,
)
from .dispersion import (
    DEFAULT_CUT_ANGLE_DEG,
    IndexModel,
    PhaseMatchGeometry,
    TemporalParams,
    build_walkoff_set,
    bundled_bbo,
    extraordinary_index,
    group_delay_params,
    load_index_model,
    ordinary_index,
    phase_match_angle,
    principal_extraordinary_index,
    q_over_kbar,
    walk_off_tangent,
)
from .errors import (
    ConvergenceError,
    DomainError,
    NoRealImageError,
    WavelengthRangeError,
)
from .oracle import OracleResult, QuadratureSpec, eta_numeric, pair_overlap_density
from .sweep import (
    DEFAULT_MU_VALUES,
    OptResult,
    SweepResult,
    SweepRow,
    SweepSpec,
    ceiling_scan,
    efficiency_curve,
    maximize_eta,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
