"""Potential-well thresholds and pseudo-spectral runs for doubly dispersive
nonlocal wave equations u_tt - L u_xx = B(g(u))_xx with g(u) = -|u|^(p-1) u."""

from .classify import ClassLabel, WellClass, classify, scan_scaling_family
from .dynamics import (
    BlowupReport,
    SolverConfig,
    TrajectoryRecord,
    integrate,
    invariance_monitor,
    levine_check,
    rhs,
    write_trajectory_csv,
)
from .families import (
    build_field,
    derivative_of_gaussian,
    gaussian,
    scaled_ground_state,
    sech_pow,
    zero_field,
)
from .functionals import (
    EnergyBreakdown,
    StateUW,
    augmented_energy,
    augmented_energy_shifted,
    dispersive_energy,
    energy,
    momentum,
    potential_energy,
    power_integral,
    power_nonlinearity,
    power_primitive,
)
from .grid import (
    GridSpec,
    RealField,
    antiderivative,
    apply_multiplier,
    derivative,
    lp_norm,
    read_field_bin,
    read_field_csv,
    sobolev_norm,
    write_field_bin,
    write_field_csv,
)
from .symbols import (
    ModelSpec,
    OperatorSpec,
    ValidationReport,
    double_dispersion,
    fit_coercivity_constants,
    good_boussinesq,
    load_model,
    preset,
    preset_names,
    save_model,
    symbol_at,
    validate_model,
)
from .wellsolver import (
    ConvergenceError,
    MinimizeOptions,
    ThresholdResult,
    load_thresholds,
    minimize_embedding_constant,
    nehari_rescale,
    save_thresholds,
    select_threshold,
    well_depth_from_constant,
)

__version__ = "0.1.0"
