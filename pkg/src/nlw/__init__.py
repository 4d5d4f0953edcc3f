"""Energy-channel laboratory for the radial defocusing semilinear wave
equation, via the exact reduction w(r,t) = r * u(r,t) on the half line."""

from .appendix import (
    TriangleRegion,
    find_envelope_threshold,
    full_slab,
    run_appendix_example,
    source_triangle_check,
    triangle_bound_constant,
    triangle_integral,
)
from .diagnostics import (
    EnergyLedger,
    cylinder_integral,
    energy_channels,
    flux_inward,
    flux_outward,
    infinite_triangle_residual,
    outward_local_energy_bound,
    pointwise_bounds,
    triangle_residual,
    weighted_morawetz,
    xi_trace,
)
from .errors import (
    BlowupError,
    BoundaryLeakError,
    ConfigError,
    DegenerateFitError,
    DivergentIntegralError,
    NlwError,
    NoContractionError,
    OffGridError,
    OutOfRangeError,
    ShortSpanError,
    TailNotConvergedError,
    WeightInvalidError,
)
from .model import (
    AppendixPowerLaw,
    DirectedPulse,
    GaussianBump,
    ModelParams,
    RadialPair,
    Tabulated,
    check_boundary_leak,
    conformal_charge,
    conformal_charge_w,
    charge_dissipation_rate,
    energy_total,
    k_functional,
    lift_initial_data,
    make_params,
    nonlinearity,
    sample_pair,
    u_side_energy,
)
from .scattering import (
    char_settle_rate,
    extract_g_plus,
    exterior_growth_fit,
    fit_log_growth,
    fit_power_law,
    free_wave_defect,
    lp_l2p_tail,
    predicted_tail_exponent,
)
from .solver import (
    EnvelopeSpec,
    GridSpec,
    Monitors,
    Snapshot,
    Trajectory,
    WaveState,
    bootstrap,
    duhamel_solve,
    evolve,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "AppendixPowerLaw",
    "BlowupError",
    "BoundaryLeakError",
    "ConfigError",
    "DegenerateFitError",
    "DirectedPulse",
    "DivergentIntegralError",
    "EnergyLedger",
    "EnvelopeSpec",
    "GaussianBump",
    "GridSpec",
    "ModelParams",
    "Monitors",
    "NlwError",
    "NoContractionError",
    "OffGridError",
    "OutOfRangeError",
    "RadialPair",
    "ShortSpanError",
    "Snapshot",
    "Tabulated",
    "TailNotConvergedError",
    "Trajectory",
    "TriangleRegion",
    "WaveState",
    "WeightInvalidError",
    "bootstrap",
    "char_settle_rate",
    "charge_dissipation_rate",
    "check_boundary_leak",
    "conformal_charge",
    "conformal_charge_w",
    "cylinder_integral",
    "duhamel_solve",
    "energy_channels",
    "energy_total",
    "evolve",
    "extract_g_plus",
    "exterior_growth_fit",
    "find_envelope_threshold",
    "fit_log_growth",
    "fit_power_law",
    "flux_inward",
    "flux_outward",
    "free_wave_defect",
    "full_slab",
    "infinite_triangle_residual",
    "k_functional",
    "lift_initial_data",
    "lp_l2p_tail",
    "make_params",
    "nonlinearity",
    "outward_local_energy_bound",
    "pointwise_bounds",
    "predicted_tail_exponent",
    "run_appendix_example",
    "sample_pair",
    "source_triangle_check",
    "step",
    "triangle_bound_constant",
    "triangle_integral",
    "triangle_residual",
    "u_side_energy",
    "weighted_morawetz",
    "xi_trace",
]
