//! Spectrum of the ray-splitting well and its periodic-orbit expansion.

mod config;
mod density;
mod roots;
mod trace;

pub use config::{lambda_for_reflection, make_config, secular, SecularParams, WellConfig};
pub use density::{
    compare_densities, exact_density_smoothed, DensityComparison, DensitySummary,
    EDGE_GUARD_WIDTHS, POINTS_PER_SIGMA,
};
pub use roots::{
    counting_function_check, polynomial_roots_on_interval, solve_spectrum_chebyshev,
    solve_spectrum_scan, SolveMethod, Spectrum, DEDUP_TOLERANCE, ROOT_TOLERANCE,
};
pub use trace::{
    cyclic_amplitude_sums, length_truncation_bound, max_length_for_bound, orbit_action,
    orbit_amplitude, prime_orbit_terms, trace_density_smoothed, OrbitMode, TraceDensity,
    TraceExpansion, TraceTerm, DEFAULT_AMP_CUTOFF, MAX_ENUMERATION_LENGTH,
};
