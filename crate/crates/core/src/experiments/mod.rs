//! Reproducible experiment drivers: singular-value decay and best
//! approximation across degree, condition number across shell radius, and
//! separation error across noise level with logarithmic and power-law fits.
//!
//! All randomness comes from one seeded ChaCha generator with a separate
//! stream per draw, so results do not depend on thread count.

mod model;
mod scenario;
mod sweeps;

pub use model::{
    exponent_from_radius, fit_line, fit_log_model, fit_power_law, LinearFit, LogFit, PowerFit, StabilityModel,
    MIN_FIT_POINTS,
};
pub use scenario::{patch_noise, synth_scenario, synth_truth, Scenario, ScenarioConfig};
pub use sweeps::{
    run_instability_sweep, run_noise_sweep, run_shell_sweep, separation_error, HalvingCheck, InstabilityRow,
    InstabilitySweep, NoiseRow, NoiseSweep, ShellRow, ShellSweep,
};
