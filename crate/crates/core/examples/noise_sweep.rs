//! Separation error against noise level, with logarithmic and power-law fits.
//!
//! `cargo run --release --example noise_sweep`

use patchsep::experiments::{run_noise_sweep, ScenarioConfig};

fn main() -> patchsep::Result<()> {
    let cfg = ScenarioConfig::default();
    let s = run_noise_sweep(&cfg)?;
    println!("{:>10} {:>12} {:>12} {:>10}", "eps", "error", "residual", "lambda");
    for r in &s.rows {
        println!("{:>10.1e} {:>12.4e} {:>12.4e} {:>10.2e}", r.eps, r.separation_error, r.data_residual, r.lambda);
    }
    println!(
        "log model (a = {:.3e}): RSS {:.4e}; power law eps^{:.3}: RSS {:.4e}",
        s.log_fit.model.a, s.log_fit.rss, s.power_fit.p, s.power_fit.rss
    );
    for h in &s.halvings {
        println!("eps {:.0e} -> {:.0e}: error ratio {:.3}", h.eps, h.eps_half, h.error_ratio);
    }
    Ok(())
}
