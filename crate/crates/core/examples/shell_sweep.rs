//! Conditioning of the shell-weighted operator as the source-free shell grows.
//!
//! `cargo run --release --example shell_sweep`

use patchsep::experiments::{run_shell_sweep, ScenarioConfig};

fn main() -> patchsep::Result<()> {
    let cfg = ScenarioConfig {
        shell_radii: vec![1.001, 1.01, 1.05, 1.1, 1.5, 2.0],
        ..Default::default()
    };
    let s = run_shell_sweep(&cfg)?;
    println!("N_ext = {}, N_int = {}", s.n_ext, s.n_int);
    println!("{:>6} {:>12} {:>12} {:>12}", "r", "cond", "sigma_min", "cond ext");
    for row in &s.rows {
        let r = row.r.map_or("none".to_string(), |r| format!("{r}"));
        println!("{r:>6} {:>12.4e} {:>12.4e} {:>12.4e}", row.cond_number, row.sigma_min, row.cond_ext);
    }
    Ok(())
}
