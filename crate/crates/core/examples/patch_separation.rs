//! Separating internal and external sources from noisy data on a hemisphere.
//!
//! `cargo run --release --example patch_separation`

use patchsep::experiments::{separation_error, synth_scenario, ScenarioConfig};
use patchsep::separation::{assemble_restriction, Regularization, SeparationSolver};

fn main() -> patchsep::Result<()> {
    let cfg = ScenarioConfig {
        noise_level: 1e-3,
        seed: 42,
        ..Default::default()
    };
    let s = synth_scenario(&cfg)?;
    println!(
        "{} patch nodes, true ext norm {:.4}, true int norm {:.4}, noise {:.1e}",
        s.patch.len(),
        s.truth.ext.field_norm(),
        s.truth.int.field_norm(),
        s.noise_norm
    );

    let shell = cfg.shell()?;
    let op = assemble_restriction(cfg.n_ext, cfg.n_int, &s.patch, Some(&shell))?;
    let solver = SeparationSolver::new(&op);
    println!("numerical rank {} of {}", solver.numerical_rank(), op.ncols());

    for reg in [
        Regularization::default(),
        Regularization::TsvdRelative { cut: 1e-3 },
        Regularization::Tikhonov { lambda: 1e-6 },
        Regularization::Discrepancy { noise_level: cfg.noise_level, tau: 1.0 },
    ] {
        let r = solver.solve(&s.data, &reg)?;
        println!(
            "{:<9} parameter {:.2e} rank {:>3}: residual {:.3e}, separation error {:.3e}",
            r.regularization.method,
            r.regularization.parameter,
            r.regularization.effective_rank,
            r.data_residual,
            separation_error(&r.coeffs, &s.truth)
        );
    }
    Ok(())
}
