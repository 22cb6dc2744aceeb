//! Scalar harmonic analysis and synthesis on a Gauss grid.
//!
//! `cargo run --example harmonic_transform`

use patchsep::sphere::{build_gauss_grid, grid_l2_norm, sh_analysis, sh_count, sh_synthesis, ShCoeffs};

fn main() -> patchsep::Result<()> {
    let degree = 12;
    let grid = build_gauss_grid(degree)?;
    println!(
        "Gauss grid for degree {degree}: {} nodes, exact to degree {}",
        grid.len(),
        grid.bandlimit_exact()
    );

    // A smooth test function: a few low modes with decaying amplitude.
    let values: Vec<f64> = (0..sh_count(12)).map(|i| 1.0 / (1.0 + i as f64)).collect();
    let coeffs = ShCoeffs::from_vec(12, values)?;
    let samples = sh_synthesis(&coeffs, grid.nodes());
    let back = sh_analysis(&samples, &grid, 12)?;

    let err = coeffs
        .values()
        .iter()
        .zip(back.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("round-trip max coefficient error {err:.2e}");
    println!(
        "Parseval: coefficient norm {:.12}, grid L2 norm {:.12}",
        coeffs.norm(),
        grid_l2_norm(&samples, &grid)
    );
    Ok(())
}
