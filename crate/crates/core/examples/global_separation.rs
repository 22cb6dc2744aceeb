//! Full-sphere separation into external, internal and toroidal channels.
//!
//! `cargo run --example global_separation`

use patchsep::hardy::decompose_global;
use patchsep::sphere::build_gauss_grid;
use patchsep::vsh::{vector_synthesis, Channel, GridVectorField, VectorFieldCoeffs};

fn main() -> patchsep::Result<()> {
    let mut truth = VectorFieldCoeffs::zeros(3, 5, 2);
    truth.ext.set(1, 0, 0.3)?;
    truth.ext.set(3, 2, -0.1)?;
    truth.int.set(1, 0, -1.0)?;
    truth.int.set(5, -4, 0.02)?;
    truth.df.set(2, 1, 0.05)?;

    let grid = build_gauss_grid(5)?;
    let field = GridVectorField::new(vector_synthesis(&truth, grid.nodes()))?;
    let dec = decompose_global(&field, &grid, 5)?;
    println!("relative resynthesis residual {:.2e}", dec.residual);
    for ch in [Channel::Ext, Channel::Int, Channel::Df] {
        let err = dec.coeffs.channel(ch).add(&truth.channel(ch).scale(-1.0)).field_norm();
        println!("{ch:>3}: norm {:.6}, recovery error {err:.1e}", dec.coeffs.channel(ch).field_norm());
    }

    // Too coarse a truncation leaves energy behind and raises the warning.
    let low = decompose_global(&field, &grid, 2)?;
    println!(
        "degree-2 analysis: residual {:.3e}, bandlimit warning {}",
        low.residual,
        low.bandlimit_warning()
    );
    Ok(())
}
