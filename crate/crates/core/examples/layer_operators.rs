//! Layer operators act diagonally on harmonics; the B-operators map a scalar
//! density to a pure external or pure internal field.
//!
//! `cargo run --example layer_operators`

use patchsep::layer::{apply_bi_star, apply_bo_star, apply_spectral_op, SpectralOperator};
use patchsep::sphere::ShCoeffs;

fn main() -> patchsep::Result<()> {
    println!("{:>2} {:>10} {:>10} {:>10} {:>10} {:>10}", "n", "S", "S^-1", "K", "K+1/2", "K-1/2");
    for n in 0..=5 {
        let e = |op: SpectralOperator| op.eigenvalue(n);
        println!(
            "{n:>2} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            e(SpectralOperator::S),
            e(SpectralOperator::Sinv),
            e(SpectralOperator::K),
            e(SpectralOperator::KplusHalf),
            e(SpectralOperator::KminusHalf)
        );
    }

    let mut g = ShCoeffs::zeros(2);
    g.set(0, 0, 1.0)?;
    g.set(1, 0, 1.0)?;
    g.set(2, -1, 1.0)?;
    let sg = apply_spectral_op(SpectralOperator::S, &g);
    println!("S g = {:?}", sg.values());

    let outer = apply_bo_star(&g);
    let inner = apply_bi_star(&g);
    println!("B_o* g: ext {:?} (degree 0 is annihilated)", outer.ext.values());
    println!("B_i* g: int {:?}", inner.int.values());
    Ok(())
}
