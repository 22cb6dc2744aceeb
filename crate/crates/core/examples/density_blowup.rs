//! Internal fields approximate an external one on the patch ever better, at
//! the price of an exploding global norm.
//!
//! `cargo run --release --example density_blowup`

use std::sync::Arc;

use patchsep::patch::{patch_quadrature, PatchRegion};
use patchsep::separation::best_patch_approx;
use patchsep::sphere::SphereGrid;
use patchsep::vsh::{Channel, VectorFieldCoeffs};

fn main() -> patchsep::Result<()> {
    let pg = patch_quadrature(&PatchRegion::north_cap_deg(90.0)?, Arc::new(SphereGrid::gauss(48)))?;
    let fplus = VectorFieldCoeffs::single(Channel::Ext, 1, 0)?;
    println!("approximating G^ext_1,0 (norm {:.4}) on the northern hemisphere", fplus.norm());
    for n in [2usize, 4, 8, 12, 16] {
        let b = best_patch_approx(&fplus, n, &pg)?;
        println!("N_int={n:>2}: misfit {:.3e}, ‖f₋‖ {:.3e}", b.approx_error, b.blowup_norm);
    }
    Ok(())
}
