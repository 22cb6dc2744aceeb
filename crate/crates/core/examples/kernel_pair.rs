//! Nonzero external and internal fields whose sum nearly vanishes on the patch.
//!
//! `cargo run --release --example kernel_pair`

use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use patchsep::patch::{patch_norm_on_patch, patch_quadrature, PatchRegion};
use patchsep::separation::{build_kernel_pair, tapered_indicator};
use patchsep::sphere::{ShCoeffs, SphereGrid};
use patchsep::vsh::GridVectorField;

fn main() -> patchsep::Result<()> {
    let region = PatchRegion::north_cap_deg(90.0)?;
    for n in [8usize, 16, 24] {
        let pg = patch_quadrature(&region, Arc::new(SphereGrid::gauss(48.max(2 * n + 16))))?;
        // 1 on the patch, tapered to 0 across a 45° collar outside it
        let h1 = tapered_indicator(&region, FRAC_PI_4, n)?;
        let pair = build_kernel_pair(&h1, &ShCoeffs::zeros(n), n, &pg, 1e-2)?;
        let sum = GridVectorField::synthesize(&pair.fplus.add(&pair.fminus), &pg.nodes());
        println!(
            "N={n:>2}: ‖f₊‖ {:.3}, ‖f₋‖ {:.3}, ‖f₊+f₋‖ on patch {:.3e}, relative residual {:.3e}",
            pair.fplus.norm(),
            pair.fminus.norm(),
            patch_norm_on_patch(&sum, &pg)?,
            pair.patch_residual
        );
    }
    Ok(())
}
