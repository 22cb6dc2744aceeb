//! Singular spectrum of the patch restriction operator: injective for every
//! finite degree, yet the smallest singular value decays exponentially.
//!
//! `cargo run --release --example patch_spectrum`

use std::sync::Arc;

use patchsep::patch::{patch_quadrature, PatchRegion};
use patchsep::separation::{assemble_restriction, svd_spectrum};
use patchsep::sphere::SphereGrid;

fn main() -> patchsep::Result<()> {
    let grid = Arc::new(SphereGrid::gauss(40));
    for cap in [120.0, 90.0, 60.0] {
        let pg = patch_quadrature(&PatchRegion::north_cap_deg(cap)?, grid.clone())?;
        println!("cap radius {cap}°, {} nodes, area {:.4}", pg.len(), pg.area());
        for n in [2usize, 4, 6, 8, 10] {
            let a = assemble_restriction(n, n, &pg, None)?;
            let s = svd_spectrum(&a);
            let (max, min) = (s[0], *s.last().unwrap());
            println!("  N={n:>2}: {:>4} columns, sigma_min {min:.3e}, sigma_min/sigma_max {:.3e}", a.ncols(), min / max);
        }
    }
    Ok(())
}
