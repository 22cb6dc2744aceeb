use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::layer::{apply_bi_star, apply_bo_star, apply_spectral_op, SpectralOperator};
use crate::patch::{PatchGrid, PatchRegion};
use crate::sphere::{project_unchecked, sh_synthesis, ShCoeffs, SphereGrid};
use crate::vsh::{GridVectorField, VectorFieldCoeffs};

/// Default relative tolerance for "h1 is constant on U".
pub const DEFAULT_CONSTANCY_TOLERANCE: f64 = 1e-3;

/// A pair `(f₊, f₋)` whose sum nearly vanishes on the patch.
#[derive(Debug, Clone, Serialize)]
pub struct KernelPair {
    /// Pure ext channel.
    pub fplus: VectorFieldCoeffs,
    /// Pure int channel.
    pub fminus: VectorFieldCoeffs,
    /// `‖f₊ + f₋‖_{L²(U)} / (‖f₊‖_{L²(𝕊)} + ‖f₋‖_{L²(𝕊)})`.
    pub patch_residual: f64,
    /// Relative deviation of `h1` from its mean on U.
    pub h1_deviation: f64,
}

/// `‖h − mean_U h‖_{L²(U)} / ‖h‖_{L²(𝕊)}`, by quadrature on `pg`.
pub fn constancy_deviation(h: &ShCoeffs, pg: &PatchGrid) -> f64 {
    let vals = sh_synthesis(h, &pg.nodes());
    let area = pg.area();
    let mean = vals.iter().zip(pg.weights()).map(|(v, w)| v * w).sum::<f64>() / area;
    let dev = vals
        .iter()
        .zip(pg.weights())
        .map(|(v, w)| w * (v - mean).powi(2))
        .sum::<f64>()
        .sqrt();
    let total = h.norm();
    if total == 0.0 {
        0.0
    } else {
        dev / total
    }
}

/// Builds `(B_o* f, B_i* g)` with `f = (K+½)S⁻¹h1 + h2` and `g = S⁻¹h1 − f`,
/// so that `f₊ + f₋ = ∇_𝕊 h1 − η h2` everywhere on the sphere.
///
/// With `h1` nearly constant on U and `h2` nearly zero on U, the sum nearly
/// vanishes on U although neither part does.
pub fn build_kernel_pair(
    h1: &ShCoeffs,
    h2: &ShCoeffs,
    max_degree: usize,
    pg: &PatchGrid,
    tolerance: f64,
) -> Result<KernelPair> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "constancy tolerance must be positive, got {tolerance}"
        )));
    }
    let h1 = h1.with_max_degree(max_degree);
    let h2 = h2.with_max_degree(max_degree);
    let h1_deviation = constancy_deviation(&h1, pg);
    if h1_deviation > tolerance {
        return Err(Error::NotConstantOnPatch {
            deviation: h1_deviation,
            tolerance,
        });
    }
    let s_inv_h1 = apply_spectral_op(SpectralOperator::Sinv, &h1);
    let f = apply_spectral_op(SpectralOperator::KplusHalf, &s_inv_h1).add(&h2);
    let g = s_inv_h1.add(&f.scale(-1.0));
    let fplus = apply_bo_star(&f);
    let fminus = apply_bi_star(&g);
    let denom = fplus.norm() + fminus.norm();
    if denom == 0.0 {
        return Err(Error::TrivialKernelPair);
    }
    if fplus.norm() == 0.0 || fminus.norm() == 0.0 {
        return Err(Error::TrivialKernelPair);
    }
    let sum = GridVectorField::synthesize(&fplus.add(&fminus), &pg.nodes());
    let on_patch = sum.weighted_norm(pg.weights())?;
    Ok(KernelPair {
        fplus,
        fminus,
        patch_residual: on_patch / denom,
        h1_deviation,
    })
}

/// Degree-`max_degree` projection of the profile that is 1 on `region` and
/// falls to 0 as `cos²` over a collar of angular width `collar` outside it.
pub fn tapered_indicator(region: &PatchRegion, collar: f64, max_degree: usize) -> Result<ShCoeffs> {
    if !(collar > 0.0 && collar < PI) {
        return Err(Error::InvalidParameter(format!(
            "collar width must lie in (0, π), got {collar}"
        )));
    }
    let fine = SphereGrid::gauss(4 * max_degree + 32);
    let samples: Vec<f64> = fine
        .nodes()
        .iter()
        .map(|p| {
            let d = region.distance_outside(p);
            if d <= 0.0 {
                1.0
            } else if d >= collar {
                0.0
            } else {
                (0.5 * PI * d / collar).cos().powi(2)
            }
        })
        .collect();
    Ok(project_unchecked(&samples, &fine, max_degree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patch::patch_quadrature;
    use crate::sphere::ShCoeffs;
    use std::sync::Arc;

    fn half_sphere(degree: usize) -> (PatchRegion, PatchGrid) {
        let region = PatchRegion::north_cap_deg(90.0).unwrap();
        let grid = Arc::new(SphereGrid::gauss(degree));
        let pg = patch_quadrature(&region, grid).unwrap();
        (region, pg)
    }

    #[test]
    fn pure_monopole_is_trivial() {
        let (_, pg) = half_sphere(16);
        let h1 = ShCoeffs::unit(4, 0, 0).unwrap();
        let r = build_kernel_pair(&h1, &ShCoeffs::zeros(4), 4, &pg, 1.0);
        assert!(matches!(r, Err(Error::TrivialKernelPair)));
    }

    #[test]
    fn wiggly_h1_rejected() {
        let (_, pg) = half_sphere(16);
        let h1 = ShCoeffs::unit(4, 3, 1).unwrap();
        let r = build_kernel_pair(&h1, &ShCoeffs::zeros(4), 4, &pg, 1e-3);
        assert!(matches!(r, Err(Error::NotConstantOnPatch { .. })));
    }

    #[test]
    fn channel_purity_and_annihilation_identity() {
        let (region, pg) = half_sphere(40);
        let h1 = tapered_indicator(&region, 1.0, 12).unwrap();
        let pair = build_kernel_pair(&h1, &ShCoeffs::zeros(12), 12, &pg, 1.0).unwrap();
        assert!(pair.fplus.int.is_empty() || pair.fplus.int.field_norm() == 0.0);
        assert!(pair.fminus.ext.is_empty() || pair.fminus.ext.field_norm() == 0.0);
        // f₊ + f₋ equals the surface gradient of h1.
        let nodes = pg.parent().nodes();
        let sum = GridVectorField::synthesize(&pair.fplus.add(&pair.fminus), nodes);
        let grad = crate::sphere::sh_gradient_synthesis(&h1, nodes);
        for (a, b) in sum.samples().iter().zip(grad) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
