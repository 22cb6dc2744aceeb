use serde::Serialize;

use super::operator::assemble_modes;
use super::shell::ShellWeighting;
use super::solve::{Regularization, SeparationSolver};
use crate::error::{Error, Result};
use crate::patch::PatchGrid;
use crate::vsh::{GridVectorField, VectorFieldCoeffs};

/// Relative cut used for the int-only least-squares fit.
const BEST_APPROX_CUT: f64 = 1e-14;

/// Output of [`best_patch_approx`].
#[derive(Debug, Clone, Serialize)]
pub struct BestApprox {
    /// Int-only minimizer.
    pub fminus: VectorFieldCoeffs,
    /// `‖f₊ − f₋‖_{L²(U)³}`.
    pub approx_error: f64,
    /// `‖f₋‖_{L²(𝕊)³}`.
    pub blowup_norm: f64,
}

/// Least-squares approximation of an ext field on the patch by int fields of
/// degree `≤ n_int`.
pub fn best_patch_approx(fplus: &VectorFieldCoeffs, n_int: usize, pg: &PatchGrid) -> Result<BestApprox> {
    if fplus.ext.field_norm() == 0.0 {
        return Err(Error::InvalidParameter("f₊ must be nonzero".into()));
    }
    let target = VectorFieldCoeffs {
        ext: fplus.ext.clone(),
        ..VectorFieldCoeffs::empty()
    };
    let d = GridVectorField::synthesize(&target, &pg.nodes());
    let op = assemble_modes(None, Some(n_int), pg, ShellWeighting::disabled())?;
    let fit = SeparationSolver::new(&op).solve(&d, &Regularization::TsvdRelative { cut: BEST_APPROX_CUT })?;
    let fminus = VectorFieldCoeffs {
        int: fit.coeffs.int,
        ..VectorFieldCoeffs::empty()
    };
    let blowup_norm = fminus.int.field_norm();
    Ok(BestApprox {
        fminus,
        approx_error: fit.data_residual,
        blowup_norm,
    })
}
