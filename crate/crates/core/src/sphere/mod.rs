//! Scalar spherical harmonics, Gauss quadrature grids and transforms.
//!
//! All harmonics are real and orthonormal on the unit sphere
//! (`∫ Y_{n,k} Y_{m,l} dσ = δ_{nm} δ_{kl}`), without the Condon–Shortley
//! phase. See [`legendre`] for the exact definition.

mod coeffs;
mod grid;
pub mod legendre;
mod transform;

pub use coeffs::ShCoeffs;
pub use grid::{build_gauss_grid, gauss_legendre, SphereGrid};
pub use legendre::{sh_count, sh_degree_order, sh_index, SphericalAngles};
pub use transform::{
    eval_scalar_sh, eval_scalar_sh_gradient, grid_l2_norm, sh_analysis, sh_gradient_synthesis,
    sh_synthesis,
};

pub(crate) use transform::project_unchecked;
