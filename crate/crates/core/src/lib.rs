//! Internal/external separation of potential vector fields on the unit sphere.
//!
//! The crate covers the full pipeline from scalar spherical harmonics to the
//! patch-restricted separation problem:
//!
//! - [`sphere`]: real orthonormal scalar harmonics, Gauss grids, transforms.
//! - [`vsh`]: vector spherical harmonics and the `(ext, int, df)` channel basis.
//! - [`layer`]: spectrally diagonal layer operators and the B-operators.
//! - [`hardy`]: stable full-sphere separation.
//! - [`patch`]: patch regions and masked quadrature.
//! - [`separation`]: the restriction operator on a patch, its spectrum,
//!   regularized inversion, null-space pairs and best approximation.
//! - [`experiments`]: reproducible sweeps (conditioning, shell altitude, noise).
//! - [`io`]: configuration, file formats, CSV/SVG/report output.

pub mod error;
pub mod experiments;
pub mod hardy;
pub mod io;
pub mod layer;
pub mod patch;
pub mod separation;
pub mod sphere;
pub mod vsh;

pub use error::{Error, Result};
