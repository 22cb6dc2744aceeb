//! Vector spherical harmonics and the `(ext, int, df)` channel basis.
//!
//! With `η(x) = x` the outward normal and `Y_{n,k}` the scalar harmonics of
//! [`crate::sphere`]:
//!
//! ```text
//! Y   = η Y            Ψ = ∇_𝕊 Y            Φ = η × ∇_𝕊 Y
//! G^ext = Ψ + n Y      G^int = Ψ − (n+1) Y
//! ```
//!
//! `G^ext_{n,k}` is the trace of `∇(r^n Y_{n,k})` from inside the unit ball
//! and `G^int_{n,k}` the trace of `∇(r^{-(n+1)} Y_{n,k})` from outside. All
//! samples are Cartesian 3-vectors.

mod analysis;
mod coeffs;

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sphere::legendre::{eval_all_with_gradient, sh_index};
use crate::sphere::SphericalAngles;

pub use analysis::{vector_analysis, vector_synthesis, GridVectorField};
pub use coeffs::{Channel, ChannelCoeffs, VectorFieldCoeffs};

/// The vector spherical harmonic families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VshFamily {
    /// `η Y_{n,k}`
    Y,
    /// `∇_𝕊 Y_{n,k}`
    Psi,
    /// `η × ∇_𝕊 Y_{n,k}`
    Phi,
    /// `Ψ + n Y`
    Gext,
    /// `Ψ − (n+1) Y`
    Gint,
}

impl VshFamily {
    pub fn min_degree(self) -> usize {
        match self {
            VshFamily::Y | VshFamily::Gint => 0,
            VshFamily::Psi | VshFamily::Phi | VshFamily::Gext => 1,
        }
    }

    fn check(self, n: usize, k: i64) -> Result<()> {
        if k.unsigned_abs() as usize > n {
            return Err(Error::InvalidIndex(format!("|k| > n for (n, k) = ({n}, {k})")));
        }
        if n < self.min_degree() {
            return Err(Error::InvalidIndex(format!(
                "{self} requires n ≥ {}, got {n}",
                self.min_degree()
            )));
        }
        Ok(())
    }

    /// Combines a scalar value and surface gradient at `eta` into this family.
    #[inline]
    pub(crate) fn combine(self, n: usize, eta: &Vector3<f64>, y: f64, grad: &Vector3<f64>) -> Vector3<f64> {
        let nf = n as f64;
        match self {
            VshFamily::Y => eta * y,
            VshFamily::Psi => *grad,
            VshFamily::Phi => eta.cross(grad),
            VshFamily::Gext => grad + eta * (nf * y),
            VshFamily::Gint => grad - eta * ((nf + 1.0) * y),
        }
    }
}

impl fmt::Display for VshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VshFamily::Y => "Y",
            VshFamily::Psi => "Psi",
            VshFamily::Phi => "Phi",
            VshFamily::Gext => "Gext",
            VshFamily::Gint => "Gint",
        };
        f.write_str(s)
    }
}

impl FromStr for VshFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Y" => Ok(VshFamily::Y),
            "Psi" => Ok(VshFamily::Psi),
            "Phi" => Ok(VshFamily::Phi),
            "Gext" => Ok(VshFamily::Gext),
            "Gint" => Ok(VshFamily::Gint),
            other => Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        }
    }
}

/// Evaluates one vector spherical harmonic at each point.
pub fn eval_vsh(family: VshFamily, n: usize, k: i64, points: &[Vector3<f64>]) -> Result<Vec<Vector3<f64>>> {
    family.check(n, k)?;
    let i = sh_index(n, k);
    Ok(points
        .par_iter()
        .map(|p| {
            let eta = p / p.norm();
            let (y, g) = eval_all_with_gradient(&eta, n);
            family.combine(n, &eta, y[i], &g[i])
        })
        .collect())
}

/// Squared L²(𝕊)³ norm of a family member of degree `n`.
pub fn vsh_norm_sq(family: VshFamily, n: usize) -> Result<f64> {
    if n < family.min_degree() {
        return Err(Error::InvalidIndex(format!(
            "{family} requires n ≥ {}, got {n}",
            family.min_degree()
        )));
    }
    let nf = n as f64;
    Ok(match family {
        VshFamily::Y => 1.0,
        VshFamily::Psi | VshFamily::Phi => nf * (nf + 1.0),
        VshFamily::Gext => nf * (2.0 * nf + 1.0),
        VshFamily::Gint => (nf + 1.0) * (2.0 * nf + 1.0),
    })
}

/// Splits Cartesian vectors into `(B_r, B_θ, B_φ)` at the given points.
pub fn to_spherical_components(points: &[Vector3<f64>], samples: &[Vector3<f64>]) -> Vec<[f64; 3]> {
    points
        .iter()
        .zip(samples)
        .map(|(p, b)| {
            let ang = SphericalAngles::from_point(p);
            let eta = p / p.norm();
            [eta.dot(b), ang.e_theta().dot(b), ang.e_phi().dot(b)]
        })
        .collect()
}

/// Inverse of [`to_spherical_components`].
pub fn from_spherical_components(points: &[Vector3<f64>], comps: &[[f64; 3]]) -> Vec<Vector3<f64>> {
    points
        .iter()
        .zip(comps)
        .map(|(p, c)| {
            let ang = SphericalAngles::from_point(p);
            let eta = p / p.norm();
            eta * c[0] + ang.e_theta() * c[1] + ang.e_phi() * c[2]
        })
        .collect()
}
