use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Product quadrature on the unit sphere: Gauss–Legendre in `cos θ`,
/// equispaced in longitude.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    degree: usize,
    nodes: Vec<Vector3<f64>>,
    weights: Vec<f64>,
    theta: Vec<f64>,
    phi: Vec<f64>,
    bandlimit_exact: usize,
}

impl SphereGrid {
    /// Gauss grid for bandlimit `degree`: `degree+1` colatitudes times
    /// `2·degree+2` longitudes. Integrates every spherical harmonic of degree
    /// `≤ 2·degree+1` exactly.
    pub fn gauss(degree: usize) -> Self {
        let (x, w) = gauss_legendre(degree + 1);
        let n_lon = 2 * degree + 2;
        let dphi = 2.0 * PI / n_lon as f64;
        let mut nodes = Vec::with_capacity(x.len() * n_lon);
        let mut weights = Vec::with_capacity(x.len() * n_lon);
        let mut theta = Vec::with_capacity(x.len() * n_lon);
        let mut phi = Vec::with_capacity(x.len() * n_lon);
        // north to south
        for (xi, wi) in x.iter().rev().zip(w.iter().rev()) {
            let sin_t = (1.0 - xi * xi).max(0.0).sqrt();
            let t = sin_t.atan2(*xi);
            for j in 0..n_lon {
                let p = j as f64 * dphi;
                nodes.push(Vector3::new(sin_t * p.cos(), sin_t * p.sin(), *xi));
                weights.push(wi * dphi);
                theta.push(t);
                phi.push(p);
            }
        }
        Self {
            degree,
            nodes,
            weights,
            theta,
            phi,
            bandlimit_exact: 2 * degree + 1,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> &[Vector3<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest spherical-harmonic degree integrated exactly.
    pub fn bandlimit_exact(&self) -> usize {
        self.bandlimit_exact
    }

    pub(crate) fn require_exactness(&self, requested: usize, required: usize) -> Result<()> {
        if self.bandlimit_exact < required {
            return Err(Error::GridTooCoarse {
                requested,
                required,
                available: self.bandlimit_exact,
            });
        }
        Ok(())
    }
}

/// Builds the Gauss grid for bandlimit `n`; negative degrees are rejected.
pub fn build_gauss_grid(n: i64) -> Result<SphereGrid> {
    if n < 0 {
        return Err(Error::InvalidParameter(format!(
            "grid degree must be non-negative, got {n}"
        )));
    }
    Ok(SphereGrid::gauss(n as usize))
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; count];
    let mut w = vec![0.0; count];
    let n = count as f64;
    for i in 0..count.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(count, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(count, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[count - 1 - i] = z;
        w[i] = wi;
        w[count - 1 - i] = wi;
    }
    if count % 2 == 1 {
        x[count / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        for deg in 0..=11 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((q - exact).abs() < 1e-14, "deg {deg}: {q} vs {exact}");
        }
    }

    #[test]
    fn degree_zero_grid() {
        let g = build_gauss_grid(0).unwrap();
        assert_eq!(g.len(), 2);
        let s: f64 = g.weights().iter().sum();
        assert!((s - 4.0 * PI).abs() < 1e-12 * 4.0 * PI);
    }

    #[test]
    fn negative_degree_rejected() {
        assert!(build_gauss_grid(-1).is_err());
    }

    #[test]
    fn nodes_are_unit_and_weights_positive() {
        let g = SphereGrid::gauss(17);
        assert!(g.nodes().iter().all(|p| (p.norm() - 1.0).abs() < 1e-14));
        assert!(g.weights().iter().all(|w| *w > 0.0));
        let s: f64 = g.weights().iter().sum();
        assert!((s - 4.0 * PI).abs() < 1e-12 * 4.0 * PI);
    }
}
