//! Real orthonormal spherical harmonics and their surface gradients.
//!
//! Convention (fixed throughout the crate): `Y_{n,0} = q_{n,0}(θ)`,
//! `Y_{n,k} = √2 q_{n,k}(θ) cos kφ` for `k > 0` and
//! `Y_{n,k} = √2 q_{n,|k|}(θ) sin |k|φ` for `k < 0`, where `q_{n,m}` is the
//! associated Legendre function scaled so that `∫ Y² dσ = 1` on the unit
//! sphere. The Condon–Shortley phase is omitted.
//!
//! Colatitude derivatives and `q/sin θ` are carried through the same
//! three-term recurrence as `q` itself, so nothing is ever divided by
//! `sin θ` and the pole limits come out exactly.

use std::f64::consts::PI;

use nalgebra::Vector3;

/// Flat index of `(n, k)` in a coefficient vector of degree ≥ n.
#[inline]
pub fn sh_index(n: usize, k: i64) -> usize {
    debug_assert!(k.unsigned_abs() as usize <= n);
    ((n * n + n) as i64 + k) as usize
}

/// Number of `(n, k)` pairs with `n ≤ max_degree`.
#[inline]
pub fn sh_count(max_degree: usize) -> usize {
    (max_degree + 1) * (max_degree + 1)
}

/// Inverse of [`sh_index`].
pub fn sh_degree_order(index: usize) -> (usize, i64) {
    let n = (index as f64).sqrt().floor() as usize;
    // guard against rounding at perfect squares
    let n = if (n + 1) * (n + 1) <= index { n + 1 } else if n * n > index { n - 1 } else { n };
    let k = index as i64 - (n * n + n) as i64;
    (n, k)
}

#[inline]
fn tri(n: usize, m: usize) -> usize {
    n * (n + 1) / 2 + m
}

/// Spherical coordinates of a unit vector, computed without `acos`.
#[derive(Debug, Clone, Copy)]
pub struct SphericalAngles {
    pub cos_theta: f64,
    pub sin_theta: f64,
    pub cos_phi: f64,
    pub sin_phi: f64,
}

impl SphericalAngles {
    pub fn from_point(p: &Vector3<f64>) -> Self {
        let p = p / p.norm();
        let rho = p.x.hypot(p.y);
        let (cos_phi, sin_phi) = if rho > 0.0 {
            (p.x / rho, p.y / rho)
        } else {
            (1.0, 0.0)
        };
        Self {
            cos_theta: p.z.clamp(-1.0, 1.0),
            sin_theta: rho,
            cos_phi,
            sin_phi,
        }
    }

    pub fn theta(&self) -> f64 {
        self.sin_theta.atan2(self.cos_theta)
    }

    pub fn phi(&self) -> f64 {
        let phi = self.sin_phi.atan2(self.cos_phi);
        if phi < 0.0 {
            phi + 2.0 * PI
        } else {
            phi
        }
    }

    pub fn e_theta(&self) -> Vector3<f64> {
        Vector3::new(
            self.cos_theta * self.cos_phi,
            self.cos_theta * self.sin_phi,
            -self.sin_theta,
        )
    }

    pub fn e_phi(&self) -> Vector3<f64> {
        Vector3::new(-self.sin_phi, self.cos_phi, 0.0)
    }
}

/// Triangular tables of `q_{n,m}`, `∂θ q_{n,m}` and `q_{n,m}/sin θ` at one colatitude.
struct LegendreTable {
    q: Vec<f64>,
    dq: Vec<f64>,
    q_over_sin: Vec<f64>,
}

impl LegendreTable {
    fn new(max_degree: usize, cos_theta: f64, sin_theta: f64) -> Self {
        let len = tri(max_degree, max_degree) + 1;
        let mut q = vec![0.0; len];
        let mut dq = vec![0.0; len];
        let mut u = vec![0.0; len];
        let x = cos_theta;
        let s = sin_theta;

        q[0] = 1.0 / (4.0 * PI).sqrt();
        for m in 0..=max_degree {
            if m > 0 {
                let prev = tri(m - 1, m - 1);
                let c = ((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
                let here = tri(m, m);
                q[here] = c * s * q[prev];
                dq[here] = c * (x * q[prev] + s * dq[prev]);
                u[here] = c * q[prev];
            }
            if m < max_degree {
                let c = ((2 * m + 3) as f64).sqrt();
                let (here, next) = (tri(m, m), tri(m + 1, m));
                q[next] = c * x * q[here];
                dq[next] = c * (-s * q[here] + x * dq[here]);
                u[next] = c * x * u[here];
            }
            for n in (m + 2)..=max_degree {
                let nf = n as f64;
                let mf = m as f64;
                let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
                let b = (((nf - 1.0) * (nf - 1.0) - mf * mf) / (4.0 * (nf - 1.0) * (nf - 1.0) - 1.0))
                    .sqrt();
                let (i, i1, i2) = (tri(n, m), tri(n - 1, m), tri(n - 2, m));
                q[i] = a * (x * q[i1] - b * q[i2]);
                dq[i] = a * (-s * q[i1] + x * dq[i1] - b * dq[i2]);
                u[i] = a * (x * u[i1] - b * u[i2]);
            }
        }
        Self {
            q,
            dq,
            q_over_sin: u,
        }
    }
}

/// Values of every `Y_{n,k}` with `n ≤ max_degree` at one point, flat-indexed by [`sh_index`].
pub fn eval_all(point: &Vector3<f64>, max_degree: usize) -> Vec<f64> {
    let ang = SphericalAngles::from_point(point);
    let table = LegendreTable::new(max_degree, ang.cos_theta, ang.sin_theta);
    let (cos_m, sin_m) = multiple_angles(ang.cos_phi, ang.sin_phi, max_degree);
    let mut out = vec![0.0; sh_count(max_degree)];
    for n in 0..=max_degree {
        out[sh_index(n, 0)] = table.q[tri(n, 0)];
        for m in 1..=n {
            let q = std::f64::consts::SQRT_2 * table.q[tri(n, m)];
            out[sh_index(n, m as i64)] = q * cos_m[m];
            out[sh_index(n, -(m as i64))] = q * sin_m[m];
        }
    }
    out
}

/// Values and surface gradients of every `Y_{n,k}` with `n ≤ max_degree` at one point.
///
/// Gradients are returned in the ambient Cartesian frame.
pub fn eval_all_with_gradient(
    point: &Vector3<f64>,
    max_degree: usize,
) -> (Vec<f64>, Vec<Vector3<f64>>) {
    let ang = SphericalAngles::from_point(point);
    let table = LegendreTable::new(max_degree, ang.cos_theta, ang.sin_theta);
    let (cos_m, sin_m) = multiple_angles(ang.cos_phi, ang.sin_phi, max_degree);
    let e_theta = ang.e_theta();
    let e_phi = ang.e_phi();
    let count = sh_count(max_degree);
    let mut values = vec![0.0; count];
    let mut grads = vec![Vector3::zeros(); count];
    let r2 = std::f64::consts::SQRT_2;
    for n in 0..=max_degree {
        let t = tri(n, 0);
        values[sh_index(n, 0)] = table.q[t];
        grads[sh_index(n, 0)] = e_theta * table.dq[t];
        for m in 1..=n {
            let t = tri(n, m);
            let (q, dq, u) = (r2 * table.q[t], r2 * table.dq[t], r2 * table.q_over_sin[t]);
            let mf = m as f64;
            let pos = sh_index(n, m as i64);
            let neg = sh_index(n, -(m as i64));
            values[pos] = q * cos_m[m];
            values[neg] = q * sin_m[m];
            grads[pos] = e_theta * (dq * cos_m[m]) - e_phi * (mf * u * sin_m[m]);
            grads[neg] = e_theta * (dq * sin_m[m]) + e_phi * (mf * u * cos_m[m]);
        }
    }
    (values, grads)
}

/// `cos(mφ)`, `sin(mφ)` for `m = 0..=max` by angle addition.
fn multiple_angles(c: f64, s: f64, max: usize) -> (Vec<f64>, Vec<f64>) {
    let mut cos_m = vec![1.0; max + 1];
    let mut sin_m = vec![0.0; max + 1];
    for m in 1..=max {
        cos_m[m] = cos_m[m - 1] * c - sin_m[m - 1] * s;
        sin_m[m] = sin_m[m - 1] * c + cos_m[m - 1] * s;
    }
    (cos_m, sin_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        for i in 0..sh_count(40) {
            let (n, k) = sh_degree_order(i);
            assert!(k.unsigned_abs() as usize <= n);
            assert_eq!(sh_index(n, k), i);
        }
    }

    #[test]
    fn low_degree_closed_forms() {
        let p = Vector3::new(0.3, -0.4, (1.0f64 - 0.25).sqrt());
        let y = eval_all(&p, 2);
        let c1 = (3.0 / (4.0 * PI)).sqrt();
        assert!((y[sh_index(1, 0)] - c1 * p.z).abs() < 1e-15);
        assert!((y[sh_index(1, 1)] - c1 * p.x).abs() < 1e-15);
        assert!((y[sh_index(1, -1)] - c1 * p.y).abs() < 1e-15);
        let c2 = (5.0 / (16.0 * PI)).sqrt();
        assert!((y[sh_index(2, 0)] - c2 * (3.0 * p.z * p.z - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn pole_gradient_is_direction_independent() {
        let north = Vector3::new(0.0, 0.0, 1.0);
        let near = Vector3::new(1e-13, 2e-13, 1.0);
        let (_, g0) = eval_all_with_gradient(&north, 6);
        let (_, g1) = eval_all_with_gradient(&near, 6);
        for (a, b) in g0.iter().zip(&g1) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn degree_100_is_finite() {
        let p = Vector3::new(0.6, 0.0, 0.8);
        let (v, g) = eval_all_with_gradient(&p, 100);
        assert!(v.iter().all(|x| x.is_finite()));
        assert!(g.iter().all(|x| x.iter().all(|c| c.is_finite())));
    }
}
