//! Reference implementations used as test oracles. Nothing here calls into the
//! crate's harmonic or quadrature code.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Monomial coefficients of `d^m/dx^m P_n(x)`, lowest power first.
fn legendre_derivative_poly(n: usize, m: usize) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    for j in 0..=n / 2 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        p[n - 2 * j] = sign * binomial(n, j) * binomial(2 * n - 2 * j, n) / 2f64.powi(n as i32);
    }
    for _ in 0..m {
        p = (1..p.len()).map(|i| i as f64 * p[i]).collect();
        if p.is_empty() {
            p.push(0.0);
        }
    }
    p
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn derivative(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    (1..p.len()).map(|i| i as f64 * p[i]).collect()
}

fn norm_factor(n: usize, m: usize) -> f64 {
    let base = ((2 * n + 1) as f64 / (4.0 * PI) * factorial(n - m) / factorial(n + m)).sqrt();
    if m == 0 {
        base
    } else {
        base * 2f64.sqrt()
    }
}

fn trig(k: i64, phi: f64) -> (f64, f64) {
    let m = k.unsigned_abs() as f64;
    if k >= 0 {
        ((m * phi).cos(), -m * (m * phi).sin())
    } else {
        ((m * phi).sin(), m * (m * phi).cos())
    }
}

pub fn angles(p: &Vector3<f64>) -> (f64, f64) {
    let r = p.norm();
    let theta = (p.z / r).clamp(-1.0, 1.0).acos();
    let phi = p.y.atan2(p.x);
    (theta, phi)
}

/// `Y_{n,k}(θ, φ)` from the explicit Legendre polynomial (Rodrigues form),
/// real orthonormal, no Condon–Shortley phase; `k < 0` selects `sin |k|φ`.
pub fn ylm(n: usize, k: i64, theta: f64, phi: f64) -> f64 {
    let m = k.unsigned_abs() as usize;
    let q = legendre_derivative_poly(n, m);
    let (x, s) = (theta.cos(), theta.sin());
    norm_factor(n, m) * s.powi(m as i32) * horner(&q, x) * trig(k, phi).0
}

pub fn ylm_at(n: usize, k: i64, p: &Vector3<f64>) -> f64 {
    let (t, f) = angles(p);
    ylm(n, k, t, f)
}

/// Surface gradient of [`ylm`] in Cartesian components, from the analytic
/// derivative of the explicit polynomial.
pub fn ylm_grad(n: usize, k: i64, p: &Vector3<f64>) -> Vector3<f64> {
    let (theta, phi) = angles(p);
    let m = k.unsigned_abs() as usize;
    let q = legendre_derivative_poly(n, m);
    let dq = derivative(&q);
    let (x, s) = (theta.cos(), theta.sin());
    let c = norm_factor(n, m);
    let (t, dt) = trig(k, phi);
    let qx = horner(&q, x);
    // d/dθ [s^m Q(cos θ)] = m s^{m-1} cos θ Q − s^{m+1} Q'
    let dtheta = if m == 0 {
        -s * horner(&dq, x)
    } else {
        m as f64 * s.powi(m as i32 - 1) * x * qx - s.powi(m as i32 + 1) * horner(&dq, x)
    };
    // (1/s) ∂φ [s^m Q] trig = s^{m-1} Q trig'
    let dphi = if m == 0 { 0.0 } else { s.powi(m as i32 - 1) * qx * dt };
    let e_theta = Vector3::new(theta.cos() * phi.cos(), theta.cos() * phi.sin(), -theta.sin());
    let e_phi = Vector3::new(-phi.sin(), phi.cos(), 0.0);
    c * (e_theta * dtheta * t + e_phi * dphi)
}

/// Gauss–Legendre nodes and weights on `[a, b]` by Newton iteration on `P_count`.
pub fn gauss_rule(count: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut x = (PI * (i as f64 + 0.75) / (count as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=count {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if count == 1 { x } else { p1 };
            let pm = if count == 1 { 1.0 } else { p0 };
            dp = count as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w));
    }
    out
}

/// Product rule on the whole sphere integrating degree ≤ `2 * degree + 1` exactly.
pub fn sphere_rule(degree: usize) -> Vec<(Vector3<f64>, f64)> {
    let nt = degree + 1;
    let np = 2 * degree + 2;
    let mut out = Vec::with_capacity(nt * np);
    for (x, w) in gauss_rule(nt, -1.0, 1.0) {
        let s = (1.0 - x * x).sqrt();
        for j in 0..np {
            let phi = 2.0 * PI * j as f64 / np as f64;
            out.push((Vector3::new(s * phi.cos(), s * phi.sin(), x), w * 2.0 * PI / np as f64));
        }
    }
    out
}

pub fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Orthonormal frame `(e1, e2, x)` with `x` as third axis.
fn frame(x: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if x.z.abs() < 0.9 { Vector3::z() } else { Vector3::x() };
    let e1 = helper.cross(x).normalize();
    let e2 = x.cross(&e1);
    (e1, e2)
}

/// Gradient at the unit vector `x` of `u(x) = (1/4π) ∫_{𝕊_r} φ(y)/|x−y| dσ(y)`
/// with density `φ(y) = Y_{n,k}(y/r)`.
///
/// Local product quadrature in polar coordinates `(γ, α)` about `x`: graded
/// Gauss panels in `γ` toward the near-singular point and the periodic
/// trapezoidal rule in `α`.
pub fn newton_shell_gradient(n: usize, k: i64, r: f64, x: &Vector3<f64>) -> Vector3<f64> {
    let (e1, e2) = frame(x);
    let mut breaks = vec![0.0];
    let mut b = 1e-3;
    while b < PI {
        breaks.push(b);
        b *= 1.6;
    }
    breaks.push(PI);
    let azimuth = 64;
    let mut total = Vector3::zeros();
    for w in breaks.windows(2) {
        for (gamma, wg) in gauss_rule(24, w[0], w[1]) {
            let (sg, cg) = gamma.sin_cos();
            for j in 0..azimuth {
                let alpha = 2.0 * PI * j as f64 / azimuth as f64;
                let yhat = x * cg + (e1 * alpha.cos() + e2 * alpha.sin()) * sg;
                let y = yhat * r;
                let d = x - y;
                let dist = d.norm();
                let weight = wg * sg * 2.0 * PI / azimuth as f64 * r * r;
                total += -d / (dist * dist * dist) * ylm_at(n, k, &yhat) * weight;
            }
        }
    }
    total / (4.0 * PI)
}

/// Simple linear regression `(slope, intercept, R²)`.
pub fn linear_regression(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (slope, intercept, 1.0 - ss_res / ss_tot)
}
