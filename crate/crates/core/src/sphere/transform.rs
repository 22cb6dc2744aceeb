use nalgebra::Vector3;
use rayon::prelude::*;

use super::coeffs::ShCoeffs;
use super::grid::SphereGrid;
use super::legendre::{eval_all, eval_all_with_gradient, sh_count, sh_index};
use crate::error::{Error, Result};

/// `Y_{n,k}` at each point.
pub fn eval_scalar_sh(n: usize, k: i64, points: &[Vector3<f64>]) -> Result<Vec<f64>> {
    if k.unsigned_abs() as usize > n {
        return Err(Error::InvalidIndex(format!("|k| > n for (n, k) = ({n}, {k})")));
    }
    let i = sh_index(n, k);
    Ok(points.par_iter().map(|p| eval_all(p, n)[i]).collect())
}

/// Surface gradient `∇_𝕊 Y_{n,k}` at each point (Cartesian frame).
pub fn eval_scalar_sh_gradient(
    n: usize,
    k: i64,
    points: &[Vector3<f64>],
) -> Result<Vec<Vector3<f64>>> {
    if k.unsigned_abs() as usize > n {
        return Err(Error::InvalidIndex(format!("|k| > n for (n, k) = ({n}, {k})")));
    }
    let i = sh_index(n, k);
    Ok(points
        .par_iter()
        .map(|p| eval_all_with_gradient(p, n).1[i])
        .collect())
}

/// Quadrature projection onto `Y_{n,k}`, `n ≤ max_degree`.
pub fn sh_analysis(samples: &[f64], grid: &SphereGrid, max_degree: usize) -> Result<ShCoeffs> {
    if samples.len() != grid.len() {
        return Err(Error::GridMismatch {
            expected: grid.len(),
            found: samples.len(),
        });
    }
    if let Some(bad) = samples.iter().position(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite sample at node {bad}")));
    }
    grid.require_exactness(max_degree, 2 * max_degree)?;
    Ok(project_unchecked(samples, grid, max_degree))
}

/// Quadrature projection without the exactness check; used to approximate the
/// L² projection of functions that are not bandlimited.
pub(crate) fn project_unchecked(samples: &[f64], grid: &SphereGrid, max_degree: usize) -> ShCoeffs {
    let count = sh_count(max_degree);
    let chunk = 64;
    let partials: Vec<Vec<f64>> = grid
        .nodes()
        .par_chunks(chunk)
        .enumerate()
        .map(|(c, nodes)| {
            let mut acc = vec![0.0; count];
            for (j, p) in nodes.iter().enumerate() {
                let idx = c * chunk + j;
                let ws = grid.weights()[idx] * samples[idx];
                for (a, y) in acc.iter_mut().zip(eval_all(p, max_degree)) {
                    *a += ws * y;
                }
            }
            acc
        })
        .collect();
    let mut values = vec![0.0; count];
    for part in partials {
        for (v, p) in values.iter_mut().zip(part) {
            *v += p;
        }
    }
    ShCoeffs::from_vec(max_degree, values).expect("length matches by construction")
}

/// Pointwise `Σ c_{n,k} Y_{n,k}(x)`.
pub fn sh_synthesis(coeffs: &ShCoeffs, points: &[Vector3<f64>]) -> Vec<f64> {
    let n = coeffs.max_degree();
    points
        .par_iter()
        .map(|p| {
            eval_all(p, n)
                .iter()
                .zip(coeffs.values())
                .map(|(y, c)| y * c)
                .sum()
        })
        .collect()
}

/// Pointwise surface gradient `Σ c_{n,k} ∇_𝕊 Y_{n,k}(x)`.
pub fn sh_gradient_synthesis(coeffs: &ShCoeffs, points: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let n = coeffs.max_degree();
    points
        .par_iter()
        .map(|p| {
            let (_, grads) = eval_all_with_gradient(p, n);
            grads
                .iter()
                .zip(coeffs.values())
                .fold(Vector3::zeros(), |acc, (g, c)| acc + g * *c)
        })
        .collect()
}

/// Discrete L² norm of grid samples.
pub fn grid_l2_norm(samples: &[f64], grid: &SphereGrid) -> f64 {
    samples
        .iter()
        .zip(grid.weights())
        .map(|(s, w)| w * s * s)
        .sum::<f64>()
        .sqrt()
}
