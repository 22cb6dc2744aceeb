use nalgebra::Vector3;
use rayon::prelude::*;

use super::coeffs::{Channel, ChannelCoeffs, VectorFieldCoeffs};
use super::{vsh_norm_sq, VshFamily};
use crate::error::{Error, Result};
use crate::sphere::legendre::{eval_all_with_gradient, sh_index};
use crate::sphere::SphereGrid;

/// Cartesian field samples, one 3-vector per node of a grid (full sphere or patch).
#[derive(Debug, Clone, PartialEq)]
pub struct GridVectorField {
    samples: Vec<Vector3<f64>>,
}

impl GridVectorField {
    pub fn new(samples: Vec<Vector3<f64>>) -> Result<Self> {
        if let Some(i) = samples.iter().position(|s| !s.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidParameter(format!("non-finite sample at node {i}")));
        }
        Ok(Self { samples })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            samples: vec![Vector3::zeros(); len],
        }
    }

    /// Samples the field given by `coeffs` at `points`.
    pub fn synthesize(coeffs: &VectorFieldCoeffs, points: &[Vector3<f64>]) -> Self {
        Self {
            samples: vector_synthesis(coeffs, points),
        }
    }

    pub fn samples(&self) -> &[Vector3<f64>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::GridMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Self {
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|v| v * s).collect(),
        }
    }

    /// Discrete L² norm with the given node weights.
    pub fn weighted_norm(&self, weights: &[f64]) -> Result<f64> {
        if weights.len() != self.len() {
            return Err(Error::GridMismatch {
                expected: weights.len(),
                found: self.len(),
            });
        }
        Ok(self
            .samples
            .iter()
            .zip(weights)
            .map(|(v, w)| w * v.norm_squared())
            .sum::<f64>()
            .sqrt())
    }
}

/// Projects a full-sphere field onto the `(ext, int, df)` channels up to degree `max_degree`.
///
/// Dot products of two degree-`≤ N` vector harmonics restrict to degree-`≤ 2N`
/// functions on the sphere, so the grid must integrate degree `2N` exactly.
pub fn vector_analysis(
    field: &GridVectorField,
    grid: &SphereGrid,
    max_degree: usize,
) -> Result<VectorFieldCoeffs> {
    if field.len() != grid.len() {
        return Err(Error::GridMismatch {
            expected: grid.len(),
            found: field.len(),
        });
    }
    grid.require_exactness(max_degree, 2 * max_degree)?;

    let mut out = VectorFieldCoeffs::zeros(max_degree, max_degree, max_degree);
    let (ne, ni, nd) = (out.ext.values().len(), out.int.values().len(), out.df.values().len());
    let chunk = 64;
    let partials: Vec<Vec<f64>> = grid
        .nodes()
        .par_chunks(chunk)
        .enumerate()
        .map(|(c, nodes)| {
            let mut acc = vec![0.0; ne + ni + nd];
            for (j, p) in nodes.iter().enumerate() {
                let idx = c * chunk + j;
                let w = grid.weights()[idx];
                let f = field.samples[idx];
                let fr = p.dot(&f);
                let f_cross_eta = f.cross(p);
                let (y, g) = eval_all_with_gradient(p, max_degree);
                for n in 0..=max_degree {
                    let nf = n as f64;
                    for k in -(n as i64)..=(n as i64) {
                        let i = sh_index(n, k);
                        let gf = g[i].dot(&f);
                        acc[ne + i] += w * (gf - (nf + 1.0) * y[i] * fr);
                        if n >= 1 {
                            acc[i - 1] += w * (gf + nf * y[i] * fr);
                            acc[ne + ni + i - 1] += w * g[i].dot(&f_cross_eta);
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let mut acc = vec![0.0; ne + ni + nd];
    for part in partials {
        for (a, p) in acc.iter_mut().zip(part) {
            *a += p;
        }
    }
    for (channel, offset) in [(Channel::Ext, 0), (Channel::Int, ne), (Channel::Df, ne + ni)] {
        let family = channel.family();
        let target = out.channel_mut(channel);
        let mut scaled = Vec::with_capacity(target.values().len());
        for (i, (n, _, _)) in target.iter().enumerate() {
            scaled.push(acc[offset + i] / vsh_norm_sq(family, n)?);
        }
        target.values_mut().copy_from_slice(&scaled);
    }
    Ok(out)
}

/// Pointwise channel sums `Σ a G^ext + Σ b G^int + Σ d Φ`.
pub fn vector_synthesis(coeffs: &VectorFieldCoeffs, points: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let Some(max_degree) = coeffs.max_degree() else {
        return vec![Vector3::zeros(); points.len()];
    };
    points
        .par_iter()
        .map(|p| {
            let eta = p / p.norm();
            let (y, g) = eval_all_with_gradient(&eta, max_degree);
            let mut acc = Vector3::zeros();
            for channel in Channel::ALL {
                acc += channel_sum(coeffs.channel(channel), &eta, &y, &g);
            }
            acc
        })
        .collect()
}

fn channel_sum(c: &ChannelCoeffs, eta: &Vector3<f64>, y: &[f64], g: &[Vector3<f64>]) -> Vector3<f64> {
    let family: VshFamily = c.channel().family();
    c.iter()
        .filter(|(_, _, v)| *v != 0.0)
        .fold(Vector3::zeros(), |acc, (n, k, v)| {
            let i = sh_index(n, k);
            acc + family.combine(n, eta, y[i], &g[i]) * v
        })
}
