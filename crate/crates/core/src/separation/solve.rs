use nalgebra::{DMatrix, DVector, SVD};
use serde::{Deserialize, Serialize};

use super::operator::OperatorMatrix;
use crate::error::{Error, Result};
use crate::vsh::{GridVectorField, VectorFieldCoeffs};

/// Default relative TSVD cut `σ_i/σ_max`.
pub const DEFAULT_TSVD_RELATIVE_CUT: f64 = 1e-8;

/// How the regularized least-squares problem is stabilized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Regularization {
    /// Keep the `rank` largest singular values.
    TsvdRank { rank: usize },
    /// Keep singular values with `σ_i/σ_max ≥ cut`.
    TsvdRelative { cut: f64 },
    /// Filter factors `σ²/(σ²+λ)`.
    Tikhonov { lambda: f64 },
    /// Tikhonov with λ chosen so that the data residual equals `tau · noise_level`.
    Discrepancy { noise_level: f64, tau: f64 },
}

impl Default for Regularization {
    fn default() -> Self {
        Regularization::TsvdRelative {
            cut: DEFAULT_TSVD_RELATIVE_CUT,
        }
    }
}

/// The method and parameter actually used for a solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularizationRecord {
    /// `"TSVD"` or `"Tikhonov"`.
    pub method: &'static str,
    /// Relative cut or truncation rank for TSVD, λ for Tikhonov.
    pub parameter: f64,
    /// Number of retained singular values (TSVD) or the numerical rank (Tikhonov).
    pub effective_rank: usize,
}

/// Output of [`separate_patch`].
#[derive(Debug, Clone, Serialize)]
pub struct SeparationResult {
    /// Recovered ext and int coefficients, ext in field-on-𝕊 units.
    pub coeffs: VectorFieldCoeffs,
    /// `‖A x − d‖`, the discrete L²(U)³ misfit.
    pub data_residual: f64,
    pub regularization: RegularizationRecord,
    /// Full spectrum of the operator, descending.
    pub singular_values: Vec<f64>,
}

/// Thin SVD of an operator, reusable across right-hand sides and parameters.
#[derive(Debug, Clone)]
pub struct SeparationSolver<'a> {
    op: &'a OperatorMatrix,
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    v_t: DMatrix<f64>,
}

fn sorted_svd(m: DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let svd = SVD::new(m, true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    (u, svd.singular_values.iter().copied().collect(), v_t)
}

/// Singular values of `A`, descending.
pub fn svd_spectrum(a: &OperatorMatrix) -> Vec<f64> {
    matrix_spectrum(a.matrix())
}

pub(crate) fn matrix_spectrum(m: &DMatrix<f64>) -> Vec<f64> {
    let reduced = if m.nrows() > m.ncols() {
        m.clone().qr().r()
    } else {
        m.clone()
    };
    let mut s: Vec<f64> = SVD::new(reduced, false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

impl<'a> SeparationSolver<'a> {
    pub fn new(op: &'a OperatorMatrix) -> Self {
        let a = op.matrix();
        let (u, sigma, v_t) = if a.nrows() > a.ncols() {
            let qr = a.clone().qr();
            let (q, r) = (qr.q(), qr.r());
            let (ur, s, vt) = sorted_svd(r);
            (q * ur, s, vt)
        } else {
            sorted_svd(a.clone())
        };
        Self { op, u, sigma, v_t }
    }

    pub fn operator(&self) -> &OperatorMatrix {
        self.op
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.sigma
    }

    /// Count of singular values above `max(m,n)·ε·σ_max`.
    pub fn numerical_rank(&self) -> usize {
        let smax = self.sigma.first().copied().unwrap_or(0.0);
        let tol = self.op.nrows().max(self.op.ncols()) as f64 * f64::EPSILON * smax;
        self.sigma.iter().filter(|s| **s > tol).count()
    }

    /// Regularized solution for data `d` sampled on the operator's patch nodes.
    pub fn solve(&self, d: &GridVectorField, reg: &Regularization) -> Result<SeparationResult> {
        let b = self.op.data_vector(d)?;
        let beta = self.u.tr_mul(&b);
        let rank = self.numerical_rank();
        let smax = self.sigma.first().copied().unwrap_or(0.0);
        let (filters, record) = match *reg {
            Regularization::TsvdRank { rank: k } => {
                if k == 0 || k > rank {
                    return Err(Error::InvalidParameter(format!(
                        "TSVD rank {k} must be in 1..={rank}"
                    )));
                }
                let f = (0..self.sigma.len()).map(|i| if i < k { 1.0 } else { 0.0 }).collect();
                (f, RegularizationRecord { method: "TSVD", parameter: k as f64, effective_rank: k })
            }
            Regularization::TsvdRelative { cut } => {
                if !(cut > 0.0 && cut <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "relative TSVD cut must lie in (0, 1], got {cut}"
                    )));
                }
                let keep = self.sigma.iter().filter(|s| **s >= cut * smax && **s > 0.0).count();
                let f = (0..self.sigma.len()).map(|i| if i < keep { 1.0 } else { 0.0 }).collect();
                (f, RegularizationRecord { method: "TSVD", parameter: cut, effective_rank: keep })
            }
            Regularization::Tikhonov { lambda } => {
                if !(lambda > 0.0) || !lambda.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "Tikhonov λ must be positive, got {lambda}"
                    )));
                }
                (self.tikhonov_filters(lambda), RegularizationRecord {
                    method: "Tikhonov",
                    parameter: lambda,
                    effective_rank: rank,
                })
            }
            Regularization::Discrepancy { noise_level, tau } => {
                if !(noise_level >= 0.0) || !(tau > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "discrepancy needs noise_level ≥ 0 and tau > 0, got {noise_level}, {tau}"
                    )));
                }
                let lambda = self.discrepancy_lambda(&b, &beta, tau * noise_level);
                (self.tikhonov_filters(lambda), RegularizationRecord {
                    method: "Tikhonov",
                    parameter: lambda,
                    effective_rank: rank,
                })
            }
        };
        let scaled = DVector::from_iterator(
            self.sigma.len(),
            self.sigma.iter().zip(&filters).zip(beta.iter()).map(|((s, f), bt)| {
                if *f == 0.0 || *s == 0.0 {
                    0.0
                } else {
                    f * bt / s
                }
            }),
        );
        let x = self.v_t.tr_mul(&scaled);
        let data_residual = (self.op.matrix() * &x - &b).norm();
        Ok(SeparationResult {
            coeffs: self.op.coeffs_from_solution(&x),
            data_residual,
            regularization: record,
            singular_values: self.sigma.clone(),
        })
    }

    fn tikhonov_filters(&self, lambda: f64) -> Vec<f64> {
        self.sigma.iter().map(|s| s * s / (s * s + lambda)).collect()
    }

    /// Residual norm of the Tikhonov solution as a function of λ, from the SVD.
    fn tikhonov_residual(&self, beta: &DVector<f64>, perp_sq: f64, lambda: f64) -> f64 {
        let inside: f64 = self
            .sigma
            .iter()
            .zip(beta.iter())
            .map(|(s, b)| {
                let r = lambda / (s * s + lambda) * b;
                r * r
            })
            .sum();
        (inside + perp_sq).sqrt()
    }

    /// λ with residual `target`, by bisection on `ln λ`; clamps to the bracket ends.
    fn discrepancy_lambda(&self, b: &DVector<f64>, beta: &DVector<f64>, target: f64) -> f64 {
        let smax = self.sigma.first().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
        let perp_sq = (b.norm_squared() - beta.norm_squared()).max(0.0);
        let (mut lo, mut hi) = ((1e-16 * smax).powi(2).ln(), (1e4 * smax * smax).ln());
        if self.tikhonov_residual(beta, perp_sq, lo.exp()) >= target {
            return lo.exp();
        }
        if self.tikhonov_residual(beta, perp_sq, hi.exp()) <= target {
            return hi.exp();
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.tikhonov_residual(beta, perp_sq, mid.exp()) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        (0.5 * (lo + hi)).exp()
    }
}

/// Regularized least-squares separation of patch data `d` (one sample per patch node).
pub fn separate_patch(
    d: &GridVectorField,
    a: &OperatorMatrix,
    reg: &Regularization,
) -> Result<SeparationResult> {
    SeparationSolver::new(a).solve(d, reg)
}
