use serde::{Deserialize, Serialize};

use super::legendre::{sh_count, sh_degree_order, sh_index};
use crate::error::{Error, Result};

/// Scalar spherical-harmonic coefficients `c_{n,k}`, `0 ≤ n ≤ N`, `|k| ≤ n`,
/// in the real orthonormal convention of [`crate::sphere`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShCoeffs {
    max_degree: usize,
    values: Vec<f64>,
}

impl ShCoeffs {
    pub fn zeros(max_degree: usize) -> Self {
        Self {
            max_degree,
            values: vec![0.0; sh_count(max_degree)],
        }
    }

    /// Unit coefficient vector `e_{(n,k)}` of degree `max_degree`.
    pub fn unit(max_degree: usize, n: usize, k: i64) -> Result<Self> {
        let mut c = Self::zeros(max_degree);
        c.set(n, k, 1.0)?;
        Ok(c)
    }

    pub fn from_vec(max_degree: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != sh_count(max_degree) {
            return Err(Error::DimensionMismatch(format!(
                "degree {max_degree} needs {} coefficients, got {}",
                sh_count(max_degree),
                values.len()
            )));
        }
        Ok(Self { max_degree, values })
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    fn check(&self, n: usize, k: i64) -> Result<usize> {
        if k.unsigned_abs() as usize > n {
            return Err(Error::InvalidIndex(format!("|k| > n for (n, k) = ({n}, {k})")));
        }
        if n > self.max_degree {
            return Err(Error::InvalidIndex(format!(
                "degree {n} exceeds max degree {}",
                self.max_degree
            )));
        }
        Ok(sh_index(n, k))
    }

    pub fn get(&self, n: usize, k: i64) -> Result<f64> {
        Ok(self.values[self.check(n, k)?])
    }

    pub fn set(&mut self, n: usize, k: i64, value: f64) -> Result<()> {
        let i = self.check(n, k)?;
        self.values[i] = value;
        Ok(())
    }

    /// Iterates `(n, k, value)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, v)| {
            let (n, k) = sh_degree_order(i);
            (n, k, *v)
        })
    }

    /// Euclidean norm of the coefficient vector, equal to the L² norm of
    /// the represented function.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Same coefficients at a different degree (truncating or zero-padding).
    pub fn with_max_degree(&self, max_degree: usize) -> Self {
        let mut out = Self::zeros(max_degree);
        let keep = sh_count(max_degree.min(self.max_degree));
        out.values[..keep].copy_from_slice(&self.values[..keep]);
        out
    }

    /// Multiplies every coefficient of degree `n` by `f(n)`.
    pub fn map_degrees(&self, f: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for n in 0..=self.max_degree {
            let s = f(n);
            for v in &mut out.values[n * n..(n + 1) * (n + 1)] {
                *v *= s;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let degree = self.max_degree.max(other.max_degree);
        let mut out = self.with_max_degree(degree);
        for (o, v) in out.values.iter_mut().zip(&other.values) {
            *o += v;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            max_degree: self.max_degree,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_order() {
        let c = ShCoeffs::zeros(3);
        assert!(c.get(2, 3).is_err());
        assert!(c.get(4, 0).is_err());
        assert!(ShCoeffs::unit(3, 1, -2).is_err());
    }

    #[test]
    fn degree_map_and_padding() {
        let mut c = ShCoeffs::zeros(2);
        c.set(2, -1, 4.0).unwrap();
        c.set(0, 0, 1.0).unwrap();
        let d = c.map_degrees(|n| n as f64);
        assert_eq!(d.get(2, -1).unwrap(), 8.0);
        assert_eq!(d.get(0, 0).unwrap(), 0.0);
        let e = c.with_max_degree(4);
        assert_eq!(e.values().len(), 25);
        assert_eq!(e.get(2, -1).unwrap(), 4.0);
        assert_eq!(e.with_max_degree(1).values().len(), 4);
    }
}
