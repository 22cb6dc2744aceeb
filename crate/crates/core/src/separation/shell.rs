use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vsh::{Channel, ChannelCoeffs};

/// Column weighting for external-source modes generated by a density on the
/// shell sphere `𝕊_r`.
///
/// A density `φ(y) = Σ c_{n,k} Y_{n,k}(y/r)` on `𝕊_r` has single-layer potential
/// `u(x) = (1/4π) ∫_{𝕊_r} φ(y)/|x−y| dσ(y)`, harmonic in the ball of radius
/// `r`. Its gradient on the unit sphere is `Σ w_n c_{n,k} G^ext_{n,k}` with
/// `w_n = r^{1−n}/(2n+1)`. Disabled weighting is `w_n ≡ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellWeighting {
    radius: Option<f64>,
}

impl ShellWeighting {
    /// Shell at radius `r > 1`.
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 1.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "shell radius must be finite and > 1, got {r}"
            )));
        }
        Ok(Self { radius: Some(r) })
    }

    /// Unit weights.
    pub fn disabled() -> Self {
        Self { radius: None }
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    pub fn is_enabled(&self) -> bool {
        self.radius.is_some()
    }

    /// `w_n = r^{1−n}/(2n+1)`, or 1 when disabled.
    pub fn column_weight(&self, n: usize) -> f64 {
        match self.radius {
            Some(r) => r.powi(1 - n as i32) / (2 * n + 1) as f64,
            None => 1.0,
        }
    }

    /// External field coefficients produced by density coefficients `c_{n,k}`.
    pub fn density_to_field(&self, density: &ChannelCoeffs) -> ChannelCoeffs {
        assert_eq!(density.channel(), Channel::Ext);
        let mut out = density.clone();
        for (v, (n, _, _)) in out.values_mut().iter_mut().zip(density.iter()) {
            *v *= self.column_weight(n);
        }
        out
    }

    /// Inverse of [`Self::density_to_field`].
    pub fn field_to_density(&self, field: &ChannelCoeffs) -> ChannelCoeffs {
        assert_eq!(field.channel(), Channel::Ext);
        let mut out = field.clone();
        for (v, (n, _, _)) in out.values_mut().iter_mut().zip(field.iter()) {
            *v /= self.column_weight(n);
        }
        out
    }

    /// `‖φ‖_{L²(𝕊_r)} = r ‖c‖₂` for density coefficients `c` (1 when disabled).
    pub fn density_norm(&self, density: &ChannelCoeffs) -> f64 {
        let c = density.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        self.radius.unwrap_or(1.0) * c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_positive_and_decreasing() {
        for r in [1.01, 1.1, 1.5, 3.0] {
            let s = ShellWeighting::new(r).unwrap();
            for n in 1..30 {
                let (a, b) = (s.column_weight(n), s.column_weight(n + 1));
                assert!(a > 0.0 && b > 0.0 && b < a);
            }
        }
        assert_eq!(ShellWeighting::disabled().column_weight(7), 1.0);
    }

    #[test]
    fn consecutive_ratio() {
        let s = ShellWeighting::new(1.1).unwrap();
        for n in 1..10 {
            let ratio = s.column_weight(n + 1) / s.column_weight(n);
            let expect = (2 * n + 1) as f64 / ((2 * n + 3) as f64 * 1.1);
            assert!((ratio - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_thin_or_negative_shell() {
        assert!(ShellWeighting::new(1.0).is_err());
        assert!(ShellWeighting::new(0.5).is_err());
        assert!(ShellWeighting::new(f64::NAN).is_err());
    }

    #[test]
    fn density_roundtrip_and_norm() {
        let s = ShellWeighting::new(1.5).unwrap();
        let mut c = ChannelCoeffs::zeros(Channel::Ext, 3);
        c.set(2, 1, 3.0).unwrap();
        c.set(3, -3, 4.0).unwrap();
        let back = s.field_to_density(&s.density_to_field(&c));
        for (a, b) in back.values().iter().zip(c.values()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((s.density_norm(&c) - 7.5).abs() < 1e-14);
    }
}
