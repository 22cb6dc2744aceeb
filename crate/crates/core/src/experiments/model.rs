use serde::Serialize;

use crate::error::{Error, Result};

/// Logarithmic stability bound `Φ(t) = C1/(r−1)² · |ln(C2/t)|^{−a}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityModel {
    pub c1: f64,
    pub c2: f64,
    pub a: f64,
    pub r: f64,
}

/// `a(r) = exp(−1/(r−1))`.
pub fn exponent_from_radius(r: f64) -> Result<f64> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("shell radius must exceed 1, got {r}")));
    }
    Ok((-1.0 / (r - 1.0)).exp())
}

impl StabilityModel {
    /// Model with `a` fixed by `r`.
    pub fn from_radius(c1: f64, c2: f64, r: f64) -> Result<Self> {
        Ok(Self {
            c1,
            c2,
            a: exponent_from_radius(r)?,
            r,
        })
    }

    /// `Φ(t)`, defined for `0 < t < C2`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < self.c2) {
            return Err(Error::InvalidParameter(format!(
                "Φ(t) needs 0 < t < C2 = {}, got {t}",
                self.c2
            )));
        }
        Ok(self.c1 / (self.r - 1.0).powi(2) * (self.c2 / t).ln().abs().powf(-self.a))
    }

    /// The amplitude `C1/(r−1)²`.
    pub fn amplitude(&self) -> f64 {
        self.c1 / (self.r - 1.0).powi(2)
    }
}

/// Least-squares fit of `y ≈ A·|ln(B/t)|^{−a}` with `a` fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogFit {
    pub model: StabilityModel,
    /// Residual sum of squares in `y`.
    pub rss: f64,
}

/// Least-squares fit of `y ≈ c·t^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub c: f64,
    pub p: f64,
    pub rss: f64,
}

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub const MIN_FIT_POINTS: usize = 4;

fn check_fit_data(t: &[f64], y: &[f64]) -> Result<()> {
    if t.len() != y.len() {
        return Err(Error::DimensionMismatch(format!("{} abscissae, {} values", t.len(), y.len())));
    }
    if t.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateFit(format!(
            "need at least {MIN_FIT_POINTS} points, got {}",
            t.len()
        )));
    }
    if t.iter().chain(y).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::DegenerateFit("abscissae and values must be positive and finite".into()));
    }
    Ok(())
}

/// Best amplitude for a fixed shape `g` and its RSS.
fn amplitude_fit(y: &[f64], g: &[f64]) -> (f64, f64) {
    let gg: f64 = g.iter().map(|v| v * v).sum();
    let gy: f64 = g.iter().zip(y).map(|(a, b)| a * b).sum();
    let amp = if gg > 0.0 { gy / gg } else { 0.0 };
    let rss = g.iter().zip(y).map(|(a, b)| (b - amp * a).powi(2)).sum();
    (amp, rss)
}

/// Minimizes `f` on `[lo, hi]`: a uniform scan followed by golden-section refinement
/// around the best scan point.
fn minimize_scalar(f: impl Fn(f64) -> f64, lo: f64, hi: f64, scan: usize) -> f64 {
    let step = (hi - lo) / scan as f64;
    let best = (0..=scan)
        .map(|i| lo + step * i as f64)
        .map(|x| (x, f(x)))
        .fold((lo, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    if f(x) <= best.1 {
        x
    } else {
        best.0
    }
}

/// Fits the logarithmic model with `a = a(r)`; `B` ranges over `(max t, ∞)`.
///
/// `B = max t · (1 + s)` with `ln s` scanned over `[−30, 30]`.
pub fn fit_log_model(t: &[f64], y: &[f64], r: f64) -> Result<LogFit> {
    check_fit_data(t, y)?;
    let a = exponent_from_radius(r)?;
    let tmax = t.iter().copied().fold(0.0, f64::max);
    let shape = |ls: f64| -> Vec<f64> {
        let b = tmax * (1.0 + ls.exp());
        t.iter().map(|ti| (b / ti).ln().powf(-a)).collect()
    };
    let rss_at = |ls: f64| amplitude_fit(y, &shape(ls)).1;
    let ls = minimize_scalar(rss_at, -30.0, 30.0, 600);
    let (amp, rss) = amplitude_fit(y, &shape(ls));
    let c2 = tmax * (1.0 + ls.exp());
    Ok(LogFit {
        model: StabilityModel {
            c1: amp * (r - 1.0).powi(2),
            c2,
            a,
            r,
        },
        rss,
    })
}

/// Fits `c·t^p` with `p ∈ [−2, 4]`.
pub fn fit_power_law(t: &[f64], y: &[f64]) -> Result<PowerFit> {
    check_fit_data(t, y)?;
    let shape = |p: f64| -> Vec<f64> { t.iter().map(|ti| ti.powf(p)).collect() };
    let p = minimize_scalar(|p| amplitude_fit(y, &shape(p)).1, -2.0, 4.0, 600);
    let (c, rss) = amplitude_fit(y, &shape(p));
    Ok(PowerFit { c, p, rss })
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::DegenerateFit("line fit needs at least 2 paired points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}
