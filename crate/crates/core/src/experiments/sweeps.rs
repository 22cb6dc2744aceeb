use rayon::prelude::*;
use serde::Serialize;

use super::model::{fit_line, fit_log_model, fit_power_law, LinearFit, LogFit, PowerFit, MIN_FIT_POINTS};
use super::scenario::{patch_noise, synth_truth, ScenarioConfig};
use crate::error::{Error, Result};
use crate::patch::PatchGrid;
use crate::separation::{
    assemble_modes, assemble_restriction, best_patch_approx, svd_spectrum, Regularization, SeparationSolver,
    ShellWeighting,
};
use crate::vsh::{Channel, GridVectorField, VectorFieldCoeffs};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstabilityRow {
    pub n: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub approx_error: f64,
    pub blowup_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstabilitySweep {
    pub rows: Vec<InstabilityRow>,
    /// Same sweep on the full sphere.
    pub control: Vec<InstabilityRow>,
    /// Line fit of `ln σ_min` against `N`.
    pub log_sigma_fit: LinearFit,
    /// `‖f₊‖_{L²(𝕊)}` of the approximated field `G^ext_{1,0}`.
    pub fplus_norm: f64,
}

fn instability_row(n: usize, pg: &PatchGrid, fplus: &VectorFieldCoeffs) -> Result<InstabilityRow> {
    let a = assemble_restriction(n, n, pg, None)?;
    let s = svd_spectrum(&a);
    let best = best_patch_approx(fplus, n, pg)?;
    Ok(InstabilityRow {
        n,
        sigma_min: *s.last().expect("nonempty spectrum"),
        sigma_max: s[0],
        approx_error: best.approx_error,
        blowup_norm: best.blowup_norm,
    })
}

/// Spectrum extremes of `A_U` with `N_ext = N_int = N`, and the best int
/// approximation of `G^ext_{1,0}` on the patch, for each configured `N`.
pub fn run_instability_sweep(cfg: &ScenarioConfig) -> Result<InstabilitySweep> {
    cfg.validate()?;
    if cfg.sweep_degrees.len() < 2 || cfg.sweep_degrees.contains(&0) {
        return Err(Error::InvalidParameter("need at least two sweep degrees, all ≥ 1".into()));
    }
    let max_n = *cfg.sweep_degrees.iter().max().expect("nonempty");
    let grid = cfg.parent_grid(2 * max_n);
    let pg = cfg.patch(grid.clone())?;
    let full = PatchGrid::full_sphere(grid);
    let fplus = VectorFieldCoeffs::single(Channel::Ext, 1, 0)?;
    let rows = cfg
        .sweep_degrees
        .par_iter()
        .map(|&n| instability_row(n, &pg, &fplus))
        .collect::<Result<Vec<_>>>()?;
    let control = cfg
        .sweep_degrees
        .par_iter()
        .map(|&n| instability_row(n, &full, &fplus))
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.sigma_min.max(f64::MIN_POSITIVE).ln()).collect();
    Ok(InstabilitySweep {
        log_sigma_fit: fit_line(&x, &y)?,
        rows,
        control,
        fplus_norm: fplus.norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellRow {
    /// `None` for the unweighted operator.
    pub r: Option<f64>,
    pub cond_number: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Condition number of the ext block alone.
    pub cond_ext: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShellSweep {
    pub n_ext: usize,
    pub n_int: usize,
    /// First row is the unweighted operator, then the configured radii in order.
    pub rows: Vec<ShellRow>,
}

impl ShellSweep {
    /// Rows with a shell, in configured order.
    pub fn shell_rows(&self) -> impl Iterator<Item = &ShellRow> {
        self.rows.iter().filter(|r| r.r.is_some())
    }
}

fn cond(s: &[f64]) -> f64 {
    let min = *s.last().expect("nonempty spectrum");
    if min > 0.0 {
        s[0] / min
    } else {
        f64::INFINITY
    }
}

/// Condition numbers of the shell-weighted operator at fixed degree and patch.
pub fn run_shell_sweep(cfg: &ScenarioConfig) -> Result<ShellSweep> {
    cfg.validate()?;
    if let Some(r) = cfg.shell_radii.iter().find(|r| !(**r > 1.0)) {
        return Err(Error::InvalidParameter(format!(
            "shell radius {r} ≤ 1: the source-free shell vanishes"
        )));
    }
    let grid = cfg.parent_grid(2 * cfg.model_degree());
    let pg = cfg.patch(grid)?;
    let mut shells = vec![ShellWeighting::disabled()];
    for r in &cfg.shell_radii {
        shells.push(ShellWeighting::new(*r)?);
    }
    let rows = shells
        .par_iter()
        .map(|shell| -> Result<ShellRow> {
            let s = svd_spectrum(&assemble_restriction(cfg.n_ext, cfg.n_int, &pg, Some(shell))?);
            let se = svd_spectrum(&assemble_modes(Some(cfg.n_ext), None, &pg, *shell)?);
            Ok(ShellRow {
                r: shell.radius(),
                cond_number: cond(&s),
                sigma_min: *s.last().expect("nonempty"),
                sigma_max: s[0],
                cond_ext: cond(&se),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShellSweep {
        n_ext: cfg.n_ext,
        n_int: cfg.n_int,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseRow {
    pub eps: f64,
    pub separation_error: f64,
    pub data_residual: f64,
    pub lambda: f64,
}

/// A pair of consecutive noise levels with ratio 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalvingCheck {
    pub eps: f64,
    pub eps_half: f64,
    /// `error(ε/2) / error(ε)`.
    pub error_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseSweep {
    pub r: f64,
    pub rows: Vec<NoiseRow>,
    pub log_fit: LogFit,
    pub power_fit: PowerFit,
    pub halvings: Vec<HalvingCheck>,
}

impl NoiseSweep {
    /// The logarithmic model fits at least as well as the best power law.
    pub fn log_model_preferred(&self) -> bool {
        self.log_fit.rss <= self.power_fit.rss
    }

    /// No halving of ε halved the separation error.
    pub fn halving_never_halves(&self) -> bool {
        self.halvings.iter().all(|h| h.error_ratio > 0.5)
    }
}

/// `‖Δf₊‖_{L²(𝕊)} + ‖Δf₋‖_{L²(𝕊)}`.
pub fn separation_error(recovered: &VectorFieldCoeffs, truth: &VectorFieldCoeffs) -> f64 {
    let d = recovered.sub(truth);
    d.ext.field_norm() + d.int.field_norm()
}

/// Synthetic truth, noisy patch data at each level, discrepancy-matched
/// Tikhonov separation, and fits of the error against ε.
pub fn run_noise_sweep(cfg: &ScenarioConfig) -> Result<NoiseSweep> {
    cfg.validate()?;
    let r = cfg
        .shell_radius
        .ok_or_else(|| Error::InvalidParameter("noise sweep needs a shell radius".into()))?;
    let levels = &cfg.noise_levels;
    if levels.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateFit(format!(
            "need at least {MIN_FIT_POINTS} noise levels, got {}",
            levels.len()
        )));
    }
    if levels.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter("sweep noise levels must be positive".into()));
    }
    let (lo, hi) = levels
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), e| (a.min(*e), b.max(*e)));
    if hi / lo < 1e3 * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter("noise levels must span at least 3 decades".into()));
    }
    let (truth, _, _) = synth_truth(cfg)?;
    let pg = cfg.patch(cfg.parent_grid(2 * cfg.model_degree()))?;
    let shell = cfg.shell()?;
    let op = assemble_restriction(cfg.n_ext, cfg.n_int, &pg, Some(&shell))?;
    let solver = SeparationSolver::new(&op);
    let clean = GridVectorField::synthesize(&truth, &pg.nodes());
    let rows = levels
        .par_iter()
        .enumerate()
        .map(|(i, &eps)| -> Result<NoiseRow> {
            let noise = patch_noise(&pg, eps, cfg.seed, i as u64 + 1)?;
            let d = clean.add(&noise)?;
            let reg = Regularization::Discrepancy {
                noise_level: eps,
                tau: cfg.discrepancy_tau,
            };
            let res = solver.solve(&d, &reg)?;
            Ok(NoiseRow {
                eps,
                separation_error: separation_error(&res.coeffs, &truth),
                data_residual: res.data_residual,
                lambda: res.regularization.parameter,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let err: Vec<f64> = rows.iter().map(|r| r.separation_error).collect();
    let halvings = rows
        .windows(2)
        .filter(|w| (w[0].eps / w[1].eps - 2.0).abs() < 1e-9)
        .map(|w| HalvingCheck {
            eps: w[0].eps,
            eps_half: w[1].eps,
            error_ratio: w[1].separation_error / w[0].separation_error,
        })
        .collect();
    Ok(NoiseSweep {
        r,
        log_fit: fit_log_model(&eps, &err, r)?,
        power_fit: fit_power_law(&eps, &err)?,
        rows,
        halvings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScenarioConfig {
        ScenarioConfig {
            grid_degree: 16,
            n_ext: 4,
            n_int: 4,
            truth_int_degree: 4,
            sweep_degrees: vec![2, 3, 4, 5],
            noise_levels: vec![1e-2, 5e-3, 1e-3, 1e-4, 1e-5],
            ..Default::default()
        }
    }

    #[test]
    fn instability_sweep_shape() {
        let s = run_instability_sweep(&small()).unwrap();
        assert_eq!(s.rows.len(), 4);
        assert!(s.rows.iter().all(|r| r.sigma_min > 0.0));
        for r in &s.control {
            assert!((r.approx_error - s.fplus_norm).abs() < 1e-9);
        }
    }

    #[test]
    fn shell_sweep_includes_unweighted_row() {
        let s = run_shell_sweep(&small()).unwrap();
        assert_eq!(s.rows.len(), 5);
        assert!(s.rows[0].r.is_none());
        let bad = ScenarioConfig {
            shell_radii: vec![1.0],
            ..small()
        };
        assert!(run_shell_sweep(&bad).is_err());
    }

    #[test]
    fn noise_sweep_validation() {
        let few = ScenarioConfig {
            noise_levels: vec![1e-2, 1e-3, 1e-5],
            ..small()
        };
        assert!(matches!(run_noise_sweep(&few), Err(Error::DegenerateFit(_))));
        let narrow = ScenarioConfig {
            noise_levels: vec![1e-2, 5e-3, 2e-3, 1e-3 * 1.5],
            ..small()
        };
        assert!(run_noise_sweep(&narrow).is_err());
        let s = run_noise_sweep(&small()).unwrap();
        assert_eq!(s.rows.len(), 5);
        assert_eq!(s.halvings.len(), 1);
    }
}
