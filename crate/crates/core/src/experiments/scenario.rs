use std::sync::Arc;

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::patch::{patch_quadrature, PatchGrid, PatchRegion};
use crate::separation::ShellWeighting;
use crate::sphere::SphereGrid;
use crate::vsh::{Channel, ChannelCoeffs, GridVectorField, VectorFieldCoeffs};

/// Everything a sweep or synthetic run needs.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioConfig {
    pub region: PatchRegion,
    /// Degree of the parent Gauss grid that is masked to the patch.
    pub grid_degree: usize,
    pub n_ext: usize,
    pub n_int: usize,
    /// Source-free shell radius; `None` disables shell weighting.
    pub shell_radius: Option<f64>,
    /// Degree of the true internal field.
    pub truth_int_degree: usize,
    /// Degree of the true external density (capped at 3).
    pub truth_ext_degree: usize,
    /// Bound `M` on the external density norm.
    pub density_bound: f64,
    /// Scale the density so its norm equals `M` exactly.
    pub normalize_density: bool,
    /// Noise level for a single synthetic run.
    pub noise_level: f64,
    /// Noise levels for the noise sweep.
    pub noise_levels: Vec<f64>,
    /// Degrees for the instability sweep.
    pub sweep_degrees: Vec<usize>,
    /// Radii for the shell sweep.
    pub shell_radii: Vec<f64>,
    /// Discrepancy factor τ: target residual is `τ·ε`.
    pub discrepancy_tau: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            region: PatchRegion::north_cap_deg(90.0).expect("valid cap"),
            grid_degree: 48,
            n_ext: 8,
            n_int: 8,
            shell_radius: Some(1.1),
            truth_int_degree: 8,
            truth_ext_degree: 3,
            density_bound: 1.0,
            normalize_density: true,
            noise_level: 0.0,
            noise_levels: vec![1e-2, 5e-3, 1e-3, 5e-4, 1e-4, 5e-5, 1e-5, 5e-6, 1e-6],
            sweep_degrees: (4..=16).collect(),
            shell_radii: vec![1.01, 1.05, 1.1, 1.5],
            discrepancy_tau: 1.0,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn shell(&self) -> Result<ShellWeighting> {
        match self.shell_radius {
            Some(r) => ShellWeighting::new(r),
            None => Ok(ShellWeighting::disabled()),
        }
    }

    /// Largest degree among the model and the truth.
    pub fn model_degree(&self) -> usize {
        self.n_ext
            .max(self.n_int)
            .max(self.truth_int_degree)
            .max(self.truth_ext_degree.clamp(1, 3))
    }

    /// Parent grid of degree `max(grid_degree, min_degree)`.
    pub fn parent_grid(&self, min_degree: usize) -> Arc<SphereGrid> {
        Arc::new(SphereGrid::gauss(self.grid_degree.max(min_degree)))
    }

    pub fn patch(&self, grid: Arc<SphereGrid>) -> Result<PatchGrid> {
        patch_quadrature(&self.region, grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ext < 1 {
            return Err(Error::InvalidParameter("n_ext must be at least 1".into()));
        }
        if !(self.density_bound > 0.0) {
            return Err(Error::InvalidParameter("density bound M must be positive".into()));
        }
        if !(self.noise_level >= 0.0) || self.noise_levels.iter().any(|e| !(*e >= 0.0)) {
            return Err(Error::InvalidParameter("noise levels must be nonnegative".into()));
        }
        if !(self.discrepancy_tau > 0.0) {
            return Err(Error::InvalidParameter("discrepancy tau must be positive".into()));
        }
        self.shell()?;
        Ok(())
    }
}

/// Output of [`synth_scenario`].
#[derive(Debug, Clone)]
pub struct Scenario {
    /// True ext (field units) and int coefficients.
    pub truth: VectorFieldCoeffs,
    /// External density coefficients on the shell.
    pub density: ChannelCoeffs,
    /// `‖φ₊‖_{L²(𝕊_r)}`.
    pub density_norm: f64,
    pub patch: PatchGrid,
    /// Exact synthesis at the patch nodes.
    pub clean: GridVectorField,
    /// `clean` plus noise.
    pub data: GridVectorField,
    /// `‖noise‖_{L²(U)³}`.
    pub noise_norm: f64,
}

/// RNG streams: truth uses stream 0, noise draw `i` uses stream `i + 1`.
pub(crate) fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random truth: dipole-dominated internal spectrum and a low-degree external
/// field generated by a density on the shell.
pub fn synth_truth(cfg: &ScenarioConfig) -> Result<(VectorFieldCoeffs, ChannelCoeffs, f64)> {
    cfg.validate()?;
    let mut rng = rng_stream(cfg.seed, 0);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };

    let mut int = ChannelCoeffs::zeros(Channel::Int, cfg.truth_int_degree);
    for n in 1..=cfg.truth_int_degree {
        let amp = 0.2 * 0.5f64.powi(n as i32 - 1);
        for k in -(n as i64)..=(n as i64) {
            let v = if n == 1 && k == 0 { -1.0 + 0.05 * normal() } else { amp * normal() };
            int.set(n, k, v)?;
        }
    }

    let ext_degree = cfg.truth_ext_degree.clamp(1, 3);
    let mut density = ChannelCoeffs::zeros(Channel::Ext, ext_degree);
    for n in 1..=ext_degree {
        for k in -(n as i64)..=(n as i64) {
            density.set(n, k, normal())?;
        }
    }
    let shell = cfg.shell()?;
    let raw = shell.density_norm(&density);
    let scale = if cfg.normalize_density || raw > cfg.density_bound {
        cfg.density_bound / raw
    } else {
        1.0
    };
    let density = density.scale(scale);
    let density_norm = shell.density_norm(&density);
    let ext = shell.density_to_field(&density);
    let truth = VectorFieldCoeffs {
        ext,
        int,
        ..VectorFieldCoeffs::empty()
    };
    Ok((truth, density, density_norm))
}

/// Gaussian noise on the patch nodes rescaled to `‖noise‖_{L²(U)³} = level` exactly.
pub fn patch_noise(pg: &PatchGrid, level: f64, seed: u64, stream: u64) -> Result<GridVectorField> {
    if !(level >= 0.0) {
        return Err(Error::InvalidParameter(format!("noise level must be ≥ 0, got {level}")));
    }
    let mut rng = rng_stream(seed, stream);
    let samples: Vec<Vector3<f64>> = (0..pg.len())
        .map(|_| {
            Vector3::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
        .collect();
    let raw = GridVectorField::new(samples)?;
    let norm = raw.weighted_norm(pg.weights())?;
    Ok(if level == 0.0 || norm == 0.0 {
        GridVectorField::zeros(pg.len())
    } else {
        raw.scale(level / norm)
    })
}

/// Truth plus noisy patch data at `cfg.noise_level`.
pub fn synth_scenario(cfg: &ScenarioConfig) -> Result<Scenario> {
    let (truth, density, density_norm) = synth_truth(cfg)?;
    let patch = cfg.patch(cfg.parent_grid(2 * cfg.model_degree()))?;
    let clean = GridVectorField::synthesize(&truth, &patch.nodes());
    let noise = patch_noise(&patch, cfg.noise_level, cfg.seed, 1)?;
    let noise_norm = noise.weighted_norm(patch.weights())?;
    let data = clean.add(&noise)?;
    Ok(Scenario {
        truth,
        density,
        density_norm,
        patch,
        clean,
        data,
        noise_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_data_is_exact() {
        let cfg = ScenarioConfig {
            grid_degree: 24,
            ..Default::default()
        };
        let s = synth_scenario(&cfg).unwrap();
        assert_eq!(s.noise_norm, 0.0);
        assert_eq!(s.data.samples(), s.clean.samples());
        assert!((s.density_norm - cfg.density_bound).abs() < 1e-12);
    }

    #[test]
    fn noise_level_is_exact() {
        let cfg = ScenarioConfig {
            grid_degree: 24,
            noise_level: 1e-3,
            ..Default::default()
        };
        let s = synth_scenario(&cfg).unwrap();
        assert!((s.noise_norm - 1e-3).abs() < 1e-15);
        assert!(synth_scenario(&ScenarioConfig { noise_level: -1.0, ..cfg }).is_err());
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = ScenarioConfig {
            grid_degree: 20,
            noise_level: 1e-2,
            seed: 7,
            ..Default::default()
        };
        let (a, b) = (synth_scenario(&cfg).unwrap(), synth_scenario(&cfg).unwrap());
        assert_eq!(a.truth, b.truth);
        assert_eq!(a.data.samples(), b.data.samples());
        let c = synth_scenario(&ScenarioConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.truth, c.truth);
    }

    #[test]
    fn dipole_dominates() {
        let (truth, _, _) = synth_truth(&ScenarioConfig::default()).unwrap();
        let d = truth.int.get(1, 0).unwrap().abs();
        assert!(truth.int.iter().filter(|(n, _, _)| *n > 1).all(|(_, _, v)| v.abs() < d));
    }
}
