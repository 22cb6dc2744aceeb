use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use super::config::RunConfig;
use super::formats::{field_csv_len, read_field_csv, write_field_csv, write_sh_coeffs, write_vector_coeffs};
use super::svg::{emit_svg_lineplot, PlotSpec};
use super::table::{Cell, Table};
use crate::error::Error;
use crate::experiments::{
    run_instability_sweep, run_noise_sweep, run_shell_sweep, separation_error, synth_scenario, ScenarioConfig,
};
use crate::hardy::decompose_global;
use crate::patch::{patch_quadrature, PatchGrid};
use crate::separation::{
    assemble_restriction, best_patch_approx, build_kernel_pair, separate_patch, svd_spectrum, tapered_indicator,
    OperatorMatrix,
};
use crate::sphere::{ShCoeffs, SphereGrid};
use crate::vsh::{Channel, VectorFieldCoeffs};

/// The subcommands of the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SeparateGlobal,
    Assemble,
    Svd,
    SeparatePatch,
    KernelDemo,
    DensityDemo,
    InstabilitySweep,
    ShellSweep,
    NoiseSweep,
    Synth,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::SeparateGlobal,
        Command::Assemble,
        Command::Svd,
        Command::SeparatePatch,
        Command::KernelDemo,
        Command::DensityDemo,
        Command::InstabilitySweep,
        Command::ShellSweep,
        Command::NoiseSweep,
        Command::Synth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::SeparateGlobal => "separate-global",
            Command::Assemble => "assemble",
            Command::Svd => "svd",
            Command::SeparatePatch => "separate-patch",
            Command::KernelDemo => "kernel-demo",
            Command::DensityDemo => "density-demo",
            Command::InstabilitySweep => "instability-sweep",
            Command::ShellSweep => "shell-sweep",
            Command::NoiseSweep => "noise-sweep",
            Command::Synth => "synth",
        }
    }
}

/// Failure of a command, classified for the process exit code.
#[derive(Debug)]
pub enum CommandError {
    /// Bad configuration, inputs or files (exit code 2).
    Config(String),
    /// A numerical contract was violated (exit code 3).
    Numerical(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 2,
            CommandError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommandError::Config(m) => write!(f, "configuration error: {m}"),
            CommandError::Numerical(m) => write!(f, "numerical contract violated: {m}"),
        }
    }
}

impl std::error::Error for CommandError {}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidIndex(_)
            | Error::GridTooCoarse { .. }
            | Error::GridMismatch { .. }
            | Error::InvalidRegion(_)
            | Error::EmptyPatch { .. }
            | Error::InvalidParameter(_)
            | Error::DimensionMismatch(_) => CommandError::Config(e.to_string()),
            Error::NotConstantOnPatch { .. }
            | Error::TrivialKernelPair
            | Error::DegenerateFit(_)
            | Error::NumericalContract(_) => CommandError::Numerical(e.to_string()),
        }
    }
}

/// A named pass/fail observation recorded in the report.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, pass: bool) -> Self {
        Self {
            name: name.to_string(),
            pass,
        }
    }
}

/// Files written and checks made by a command.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
    pub summary: Vec<String>,
}

struct Writer<'a> {
    dir: &'a Path,
    outcome: Outcome,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path) -> Result<Self, CommandError> {
        fs::create_dir_all(dir)
            .map_err(|e| CommandError::Config(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir,
            outcome: Outcome::default(),
        })
    }

    fn file(&mut self, name: &str, content: &str) -> Result<(), CommandError> {
        let path = self.dir.join(name);
        fs::write(&path, content).map_err(|e| CommandError::Config(format!("cannot write {}: {e}", path.display())))?;
        self.outcome.files.push(path);
        Ok(())
    }

    fn table(&mut self, stem: &str, table: &Table, plot: Option<PlotSpec>) -> Result<(), CommandError> {
        self.file(&format!("{stem}.csv"), &table.to_csv())?;
        if let Some(spec) = plot {
            self.file(&format!("{stem}.svg"), &emit_svg_lineplot(table, &spec)?)?;
        }
        Ok(())
    }

    fn check(&mut self, name: &str, pass: bool) {
        self.outcome.checks.push(Check::new(name, pass));
    }

    fn say(&mut self, line: String) {
        self.outcome.summary.push(line);
    }

    fn report(&mut self, cfg: &RunConfig, results: serde_json::Value) -> Result<(), CommandError> {
        let files: Vec<String> = self
            .outcome
            .files
            .iter()
            .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
            .collect();
        let report = json!({
            "command": cfg.command,
            "config": cfg.values,
            "seed": cfg.get("seed"),
            "results": results,
            "checks": self.outcome.checks,
            "files": files,
        });
        let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        self.file("report.json", &text)
    }
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn sci_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", items.join(", "))
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn read_input(cfg: &RunConfig) -> Result<String, CommandError> {
    let path = cfg.str("input")?;
    fs::read_to_string(path).map_err(|e| CommandError::Config(format!("cannot read input '{path}': {e}")))
}

fn operator_for(scn: &ScenarioConfig) -> Result<(PatchGrid, OperatorMatrix), CommandError> {
    let grid = scn.parent_grid(2 * scn.model_degree());
    let pg = scn.patch(grid)?;
    let shell = scn.shell()?;
    let a = assemble_restriction(scn.n_ext, scn.n_int, &pg, Some(&shell))?;
    Ok((pg, a))
}

/// Runs `command` with configuration `cfg`, writing outputs into `out_dir`.
pub fn run_command(command: Command, cfg: &RunConfig, out_dir: &Path) -> Result<Outcome, CommandError> {
    let mut w = Writer::new(out_dir)?;
    match command {
        Command::SeparateGlobal => separate_global(cfg, &mut w)?,
        Command::Assemble => assemble(cfg, &mut w)?,
        Command::Svd => svd(cfg, &mut w)?,
        Command::SeparatePatch => separate(cfg, &mut w)?,
        Command::KernelDemo => kernel_demo(cfg, &mut w)?,
        Command::DensityDemo => density_demo(cfg, &mut w)?,
        Command::InstabilitySweep => instability(cfg, &mut w)?,
        Command::ShellSweep => shell(cfg, &mut w)?,
        Command::NoiseSweep => noise(cfg, &mut w)?,
        Command::Synth => synth(cfg, &mut w)?,
    }
    Ok(w.outcome)
}

fn separate_global(cfg: &RunConfig, w: &mut Writer) -> Result<(), CommandError> {
    let text = read_input(cfg)?;
    let len = field_csv_len(&text);
    let n = ((len as f64 / 2.0).sqrt().round() as usize).saturating_sub(1);
    if 2 * (n + 1) * (n + 1) != len || len == 0 {
        return Err(CommandError::Config(format!(
            "input has {len} nodes, which is not a Gauss grid size 2(N+1)²"
        )));
    }
    let grid = SphereGrid::gauss(n);
    let field = read_field_csv(&text, grid.nodes())?;
    let degree = cfg.usize("degree")?;
    let dec = decompose_global(&field, &grid, degree)?;
    w.file("coeffs.txt", &write_vector_coeffs(&dec.coeffs))?;
    w.check("bandlimited_input", !dec.bandlimit_warning());
    w.say(format!("grid degree {n}, analysis degree {degree}, relative residual {:.3e}", dec.residual));
    if dec.bandlimit_warning() {
        w.say("warning: input carries energy above the analysis degree".into());
    }
    w.report(
        cfg,
        json!({
            "grid_degree": n,
            "residual": dec.residual,
            "bandlimit_warning": dec.bandlimit_warning(),
            "channel_norms": {
                "ext": dec.coeffs.ext.field_norm(),
                "int": dec.coeffs.int.field_norm(),
                "df": dec.coeffs.df.field_norm(),
            },
        }),
    )
}

fn column_label(c: &crate::separation::ColumnMeta) -> String {
    format!("{}_{}_{}", c.channel, c.n, c.k)
}

fn assemble(cfg: &RunConfig, w: &mut Writer) -> Result<(), CommandError> {
    let scn = cfg.scenario()?;
    let (pg, a) = operator_for(&scn)?;
    let mut header = vec!["node".to_string(), "component".to_string()];
    header.extend(a.columns().iter().map(column_label));
    let mut t = Table::new(header);
    for (i, row) in a.rows().iter().enumerate() {
        let mut cells = vec![Cell::from(row.node), Cell::from(row.component)];
        cells.extend(a.matrix().row(i).iter().map(|v| Cell::Float(*v)));
        t.push(cells);
    }
    w.table("operator", &t, None)?;
    let mut cols = Table::new(["index", "channel", "n", "k", "column_weight"]);
    for (i, c) in a.columns().iter().enumerate() {
        cols.push(vec![i.into(), c.channel.name().into(), c.n.into(), c.k.into(), c.column_weight.into()]);
    }
    w.table("columns", &cols, None)?;
    w.say(format!("{} x {} operator on {} patch nodes", a.nrows(), a.ncols(), pg.len()));
    for warn in a.warnings() {
        w.say(format!("warning: {warn}"));
    }
    w.report(
        cfg,
        json!({
            "rows": a.nrows(),
            "columns": a.ncols(),
            "patch_nodes": pg.len(),
            "patch_area": pg.area(),
            "shell_radius": a.shell_radius(),
            "warnings": a.warnings(),
        }),
    )
}

/// Ratio below which σ_min is indistinguishable from zero in double precision.
pub const INJECTIVITY_THRESHOLD: f64 = 1e3 * f64::EPSILON;

fn svd(cfg: &RunConfig, w: &mut Writer) -> Result<(), CommandError> {
    let scn = cfg.scenario()?;
    let (_, a) = operator_for(&scn)?;
    let s = svd_spectrum(&a);
    let mut t = Table::new(["index", "sigma", "sigma_rel"]);
    for (i, v) in s.iter().enumerate() {
        t.push(vec![i.into(), (*v).into(), (v / s[0]).into()]);
    }
    let plot = s
        .iter()
        .all(|v| *v > 0.0)
        .then(|| PlotSpec::new("singular values", "index", &["sigma_rel"]).log_y());
    w.table("spectrum", &t, plot)?;
    let (smax, smin) = (s[0], *s.last().expect("nonempty"));
    let injective = smin > INJECTIVITY_THRESHOLD * smax;
    w.check("sigma_min_above_working_precision", injective);
    w.say(format!("sigma_max {smax:.6e}, sigma_min {smin:.6e}, ratio {:.3e}", smin / smax));
    w.report(
        cfg,
        json!({
            "sigma_max": smax,
            "sigma_min": smin,
            "condition_number": smax / smin,
            "singular_values": s,
        }),
    )?;
    if cfg.bool("assert.injective")? && !injective {
        return Err(CommandError::Numerical(format!(
            "sigma_min/sigma_max = {:.3e} is below {INJECTIVITY_THRESHOLD:.3e}",
            smin / smax
        )));
    }
    Ok(())
}

fn separate(cfg: &RunConfig, w: &mut Writer) -> Result<(), CommandError> {
    let scn = cfg.scenario()?;
    let (pg, a) = operator_for(&scn)?;
    let reg = cfg.regularization()?;
    let (data, truth) = if cfg.get("input").is_some() {
        (read_field_csv(&read_input(cfg)?, &pg.nodes())?, None)
    } else {
        let s = synth_scenario(&scn)?;
        (s.data, Some(s.truth))
    };
    let res = separate_patch(&data, &a, &reg)?;
    w.file("coeffs.txt", &write_vector_coeffs(&res.coeffs))?;
    let error = truth.as_ref().map(|t| separation_error(&res.coeffs, t));
    w.say(format!(
        "{} (parameter {:.3e}, rank {}), data residual {:.3e}",
        res.regularization.method, res.regularization.parameter, res.regularization.effective_rank, res.data_residual
    ));
    if let Some(e) = error {
        w.say(format!("separation error against synthetic truth {e:.3e}"));
    }
    w.report(
        cfg,
        json!({
            "data_residual": res.data_residual,
            "regularization": res.regularization,
            "singular_values": res.singular_values,
            "separation_error": error,
            "ext_norm": res.coeffs.ext.field_norm(),
            "int_norm": res.coeffs.int.field_norm(),
        }),
    )
}

fn kernel_demo(cfg: &RunConfig, w: &mut Writer) -> Result<(), CommandError> {
    let region = cfg.region()?;
    let collar = cfg.f64("kernel.collar")?;
    let tol = cfg.f64("kernel.tolerance")?;
    let h2_scale = cfg.f64("kernel.h2_scale")?;
    let degrees = cfg.usizes("kernel.degrees")?;
    let grid_degree = cfg.usize("grid.degree")?;
    let mut t = Table::new(["N", "patch_residual", "h1_deviation", "fplus_norm", "fminus_norm"]);
    let mut residuals = Vec::new();
    let mut last = None;
    for &n in &degrees {
        let grid = Arc::new(SphereGrid::gauss(grid_degree.max(2 * n + 16)));
        let pg = patch_quadrature(&region, grid)?;
        let h1 = tapered_indicator(&region, collar, n)?;
        let mut one = ShCoeffs::zeros(n);
        one.set(0, 0, (4.0 * PI).sqrt())?;
        let h2 = one.add(&h1.scale(-1.0)).scale(h2_scale);
        let pair = build_kernel_pair(&h1, &h2, n, &pg, tol)?;
        t.push(vec![
            n.into(),
            pair.patch_residual.into(),
            pair.h1_deviation.into(),
            pair.fplus.norm().into(),
            pair.fminus.norm().into(),
        ]);
        residuals.push(pair.patch_residual);
        last = Some(pair);
    }
    let plot = (degrees.len() >= 2).then(|| PlotSpec::new("annihilation residual", "N", &["patch_residual"]).log_y());
    w.table("kernel", &t, plot)?;
    if let Some(pair) = &last {
        w.file("kernel_fplus.txt", &write_vector_coeffs(&pair.fplus))?;
        w.file("kernel_fminus.txt", &write_vector_coeffs(&pair.fminus))?;
    }
    w.check("residual_decreasing", strictly_decreasing(&residuals));
    w.say(format!("annihilation residuals {}", sci_list(&residuals)));
    w.report(cfg, json!({ "table": t }))
}

fn density_demo(cfg: &RunConfig, w: &mut Writer) -> Result<(), CommandError> {
    let region = cfg.region()?;
    let degrees = cfg.usizes("density.degrees")?;
    let max_n = degrees.iter().copied().max().unwrap_or(1);
    let grid = Arc::new(SphereGrid::gauss(cfg.usize("grid.degree")?.max(2 * max_n)));
    let pg = patch_quadrature(&region, grid)?;
    let fplus = VectorFieldCoeffs::single(Channel::Ext, 1, 0)?;
    let mut t = Table::new(["N", "approx_error", "blowup_norm"]);
    let (mut errs, mut norms) = (Vec::new(), Vec::new());
    for &n in &degrees {
        let b = best_patch_approx(&fplus, n, &pg)?;
        t.push(vec![n.into(), b.approx_error.into(), b.blowup_norm.into()]);
        errs.push(b.approx_error);
        norms.push(b.blowup_norm);
    }
    let plot = (degrees.len() >= 2).then(|| PlotSpec::new("best int approximation of G^ext_1,0", "N", &["approx_error", "blowup_norm"]).log_y());
    w.table("density", &t, plot)?;
    w.check("approx_error_decreasing", strictly_decreasing(&errs));
    w.check("blowup_norm_increasing", strictly_increasing(&norms));
    w.say(format!("misfit {}, norm {}", sci_list(&errs), sci_list(&norms)));
    w.report(cfg, json!({ "fplus_norm": fplus.norm(), "table": t }))
}

fn instability(cfg: &RunConfig, w: &mut Writer) -> Result<(), CommandError> {
    let scn = cfg.scenario()?;
    let s = run_instability_sweep(&scn)?;
    let table = |rows: &[crate::experiments::InstabilityRow]| {
        let mut t = Table::new(["N", "sigma_min", "sigma_max", "approx_error", "blowup_norm"]);
        for r in rows {
            t.push(vec![r.n.into(), r.sigma_min.into(), r.sigma_max.into(), r.approx_error.into(), r.blowup_norm.into()]);
        }
        t
    };
    let positive = s.rows.iter().all(|r| r.sigma_min > 0.0);
    let plot = positive.then(|| PlotSpec::new("patch operator spectrum", "N", &["sigma_min", "sigma_max"]).log_y());
    w.table("instability", &table(&s.rows), plot)?;
    w.table("instability_control", &table(&s.control), None)?;
    let errs: Vec<f64> = s.rows.iter().map(|r| r.approx_error).collect();
    let norms: Vec<f64> = s.rows.iter().map(|r| r.blowup_norm).collect();
    w.check("sigma_min_positive", positive);
    w.check("log_sigma_min_slope_negative", s.log_sigma_fit.slope < 0.0);
    w.check("log_sigma_min_fit_r2_ge_0.9", s.log_sigma_fit.r_squared >= 0.9);
    w.check("approx_error_decreasing", strictly_decreasing(&errs));
    w.check("blowup_norm_increasing", strictly_increasing(&norms));
    w.say(format!(
        "ln sigma_min slope {:.4} per degree, R^2 {:.4}",
        s.log_sigma_fit.slope, s.log_sigma_fit.r_squared
    ));
    w.report(cfg, to_json(&s))
}

fn shell(cfg: &RunConfig, w: &mut Writer) -> Result<(), CommandError> {
    let scn = cfg.scenario()?;
    let s = run_shell_sweep(&scn)?;
    let mut t = Table::new(["r", "cond_number", "sigma_min", "sigma_max", "cond_ext"]);
    let mut plotted = Table::new(["r", "cond_number", "cond_ext"]);
    for r in &s.rows {
        let label = r.r.map_or(Cell::Text("none".into()), Cell::Float);
        t.push(vec![label, r.cond_number.into(), r.sigma_min.into(), r.sigma_max.into(), r.cond_ext.into()]);
        if let Some(radius) = r.r {
            plotted.push(vec![radius.into(), r.cond_number.into(), r.cond_ext.into()]);
        }
    }
    w.table("shell", &t, None)?;
    if plotted.rows.len() >= 2 {
        let svg = emit_svg_lineplot(&plotted, &PlotSpec::new("condition number vs shell radius", "r", &["cond_number", "cond_ext"]).log_y())?;
        w.file("shell.svg", &svg)?;
    }
    let conds: Vec<f64> = s.shell_rows().map(|r| r.cond_number).collect();
    let conds_ext: Vec<f64> = s.shell_rows().map(|r| r.cond_ext).collect();
    w.check("cond_number_non_increasing", conds.windows(2).all(|p| p[1] <= p[0]));
    w.check("cond_ext_non_increasing", conds_ext.windows(2).all(|p| p[1] <= p[0]));
    w.say(format!("condition numbers {}", sci_list(&conds)));
    w.report(cfg, to_json(&s))
}

fn noise(cfg: &RunConfig, w: &mut Writer) -> Result<(), CommandError> {
    let scn = cfg.scenario()?;
    let s = run_noise_sweep(&scn)?;
    let mut t = Table::new(["eps", "separation_error", "data_residual", "lambda"]);
    for r in &s.rows {
        t.push(vec![r.eps.into(), r.separation_error.into(), r.data_residual.into(), r.lambda.into()]);
    }
    let plot = PlotSpec::new("separation error vs noise level", "eps", &["separation_error", "data_residual"])
        .log_x()
        .log_y();
    w.table("noise", &t, Some(plot))?;
    w.check("log_model_rss_le_power_law", s.log_model_preferred());
    w.check("halving_eps_never_halves_error", s.halving_never_halves());
    w.check(
        "residual_tracks_eps_within_2x",
        s.rows.iter().all(|r| r.data_residual <= 2.0 * r.eps && r.data_residual >= 0.5 * r.eps),
    );
    w.say(format!(
        "log model RSS {:.4e}, power law RSS {:.4e} (p = {:.4})",
        s.log_fit.rss, s.power_fit.rss, s.power_fit.p
    ));
    w.report(cfg, to_json(&s))
}

fn synth(cfg: &RunConfig, w: &mut Writer) -> Result<(), CommandError> {
    let scn = cfg.scenario()?;
    let s = synth_scenario(&scn)?;
    w.file("truth.txt", &write_vector_coeffs(&s.truth))?;
    w.file("density.txt", &write_sh_coeffs(&s.density.to_sh()))?;
    w.file("data.csv", &write_field_csv(&s.patch.nodes(), &s.data)?)?;
    w.say(format!(
        "{} patch nodes, density norm {:.6e}, noise norm {:.3e}",
        s.patch.len(),
        s.density_norm,
        s.noise_norm
    ));
    w.report(
        cfg,
        json!({
            "patch_nodes": s.patch.len(),
            "density_norm": s.density_norm,
            "noise_norm": s.noise_norm,
            "truth_norm": s.truth.norm(),
        }),
    )
}
