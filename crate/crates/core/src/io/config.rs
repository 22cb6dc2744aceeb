use std::collections::BTreeMap;

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::ScenarioConfig;
use crate::patch::{make_region, PatchRegion, RegionKind};
use crate::separation::{Regularization, DEFAULT_TSVD_RELATIVE_CUT};

/// A configuration value after type checking.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    None,
    Bool(bool),
    Int(u64),
    Float(f64),
    Str(String),
    Ints(Vec<u64>),
    Floats(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Bool,
    Int,
    Float,
    /// Float or `none`.
    OptFloat,
    Str,
    Ints,
    Floats,
}

struct KeySpec {
    key: &'static str,
    kind: Kind,
    default: Option<&'static str>,
}

const fn spec(key: &'static str, kind: Kind, default: Option<&'static str>) -> KeySpec {
    KeySpec { key, kind, default }
}

/// Every accepted key with its type and default.
const SCHEMA: &[KeySpec] = &[
    spec("seed", Kind::Int, Some("0")),
    spec("input", Kind::Str, None),
    spec("degree", Kind::Int, None),
    spec("grid.degree", Kind::Int, Some("48")),
    spec("region.kind", Kind::Str, Some("cap")),
    spec("region.complement", Kind::Bool, Some("false")),
    spec("region.center", Kind::Floats, Some("[0, 0, 1]")),
    spec("region.radius_deg", Kind::Float, Some("90")),
    spec("region.theta_min_deg", Kind::Float, Some("0")),
    spec("region.theta_max_deg", Kind::Float, Some("90")),
    spec("region.phi_min_deg", Kind::Float, Some("0")),
    spec("region.phi_max_deg", Kind::Float, Some("360")),
    spec("region.vertices_deg", Kind::Floats, None),
    spec("degree.ext", Kind::Int, Some("8")),
    spec("degree.int", Kind::Int, Some("8")),
    spec("shell.radius", Kind::OptFloat, Some("1.1")),
    spec("truth.int_degree", Kind::Int, Some("8")),
    spec("truth.ext_degree", Kind::Int, Some("3")),
    spec("truth.density_bound", Kind::Float, Some("1")),
    spec("truth.normalize_density", Kind::Bool, Some("true")),
    spec("noise.level", Kind::Float, Some("0")),
    spec("noise.levels", Kind::Floats, Some("[1e-2, 5e-3, 1e-3, 5e-4, 1e-4, 5e-5, 1e-5, 5e-6, 1e-6]")),
    spec("noise.tau", Kind::Float, Some("1")),
    spec("sweep.degrees", Kind::Ints, Some("[4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16]")),
    spec("sweep.radii", Kind::Floats, Some("[1.01, 1.05, 1.1, 1.5]")),
    spec("regularization.method", Kind::Str, Some("tsvd")),
    spec("regularization.parameter", Kind::OptFloat, Some("none")),
    spec("kernel.degrees", Kind::Ints, Some("[8, 16, 24]")),
    spec("kernel.collar_deg", Kind::Float, Some("45")),
    spec("kernel.tolerance", Kind::Float, Some("1e-3")),
    spec("kernel.h2_scale", Kind::Float, Some("0")),
    spec("density.degrees", Kind::Ints, Some("[4, 8, 12, 16]")),
    spec("assert.injective", Kind::Bool, Some("false")),
];

/// Keys that must be set for a command.
pub fn required_keys(command: &str) -> &'static [&'static str] {
    match command {
        "separate-global" => &["input", "degree"],
        _ => &[],
    }
}

/// Validated configuration with defaults applied.
///
/// Keys ending in `_deg` are stored converted to radians under the key
/// without the suffix (`region.radius_deg: 60` becomes `region.radius = π/3`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub values: BTreeMap<String, Value>,
}

fn config_err(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

fn parse_scalar(key: &str, kind: Kind, raw: &str) -> Result<Value> {
    let mismatch = |what: &str| config_err(format!("key '{key}': expected {what}, got '{raw}'"));
    let float = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| mismatch("a finite number"))
    };
    fn items(s: &str) -> Option<Vec<&str>> {
        let inner = s.strip_prefix('[')?.strip_suffix(']')?;
        Some(inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect())
    }
    let list = |s| items(s).ok_or_else(|| mismatch("a list [a, b, ...]"));
    Ok(match kind {
        Kind::Bool => match raw {
            "true" => Value::Bool(true),
            "false" => Value::Bool(false),
            _ => return Err(mismatch("true or false")),
        },
        Kind::Int => Value::Int(raw.parse().map_err(|_| mismatch("a nonnegative integer"))?),
        Kind::Float => Value::Float(float(raw)?),
        Kind::OptFloat => {
            if raw == "none" {
                Value::None
            } else {
                Value::Float(float(raw)?)
            }
        }
        Kind::Str => Value::Str(raw.trim_matches('"').to_string()),
        Kind::Ints => Value::Ints(
            list(raw)?
                .into_iter()
                .map(|s| s.parse().map_err(|_| mismatch("a list of nonnegative integers")))
                .collect::<Result<_>>()?,
        ),
        Kind::Floats => Value::Floats(list(raw)?.into_iter().map(float).collect::<Result<_>>()?),
    })
}

fn to_radians(v: Value) -> Value {
    match v {
        Value::Float(d) => Value::Float(d.to_radians()),
        Value::Floats(d) => Value::Floats(d.into_iter().map(f64::to_radians).collect()),
        other => other,
    }
}

/// Parses `key: value` lines (`#` starts a comment) for `command`.
///
/// Unknown keys, duplicates, type mismatches and missing required keys are
/// errors naming the key.
pub fn parse_config(text: &str, command: &str) -> Result<RunConfig> {
    let mut given: BTreeMap<String, Value> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, raw) = line
            .split_once(':')
            .ok_or_else(|| config_err(format!("line {}: expected 'key: value'", lineno + 1)))?;
        let (key, raw) = (key.trim(), raw.trim());
        let spec = SCHEMA
            .iter()
            .find(|s| s.key == key)
            .ok_or_else(|| config_err(format!("line {}: unknown key '{key}'", lineno + 1)))?;
        if given.contains_key(key) {
            return Err(config_err(format!("line {}: duplicate key '{key}'", lineno + 1)));
        }
        given.insert(key.to_string(), parse_scalar(key, spec.kind, raw)?);
    }
    let mut cfg = RunConfig {
        command: command.to_string(),
        values: BTreeMap::new(),
    };
    for spec in SCHEMA {
        let value = match given.remove(spec.key) {
            Some(v) => Some(v),
            None => spec
                .default
                .map(|d| parse_scalar(spec.key, spec.kind, d).expect("schema default parses")),
        };
        if let Some(v) = value {
            cfg.insert(spec.key, v);
        }
    }
    cfg.check_required()?;
    Ok(cfg)
}

impl RunConfig {
    fn insert(&mut self, key: &str, v: Value) {
        match key.strip_suffix("_deg") {
            Some(base) => self.values.insert(base.to_string(), to_radians(v)),
            None => self.values.insert(key.to_string(), v),
        };
    }

    fn check_required(&self) -> Result<()> {
        let missing: Vec<&str> = required_keys(&self.command)
            .iter()
            .copied()
            .filter(|k| !self.values.contains_key(*k))
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(config_err(format!(
                "command '{}' requires keys: {}",
                self.command,
                missing.join(", ")
            )))
        }
    }

    /// Sets a key from text, as if it had appeared in the file (replacing any value).
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        let spec = SCHEMA
            .iter()
            .find(|s| s.key == key)
            .ok_or_else(|| config_err(format!("unknown key '{key}'")))?;
        let v = parse_scalar(key, spec.kind, raw)?;
        self.insert(key, v);
        self.check_required()
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    fn missing(&self, key: &str) -> Error {
        config_err(format!("key '{key}' is not set"))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        match self.get(key) {
            Some(Value::Float(v)) => Ok(*v),
            Some(Value::Int(v)) => Ok(*v as f64),
            _ => Err(self.missing(key)),
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            Some(Value::None) | None => Ok(None),
            _ => self.f64(key).map(Some),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        match self.get(key) {
            Some(Value::Int(v)) => Ok(*v as usize),
            _ => Err(self.missing(key)),
        }
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        match self.get(key) {
            Some(Value::Int(v)) => Ok(*v),
            _ => Err(self.missing(key)),
        }
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.get(key) {
            Some(Value::Bool(v)) => Ok(*v),
            _ => Err(self.missing(key)),
        }
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        match self.get(key) {
            Some(Value::Str(v)) => Ok(v),
            _ => Err(self.missing(key)),
        }
    }

    pub fn floats(&self, key: &str) -> Result<Vec<f64>> {
        match self.get(key) {
            Some(Value::Floats(v)) => Ok(v.clone()),
            _ => Err(self.missing(key)),
        }
    }

    pub fn usizes(&self, key: &str) -> Result<Vec<usize>> {
        match self.get(key) {
            Some(Value::Ints(v)) => Ok(v.iter().map(|x| *x as usize).collect()),
            _ => Err(self.missing(key)),
        }
    }

    /// The configured patch region.
    pub fn region(&self) -> Result<PatchRegion> {
        let kind = match self.str("region.kind")? {
            "cap" => {
                let c = self.floats("region.center")?;
                if c.len() != 3 {
                    return Err(config_err("key 'region.center': expected 3 numbers".into()));
                }
                let v = Vector3::new(c[0], c[1], c[2]);
                if v.norm() == 0.0 {
                    return Err(config_err("key 'region.center': zero vector".into()));
                }
                let v = v.normalize();
                RegionKind::Cap {
                    center: [v.x, v.y, v.z],
                    radius: self.f64("region.radius")?,
                }
            }
            "box" => RegionKind::LatLonBox {
                theta_min: self.f64("region.theta_min")?,
                theta_max: self.f64("region.theta_max")?,
                phi_min: self.f64("region.phi_min")?,
                phi_max: self.f64("region.phi_max")?,
            },
            "polygon" => {
                let v = self.floats("region.vertices")?;
                if v.len() < 6 || v.len() % 2 != 0 {
                    return Err(config_err(
                        "key 'region.vertices_deg': expected colatitude/longitude pairs for at least 3 vertices".into(),
                    ));
                }
                RegionKind::Polygon {
                    vertices: v
                        .chunks(2)
                        .map(|p| {
                            let (t, f) = (p[0], p[1]);
                            [t.sin() * f.cos(), t.sin() * f.sin(), t.cos()]
                        })
                        .collect(),
                }
            }
            other => {
                return Err(config_err(format!(
                    "key 'region.kind': expected cap, box or polygon, got '{other}'"
                )))
            }
        };
        make_region(kind, self.bool("region.complement")?)
    }

    /// The configured regularization; `noise_level` feeds the discrepancy rule.
    pub fn regularization(&self) -> Result<Regularization> {
        let p = self.opt_f64("regularization.parameter")?;
        Ok(match self.str("regularization.method")? {
            "tsvd" => Regularization::TsvdRelative {
                cut: p.unwrap_or(DEFAULT_TSVD_RELATIVE_CUT),
            },
            "tsvd_rank" => Regularization::TsvdRank {
                rank: p.ok_or_else(|| config_err("tsvd_rank needs regularization.parameter".into()))? as usize,
            },
            "tikhonov" => Regularization::Tikhonov {
                lambda: p.ok_or_else(|| config_err("tikhonov needs regularization.parameter".into()))?,
            },
            "discrepancy" => Regularization::Discrepancy {
                noise_level: self.f64("noise.level")?,
                tau: self.f64("noise.tau")?,
            },
            other => {
                return Err(config_err(format!(
                    "key 'regularization.method': expected tsvd, tsvd_rank, tikhonov or discrepancy, got '{other}'"
                )))
            }
        })
    }

    pub fn scenario(&self) -> Result<ScenarioConfig> {
        let cfg = ScenarioConfig {
            region: self.region()?,
            grid_degree: self.usize("grid.degree")?,
            n_ext: self.usize("degree.ext")?,
            n_int: self.usize("degree.int")?,
            shell_radius: self.opt_f64("shell.radius")?,
            truth_int_degree: self.usize("truth.int_degree")?,
            truth_ext_degree: self.usize("truth.ext_degree")?,
            density_bound: self.f64("truth.density_bound")?,
            normalize_density: self.bool("truth.normalize_density")?,
            noise_level: self.f64("noise.level")?,
            noise_levels: self.floats("noise.levels")?,
            sweep_degrees: self.usizes("sweep.degrees")?,
            shell_radii: self.floats("sweep.radii")?,
            discrepancy_tau: self.f64("noise.tau")?,
            seed: self.u64("seed")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
