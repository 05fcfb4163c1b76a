//! Run configuration: command-line flags layered over a key=value file
//! layered over defaults.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use eprfw_core::kinematics::rapidity_from_beta;

use crate::error::CliError;

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_SINH_XI: f64 = 0.75;
pub const DEFAULT_RHO: f64 = 2.0;
pub const DEFAULT_PHI: f64 = PI;
pub const DEFAULT_C: f64 = 1.0;
pub const DEFAULT_STEPS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::usage(format!("format: expected csv or json, got '{other}'"))),
        }
    }
}

/// Swept quantity. `Beta` is converted to rapidity point by point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    Alpha,
    Xi,
    Beta,
    Phi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sweep {
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    /// Inclusive linspace; a single point sits at `start`.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last
                }
            })
            .collect()
    }
}

impl FromStr for Sweep {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [var, start, stop, count] = parts[..] else {
            return Err(CliError::usage(format!("sweep: expected var:start:stop:count, got '{s}'")));
        };
        let var = match var.to_ascii_lowercase().as_str() {
            "alpha" => SweepVar::Alpha,
            "xi" => SweepVar::Xi,
            "beta" => SweepVar::Beta,
            "phi" => SweepVar::Phi,
            other => return Err(CliError::usage(format!("sweep: unknown variable '{other}'"))),
        };
        let count: usize = count
            .parse()
            .map_err(|_| CliError::usage(format!("sweep: count '{count}' is not a positive integer")))?;
        if count == 0 {
            return Err(CliError::usage("sweep: count must be at least 1"));
        }
        Ok(Sweep {
            var,
            start: parse_f64("sweep start", start)?,
            stop: parse_f64("sweep stop", stop)?,
            count,
        })
    }
}

fn parse_f64(field: &str, s: &str) -> Result<f64, CliError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("{field}: '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::usage(format!("{field}: value must be finite")));
    }
    Ok(v)
}

/// One layer of optional settings; flags and the config file each fill one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer {
    pub alpha: Option<f64>,
    pub xi: Option<f64>,
    pub beta: Option<f64>,
    pub rho: Option<f64>,
    pub phi: Option<f64>,
    pub c: Option<f64>,
    pub steps: Option<usize>,
    pub sweeps: Vec<Sweep>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub degrees: Option<bool>,
}

impl Layer {
    /// Parses `key = value` lines. Blank lines and `#` comments are skipped;
    /// `sweep` may repeat.
    pub fn parse_config(text: &str) -> Result<Self, CliError> {
        let mut layer = Layer::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!("config line {}: expected key=value", lineno + 1)));
            };
            let (key, value) = (key.trim().to_ascii_lowercase(), value.trim());
            match key.as_str() {
                "alpha" => layer.alpha = Some(parse_f64("alpha", value)?),
                "xi" => layer.xi = Some(parse_f64("xi", value)?),
                "beta" => layer.beta = Some(parse_f64("beta", value)?),
                "rho" => layer.rho = Some(parse_f64("rho", value)?),
                "phi" => layer.phi = Some(parse_f64("phi", value)?),
                "c" => layer.c = Some(parse_f64("c", value)?),
                "steps" => {
                    layer.steps = Some(
                        value
                            .parse()
                            .map_err(|_| CliError::usage(format!("steps: '{value}' is not a positive integer")))?,
                    )
                }
                "sweep" => layer.sweeps.push(value.parse()?),
                "out" => layer.out = Some(PathBuf::from(value)),
                "format" => layer.format = Some(value.parse()?),
                "degrees" => {
                    layer.degrees = Some(match value.to_ascii_lowercase().as_str() {
                        "true" | "1" | "yes" => true,
                        "false" | "0" | "no" => false,
                        _ => return Err(CliError::usage(format!("degrees: '{value}' is not a boolean"))),
                    })
                }
                other => {
                    return Err(CliError::usage(format!(
                        "config line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(layer)
    }

    pub fn read_config(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_config(&text)
    }
}

/// Fully resolved configuration. Angles are in radians.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub alpha: f64,
    pub xi: f64,
    pub rho: f64,
    pub phi: f64,
    pub c: f64,
    pub steps: usize,
    pub sweeps: Vec<Sweep>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub degrees: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            xi: DEFAULT_SINH_XI.asinh(),
            rho: DEFAULT_RHO,
            phi: DEFAULT_PHI,
            c: DEFAULT_C,
            steps: DEFAULT_STEPS,
            sweeps: Vec::new(),
            out: None,
            format: Format::Csv,
            degrees: false,
        }
    }
}

fn speed(layer: &Layer, source: &str) -> Result<Option<f64>, CliError> {
    match (layer.xi, layer.beta) {
        (Some(_), Some(_)) => Err(CliError::usage(format!("{source}: give only one of xi and beta"))),
        (Some(xi), None) => Ok(Some(xi)),
        (None, Some(beta)) => Ok(Some(rapidity_from_beta(beta).map_err(|_| {
            CliError::usage(format!("beta: {beta} must lie in [0, 1)"))
        })?)),
        (None, None) => Ok(None),
    }
}

impl RunConfig {
    /// Merges `flags` over `file` over the defaults, then validates.
    pub fn resolve(flags: &Layer, file: &Layer) -> Result<Self, CliError> {
        let d = RunConfig::default();
        let degrees = flags.degrees.or(file.degrees).unwrap_or(false);
        let angle = |v: f64| if degrees { v.to_radians() } else { v };
        let xi = match speed(flags, "flags")? {
            Some(xi) => xi,
            None => speed(file, "config file")?.unwrap_or(d.xi),
        };
        let sweeps = if flags.sweeps.is_empty() { &file.sweeps } else { &flags.sweeps };
        let sweeps = sweeps
            .iter()
            .map(|s| match s.var {
                SweepVar::Phi => Sweep {
                    start: angle(s.start),
                    stop: angle(s.stop),
                    ..*s
                },
                _ => *s,
            })
            .collect();
        let cfg = RunConfig {
            alpha: flags.alpha.or(file.alpha).unwrap_or(d.alpha),
            xi,
            rho: flags.rho.or(file.rho).unwrap_or(d.rho),
            phi: flags.phi.or(file.phi).map(angle).unwrap_or(d.phi),
            c: flags.c.or(file.c).unwrap_or(d.c),
            steps: flags.steps.or(file.steps).unwrap_or(d.steps),
            sweeps,
            out: flags.out.clone().or_else(|| file.out.clone()),
            format: flags.format.or(file.format).unwrap_or(d.format),
            degrees,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [("alpha", self.alpha), ("xi", self.xi), ("rho", self.rho), ("phi", self.phi), ("c", self.c)] {
            if !v.is_finite() {
                return Err(CliError::usage(format!("{name}: value must be finite")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(CliError::usage(format!("alpha: {} must satisfy 0 < alpha <= 1", self.alpha)));
        }
        if self.xi < 0.0 {
            return Err(CliError::usage(format!("xi: {} must be non-negative", self.xi)));
        }
        if self.c <= 0.0 {
            return Err(CliError::usage(format!("c: {} must be positive", self.c)));
        }
        if self.steps == 0 {
            return Err(CliError::usage("steps: must be at least 1"));
        }
        if self.rho < 0.0 {
            return Err(CliError::usage(format!("rho: {} must be non-negative", self.rho)));
        }
        for s in &self.sweeps {
            for v in s.values() {
                match s.var {
                    SweepVar::Alpha if !(v > 0.0 && v <= 1.0) => {
                        return Err(CliError::usage(format!("sweep alpha: {v} must satisfy 0 < alpha <= 1")))
                    }
                    SweepVar::Xi if v < 0.0 => {
                        return Err(CliError::usage(format!("sweep xi: {v} must be non-negative")))
                    }
                    SweepVar::Beta if !(0.0..1.0).contains(&v) => {
                        return Err(CliError::usage(format!("sweep beta: {v} must lie in [0, 1)")))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Every evaluation point in row order: the first sweep varies slowest.
    pub fn points(&self) -> Vec<Point> {
        let mut points = vec![Point {
            alpha: self.alpha,
            xi: self.xi,
            phi: self.phi,
        }];
        for sweep in &self.sweeps {
            let values = sweep.values();
            points = points
                .iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = *p;
                        match sweep.var {
                            SweepVar::Alpha => q.alpha = v,
                            SweepVar::Xi => q.xi = v,
                            SweepVar::Beta => q.xi = v.atanh(),
                            SweepVar::Phi => q.phi = v,
                        }
                        q
                    })
                })
                .collect();
        }
        points
    }

    /// Echo of the resolved settings for output metadata.
    pub fn echo(&self) -> BTreeMap<&'static str, serde_json::Value> {
        let mut m = BTreeMap::new();
        m.insert("alpha", self.alpha.into());
        m.insert("xi", self.xi.into());
        m.insert("rho", self.rho.into());
        m.insert("Phi", self.phi.into());
        m.insert("c", self.c.into());
        m.insert("steps", self.steps.into());
        m.insert(
            "sweeps",
            serde_json::to_value(&self.sweeps).unwrap_or(serde_json::Value::Null),
        );
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub alpha: f64,
    pub xi: f64,
    pub phi: f64,
}
