//! Run configuration: figure presets, an optional `key = value` file and
//! command-line flags, merged in that order of increasing priority.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use cantilever_ion_core::{ModelKind, SystemParams};

use crate::error::SimError;
use crate::presets::{figure_params, DEFAULT_DT_OUT, DEFAULT_NA0, DEFAULT_T_MAX};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSelect {
    Rwa,
    Full,
    Both,
}

impl ModelSelect {
    pub fn includes(self, model: ModelKind) -> bool {
        matches!(
            (self, model),
            (ModelSelect::Both, _)
                | (ModelSelect::Rwa, ModelKind::Rwa)
                | (ModelSelect::Full, ModelKind::Full)
        )
    }
}

impl FromStr for ModelSelect {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rwa" => Ok(ModelSelect::Rwa),
            "full" => Ok(ModelSelect::Full),
            "both" => Ok(ModelSelect::Both),
            other => Err(SimError::Config(format!(
                "model must be rwa, full or both (got {other:?})"
            ))),
        }
    }
}

impl fmt::Display for ModelSelect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelSelect::Rwa => "rwa",
            ModelSelect::Full => "full",
            ModelSelect::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub n_a0: f64,
    /// µs
    pub t_max: f64,
    /// µs
    pub dt_out: f64,
    pub model: ModelSelect,
    pub fock_check: bool,
    /// `None` sizes the truncation from the initial state.
    pub n_max: Option<usize>,
    /// `None` means standard output.
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::figure(2).expect("figure 2 preset exists")
    }
}

impl RunConfig {
    pub fn figure(figure: u8) -> Result<Self, SimError> {
        let params = figure_params(figure).ok_or_else(|| {
            SimError::Config(format!("figure must be one of 2, 3, 4, 5 (got {figure})"))
        })?;
        Ok(RunConfig {
            params,
            n_a0: DEFAULT_NA0,
            t_max: DEFAULT_T_MAX,
            dt_out: DEFAULT_DT_OUT,
            model: ModelSelect::Both,
            fock_check: false,
            n_max: None,
            output_path: None,
        })
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.params.validate()?;
        if !(self.n_a0.is_finite() && self.n_a0 >= 0.0) {
            return Err(SimError::Config(format!("na0 must be >= 0 (got {})", self.n_a0)));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(SimError::Config(format!("t-max must be > 0 (got {})", self.t_max)));
        }
        if !(self.dt_out.is_finite() && self.dt_out > 0.0 && self.dt_out <= self.t_max) {
            return Err(SimError::Config(format!(
                "dt-out must satisfy 0 < dt-out <= t-max (got {})",
                self.dt_out
            )));
        }
        if let Some(n) = self.n_max {
            if n < 2 || n % 2 != 0 {
                return Err(SimError::Config(format!("n-max must be even and >= 2 (got {n})")));
            }
        }
        Ok(())
    }

    /// Uniform output grid `0, dt_out, 2 dt_out, …` ending exactly at `t_max`.
    pub fn time_grid(&self) -> Vec<f64> {
        let steps = self.t_max / self.dt_out;
        let n = steps.round();
        let mut grid: Vec<f64> = if (steps - n).abs() <= 1e-9 * steps.max(1.0) {
            (0..n as usize).map(|i| i as f64 * self.dt_out).collect()
        } else {
            (0..=steps.floor() as usize).map(|i| i as f64 * self.dt_out).collect()
        };
        grid.push(self.t_max);
        grid
    }
}

/// Partially specified configuration. Unset fields fall through to the next
/// lower layer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub figure: Option<u8>,
    pub omega: Option<f64>,
    pub nu: Option<f64>,
    pub kappa: Option<f64>,
    pub gamma_a: Option<f64>,
    pub gamma_b: Option<f64>,
    pub n_a0: Option<f64>,
    pub t_max: Option<f64>,
    pub dt_out: Option<f64>,
    pub model: Option<ModelSelect>,
    pub fock_check: Option<bool>,
    /// `Some(None)` asks for automatic sizing explicitly.
    pub n_max: Option<Option<usize>>,
    pub output_path: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, SimError> {
    value
        .parse()
        .map_err(|_| SimError::Config(format!("cannot parse {key} = {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, SimError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(SimError::Config(format!("cannot parse {key} = {value:?} as a boolean"))),
    }
}

impl ConfigOverrides {
    /// Parses `key = value` lines. `#` starts a comment; keys match the long
    /// flag names, with `_` accepted for `-`.
    pub fn parse_file_text(text: &str) -> Result<Self, SimError> {
        let mut out = ConfigOverrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SimError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().to_ascii_lowercase().replace('_', "-");
            out.set(&key, value.trim())
                .map_err(|e| SimError::Config(format!("line {}: {}", lineno + 1, strip(e))))?;
        }
        Ok(out)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SimError> {
        match key {
            "figure" => self.figure = Some(parse_value(key, value)?),
            "omega" => self.omega = Some(parse_value(key, value)?),
            "nu" => self.nu = Some(parse_value(key, value)?),
            "kappa" => self.kappa = Some(parse_value(key, value)?),
            "gamma-a" => self.gamma_a = Some(parse_value(key, value)?),
            "gamma-b" => self.gamma_b = Some(parse_value(key, value)?),
            "na0" => self.n_a0 = Some(parse_value(key, value)?),
            "t-max" => self.t_max = Some(parse_value(key, value)?),
            "dt-out" => self.dt_out = Some(parse_value(key, value)?),
            "model" => self.model = Some(value.parse()?),
            "fock-check" => self.fock_check = Some(parse_bool(key, value)?),
            "n-max" => {
                self.n_max = Some(if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(parse_value(key, value)?)
                })
            }
            "out" => self.output_path = Some(PathBuf::from(value)),
            _ => return Err(SimError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Fields set in `self` win over those in `lower`.
    pub fn over(self, lower: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            figure: self.figure.or(lower.figure),
            omega: self.omega.or(lower.omega),
            nu: self.nu.or(lower.nu),
            kappa: self.kappa.or(lower.kappa),
            gamma_a: self.gamma_a.or(lower.gamma_a),
            gamma_b: self.gamma_b.or(lower.gamma_b),
            n_a0: self.n_a0.or(lower.n_a0),
            t_max: self.t_max.or(lower.t_max),
            dt_out: self.dt_out.or(lower.dt_out),
            model: self.model.or(lower.model),
            fock_check: self.fock_check.or(lower.fock_check),
            n_max: self.n_max.or(lower.n_max),
            output_path: self.output_path.or(lower.output_path),
        }
    }

    /// Applies the overrides on top of the selected figure preset
    /// (figure 2 when none is given) and validates the result.
    pub fn resolve(&self) -> Result<RunConfig, SimError> {
        let mut cfg = RunConfig::figure(self.figure.unwrap_or(2))?;
        let p = &mut cfg.params;
        p.omega = self.omega.unwrap_or(p.omega);
        p.nu = self.nu.unwrap_or(p.nu);
        p.kappa = self.kappa.unwrap_or(p.kappa);
        p.gamma_a = self.gamma_a.unwrap_or(p.gamma_a);
        p.gamma_b = self.gamma_b.unwrap_or(p.gamma_b);
        cfg.n_a0 = self.n_a0.unwrap_or(cfg.n_a0);
        cfg.t_max = self.t_max.unwrap_or(cfg.t_max);
        cfg.dt_out = self.dt_out.unwrap_or(cfg.dt_out);
        cfg.model = self.model.unwrap_or(cfg.model);
        cfg.fock_check = self.fock_check.unwrap_or(cfg.fock_check);
        cfg.n_max = self.n_max.unwrap_or(cfg.n_max);
        cfg.output_path = self.output_path.clone().or(cfg.output_path);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn strip(e: SimError) -> String {
    match e {
        SimError::Config(msg) => msg,
        other => other.to_string(),
    }
}
