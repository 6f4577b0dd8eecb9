//! Single simulation runs: trajectories for the selected models, optional
//! Fock-space cross-check, CSV and summary.

use std::fmt;
use std::fs;

use cantilever_ion_core::fock::{evolve_fock_converged, required_n_max, DEFAULT_DT};
use cantilever_ion_core::{
    build_initial_fock, initial_ansatz, integrate, mean_occupations, Error as ModelError,
    IntegratorConfig, ModelKind, RwaPropagator, SystemParams,
};

use crate::analysis::{first_maximum, first_minimum, max_abs_difference, Extremum};
use crate::config::RunConfig;
use crate::error::SimError;
use crate::table::{fmt9, render_csv, CsvRow};

/// Largest accepted deviation between ansatz and Fock occupations.
pub const FOCK_TOLERANCE: f64 = 1e-4;

/// Normalized occupations and raw norm sampled on the output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelTrace {
    pub model: ModelKind,
    pub t: Vec<f64>,
    pub n_a: Vec<f64>,
    pub n_b: Vec<f64>,
    pub norm: Vec<f64>,
}

impl ModelTrace {
    fn with_capacity(model: ModelKind, n: usize) -> Self {
        ModelTrace {
            model,
            t: Vec::with_capacity(n),
            n_a: Vec::with_capacity(n),
            n_b: Vec::with_capacity(n),
            norm: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, n_a: f64, n_b: f64, norm: f64) {
        self.t.push(t);
        self.n_a.push(n_a);
        self.n_b.push(n_b);
        self.norm.push(norm);
    }

    pub fn summary(&self) -> ModelSummary {
        ModelSummary {
            model: self.model,
            first_nb_max: first_maximum(&self.t, &self.n_b),
            first_na_min: first_minimum(&self.t, &self.n_a),
            max_nb: self.n_b.iter().copied().fold(0.0, f64::max),
            final_norm: self.norm.last().copied().unwrap_or(f64::NAN),
        }
    }
}

/// Ansatz trajectory under `model`, integrated numerically.
pub fn ansatz_trace(
    model: ModelKind,
    params: &SystemParams,
    n_a0: f64,
    grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<ModelTrace, ModelError> {
    let traj = integrate(&initial_ansatz(n_a0)?, params, model, grid, cfg)?;
    let mut out = ModelTrace::with_capacity(model, grid.len());
    for p in &traj.points {
        out.push(p.t, p.moments.n_a, p.moments.n_b, p.moments.norm);
    }
    Ok(out)
}

/// RWA trajectory from the closed-form eigenmode solution, falling back to
/// numerical integration when the modes are degenerate.
pub fn rwa_trace(params: &SystemParams, n_a0: f64, grid: &[f64]) -> Result<ModelTrace, ModelError> {
    let initial = initial_ansatz(n_a0)?;
    let prop = match RwaPropagator::new(&initial, params) {
        Ok(p) => p,
        Err(ModelError::DegenerateModes { .. }) => {
            return ansatz_trace(ModelKind::Rwa, params, n_a0, grid, &IntegratorConfig::default())
        }
        Err(e) => return Err(e),
    };
    let mut out = ModelTrace::with_capacity(ModelKind::Rwa, grid.len());
    for &t in grid {
        let state = if t == 0.0 { initial } else { prop.at(t) };
        let m = mean_occupations(&state)?;
        out.push(t, m.n_a, m.n_b, m.norm);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSummary {
    pub model: ModelKind,
    pub first_nb_max: Option<Extremum>,
    pub first_na_min: Option<Extremum>,
    pub max_nb: f64,
    pub final_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockComparison {
    pub model: ModelKind,
    pub n_max: usize,
    /// Largest |n̄_ansatz − n̄_fock| over the grid and both modes.
    pub max_deviation: f64,
    /// Finest RK4 step used by the reference.
    pub dt: f64,
    /// Change of the Fock occupations at the last step halving.
    pub dt_change: f64,
}

impl FockComparison {
    pub fn passed(&self) -> bool {
        self.max_deviation <= FOCK_TOLERANCE
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub grid: Vec<f64>,
    pub rwa: Option<ModelTrace>,
    pub full: Option<ModelTrace>,
    pub fock: Vec<FockComparison>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub rwa: Option<ModelSummary>,
    pub full: Option<ModelSummary>,
    /// `max_t |n̄_a^rwa − n̄_a^full|`, when both models ran.
    pub max_discrepancy: Option<f64>,
    pub fock: Vec<FockComparison>,
}

impl RunOutput {
    pub fn trace(&self, model: ModelKind) -> Option<&ModelTrace> {
        match model {
            ModelKind::Rwa => self.rwa.as_ref(),
            ModelKind::Full => self.full.as_ref(),
        }
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            rwa: self.rwa.as_ref().map(ModelTrace::summary),
            full: self.full.as_ref().map(ModelTrace::summary),
            max_discrepancy: match (&self.rwa, &self.full) {
                (Some(r), Some(f)) => Some(max_abs_difference(&r.n_a, &f.n_a)),
                _ => None,
            },
            fock: self.fock.clone(),
        }
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        (0..self.grid.len())
            .map(|i| CsvRow {
                t: self.grid[i],
                rwa: self.rwa.as_ref().map(|r| (r.n_a[i], r.n_b[i])),
                full: self.full.as_ref().map(|f| (f.n_a[i], f.n_b[i], f.norm[i])),
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        render_csv(&self.csv_rows())
    }
}

/// Compares a trace against the converged Fock-space evolution of the same model.
pub fn fock_compare(
    trace: &ModelTrace,
    params: &SystemParams,
    n_a0: f64,
    n_max: Option<usize>,
) -> Result<FockComparison, ModelError> {
    let n_max = match n_max {
        Some(n) => n,
        None => required_n_max(n_a0)?,
    };
    let state = build_initial_fock(n_a0, n_max)?;
    let run = evolve_fock_converged(&state, params, trace.model, &trace.t, DEFAULT_DT)?;
    let max_deviation = run
        .samples
        .iter()
        .enumerate()
        .map(|(i, (_, m))| (m.n_a - trace.n_a[i]).abs().max((m.n_b - trace.n_b[i]).abs()))
        .fold(0.0, f64::max);
    Ok(FockComparison {
        model: trace.model,
        n_max,
        max_deviation,
        dt: run.dt,
        dt_change: run.dt_change,
    })
}

/// Computes the trajectories (and the Fock check if requested) without
/// touching the filesystem.
pub fn simulate(cfg: &RunConfig) -> Result<RunOutput, SimError> {
    cfg.validate()?;
    let grid = cfg.time_grid();
    let rwa = if cfg.model.includes(ModelKind::Rwa) {
        Some(rwa_trace(&cfg.params, cfg.n_a0, &grid)?)
    } else {
        None
    };
    let full = if cfg.model.includes(ModelKind::Full) {
        Some(ansatz_trace(
            ModelKind::Full,
            &cfg.params,
            cfg.n_a0,
            &grid,
            &IntegratorConfig::default(),
        )?)
    } else {
        None
    };
    let mut fock = Vec::new();
    if cfg.fock_check {
        for trace in [&rwa, &full].into_iter().flatten() {
            fock.push(fock_compare(trace, &cfg.params, cfg.n_a0, cfg.n_max)?);
        }
    }
    Ok(RunOutput {
        grid,
        rwa,
        full,
        fock,
    })
}

/// Runs, writes the CSV to `cfg.output_path` (if set) and fails with
/// [`SimError::FockMismatch`] when a requested Fock check does not pass.
pub fn run_simulation(cfg: &RunConfig) -> Result<RunOutput, SimError> {
    let out = simulate(cfg)?;
    if let Some(path) = &cfg.output_path {
        fs::write(path, out.to_csv()).map_err(|source| SimError::Io {
            path: path.clone(),
            source,
        })?;
    }
    if let Some(bad) = out.fock.iter().find(|c| !c.passed()) {
        return Err(SimError::FockMismatch {
            model: bad.model.name(),
            deviation: bad.max_deviation,
            tolerance: FOCK_TOLERANCE,
        });
    }
    Ok(out)
}

fn fmt_extremum(e: &Option<Extremum>) -> String {
    match e {
        Some(e) => format!("t = {} us, value {}", fmt9(e.t), fmt9(e.value)),
        None => "none".into(),
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in [&self.rwa, &self.full].into_iter().flatten() {
            writeln!(f, "[{}]", s.model.name())?;
            writeln!(f, "  first n_b maximum: {}", fmt_extremum(&s.first_nb_max))?;
            writeln!(f, "  first n_a minimum: {}", fmt_extremum(&s.first_na_min))?;
            writeln!(f, "  final norm: {}", fmt9(s.final_norm))?;
        }
        if let Some(d) = self.max_discrepancy {
            writeln!(f, "max |n_a(rwa) - n_a(full)|: {}", fmt9(d))?;
        }
        for c in &self.fock {
            writeln!(
                f,
                "fock check [{}] n_max {}: deviation {:.3e} (tol {:.0e}), dt {:.1e} (halving change {:.3e}) -> {}",
                c.model.name(),
                c.n_max,
                c.max_deviation,
                FOCK_TOLERANCE,
                c.dt,
                c.dt_change,
                if c.passed() { "ok" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}
