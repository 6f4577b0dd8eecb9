//! One-parameter sweeps over the coupling κ or the ion frequency ν.

use std::fmt::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::SimError;
use crate::run::{simulate, RunOutput};
use crate::table::fmt9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Kappa,
    Nu,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Kappa => "kappa",
            SweepVar::Nu => "nu",
        }
    }

    fn apply(self, base: &RunConfig, value: f64) -> RunConfig {
        let mut cfg = base.clone();
        cfg.output_path = None;
        match self {
            SweepVar::Kappa => cfg.params.kappa = value,
            SweepVar::Nu => cfg.params.nu = value,
        }
        cfg
    }
}

impl FromStr for SweepVar {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kappa" => Ok(SweepVar::Kappa),
            "nu" => Ok(SweepVar::Nu),
            other => Err(SimError::Config(format!(
                "sweep variable must be kappa or nu (got {other:?})"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepMetrics {
    /// Time of the first n̄_b maximum.
    pub transfer_time: Option<f64>,
    /// `max_t n̄_b / n_a0`.
    pub transfer_fidelity: f64,
    /// `max_t |n̄_a^rwa − n̄_a^full|`, when both models ran.
    pub discrepancy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: Result<SweepMetrics, String>,
}

/// Transfer metrics come from the full model when it ran, otherwise from the RWA.
pub fn metrics(out: &RunOutput, n_a0: f64) -> SweepMetrics {
    let summary = out.summary();
    let reference = summary.full.or(summary.rwa).expect("at least one model ran");
    let transfer_fidelity = if n_a0 > 0.0 {
        reference.max_nb / n_a0
    } else {
        0.0
    };
    SweepMetrics {
        transfer_time: reference.first_nb_max.map(|e| e.t),
        transfer_fidelity,
        discrepancy: summary.max_discrepancy,
    }
}

/// Runs every value (in parallel) and returns rows in input order. A failing
/// value is recorded in its row and does not stop the sweep.
pub fn run_sweep(base: &RunConfig, var: SweepVar, values: &[f64]) -> Result<Vec<SweepRow>, SimError> {
    if values.is_empty() {
        return Err(SimError::Config("sweep needs at least one value".into()));
    }
    Ok(values
        .par_iter()
        .map(|&value| {
            let cfg = var.apply(base, value);
            let outcome = simulate(&cfg)
                .map_err(|e| e.to_string())
                .and_then(|out| match out.fock.iter().find(|c| !c.passed()) {
                    Some(c) => Err(format!(
                        "{} fock deviation {:.3e}",
                        c.model.name(),
                        c.max_deviation
                    )),
                    None => Ok(metrics(&out, cfg.n_a0)),
                });
            SweepRow { value, outcome }
        })
        .collect())
}

pub fn render_sweep_csv(var: SweepVar, rows: &[SweepRow]) -> String {
    let mut out = format!(
        "{},transfer_time,transfer_fidelity,discrepancy,error\n",
        var.name()
    );
    let opt = |x: Option<f64>| x.map(fmt9).unwrap_or_default();
    for row in rows {
        match &row.outcome {
            Ok(m) => writeln!(
                out,
                "{},{},{},{},",
                fmt9(row.value),
                opt(m.transfer_time),
                fmt9(m.transfer_fidelity),
                opt(m.discrepancy)
            ),
            Err(e) => writeln!(out, "{},,,,\"{}\"", fmt9(row.value), e.replace('"', "'")),
        }
        .unwrap();
    }
    out
}
