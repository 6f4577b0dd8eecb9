use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cantilever_ion::config::{ConfigOverrides, ModelSelect};
use cantilever_ion::sweep::{render_sweep_csv, run_sweep, SweepVar};
use cantilever_ion::validation::{run_validation, ValidationOptions};
use cantilever_ion::{run_simulation, RunConfig, SimError};

/// Cantilever/ion phonon-exchange simulator (squeezed-state ansatz).
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write the trajectory CSV.
    Run(RunArgs),
    /// Repeat a run over several values of kappa or nu, one summary row each.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Parameter to vary: kappa or nu.
        #[arg(long)]
        var: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Run the oracle-equivalence and conservation checks.
    Validate {
        /// Multiply every tolerance by this factor.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Time span of the trajectory comparisons [us].
        #[arg(long, default_value_t = 3.0)]
        horizon: f64,
        #[arg(long, hide = true)]
        corrupt_rhs: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// key = value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parameter preset of figure 2, 3, 4 or 5.
    #[arg(long)]
    figure: Option<u8>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    gamma_a: Option<f64>,
    #[arg(long)]
    gamma_b: Option<f64>,
    /// Initial cantilever occupation.
    #[arg(long)]
    na0: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    dt_out: Option<f64>,
    /// rwa, full or both.
    #[arg(long)]
    model: Option<String>,
    /// Cross-check against the truncated Fock-space evolution.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    fock_check: Option<bool>,
    /// Fock truncation per mode (even), or "auto".
    #[arg(long)]
    n_max: Option<String>,
    /// CSV destination (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, SimError> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| SimError::Io {
                    path: path.clone(),
                    source,
                })?;
                ConfigOverrides::parse_file_text(&text)?
            }
            None => ConfigOverrides::default(),
        };
        let mut flags = ConfigOverrides {
            figure: self.figure,
            omega: self.omega,
            nu: self.nu,
            kappa: self.kappa,
            gamma_a: self.gamma_a,
            gamma_b: self.gamma_b,
            n_a0: self.na0,
            t_max: self.t_max,
            dt_out: self.dt_out,
            model: self.model.as_deref().map(str::parse::<ModelSelect>).transpose()?,
            fock_check: self.fock_check,
            output_path: self.out.clone(),
            ..Default::default()
        };
        if let Some(n) = &self.n_max {
            flags.set("n-max", n)?;
        }
        flags.over(file).resolve()
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), SimError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| SimError::Io {
            path: p.clone(),
            source,
        }),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| SimError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn execute(cli: Cli) -> Result<ExitCode, SimError> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let out = run_simulation(&cfg)?;
            if cfg.output_path.is_none() {
                emit(None, &out.to_csv())?;
            }
            eprint!("{}", out.summary());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { run, var, values } => {
            let cfg = run.resolve()?;
            let var: SweepVar = var.parse()?;
            let rows = run_sweep(&cfg, var, &values)?;
            emit(cfg.output_path.as_ref(), &render_sweep_csv(var, &rows))?;
            let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
            if failed > 0 {
                eprintln!("{failed} of {} sweep rows failed", rows.len());
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate {
            tol_scale,
            horizon,
            corrupt_rhs,
        } => {
            if !(tol_scale > 0.0 && horizon > 0.0) {
                return Err(SimError::Config("tol-scale and horizon must be > 0".into()));
            }
            let report = run_validation(&ValidationOptions {
                tolerance_scale: tol_scale,
                corrupt_rhs,
                horizon,
                ..Default::default()
            });
            print!("{report}");
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
