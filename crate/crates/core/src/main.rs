use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qerase::correlations::{discord, CorrelationReport, OptimizerConfig};
use qerase::ensembles::{monte_carlo_verify, ChannelEnsemble, EnsembleConfig, StateEnsemble};
use qerase::io::{digest, write_monte_carlo_csv, StateFile, TOOL_VERSION, UNITS, Units};
use qerase::scenario::{run_scenario, Scenario, ScenarioParams};
use qerase::{Error, Result};

const EXIT_PARSE: u8 = 2;
const EXIT_UNSUPPORTED_DIM: u8 = 3;
const EXIT_BAD_PARAMS: u8 = 4;
const EXIT_VIOLATION: u8 = 5;

#[derive(Parser)]
#[command(name = "qerase", version, about = "Quantum discord and the entropy cost of erasing correlations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mutual information, classical correlation and discord of a state file.
    Discord {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value = "B")]
        side: String,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Run a named process and check every bound on it.
    Scenario {
        #[arg(value_enum)]
        name: ScenarioName,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value = "B")]
        side: String,
        /// Inverse temperature in units of the inverse energy scale.
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        /// Hiding distribution, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        dist: Option<Vec<f64>>,
        /// Diagonal Hamiltonian, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        energies: Option<Vec<f64>>,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Random states and channels; one CSV row per trial.
    Montecarlo {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// dim_A,dim_B
        #[arg(long, value_delimiter = ',', default_value = "2,2")]
        dims: Vec<usize>,
        #[arg(long = "env", default_value_t = 4)]
        env_dim: usize,
        /// Maximum number of Kraus operators per channel.
        #[arg(long = "kraus", default_value_t = 4)]
        kraus_count: usize,
        #[arg(long, value_enum, default_value_t = EnsembleName::Random)]
        ensemble: EnsembleName,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Corrupt this trial's ledger before reporting (tripwire self-test).
        #[arg(long, value_name = "TRIAL")]
        inject_violation: Option<usize>,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Check that a state file parses to a valid density operator.
    Validate {
        #[arg(long)]
        state: PathBuf,
    },
}

#[derive(Args)]
struct OptimizerArgs {
    /// Coarse-scan points per axis.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Convergence tolerance in bits.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Overridden by QERASE_SEED when set.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OptimizerArgs {
    fn config(&self) -> Result<OptimizerConfig> {
        let cfg = OptimizerConfig {
            grid_resolution: self.grid,
            random_restarts: self.restarts,
            convergence_tol: self.tol,
            seed: resolve_seed(self.seed)?,
            ..OptimizerConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioName {
    Bleach,
    Thermalize,
    Dephase,
    Landauer,
}

impl From<ScenarioName> for Scenario {
    fn from(s: ScenarioName) -> Self {
        match s {
            ScenarioName::Bleach => Scenario::Bleach,
            ScenarioName::Thermalize => Scenario::Thermalize,
            ScenarioName::Dephase => Scenario::Dephase,
            ScenarioName::Landauer => Scenario::Landauer,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnsembleName {
    Random,
    QuantumClassical,
}

fn resolve_seed(flag: u64) -> Result<u64> {
    match std::env::var("QERASE_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("QERASE_SEED `{v}` is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    error: Error,
}

fn code_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Io(_) => EXIT_PARSE,
        Error::UnsupportedDimension(_) => EXIT_UNSUPPORTED_DIM,
        _ => EXIT_BAD_PARAMS,
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Self { code: code_for(&error), error }
    }
}

/// Any problem with the file itself, including a matrix that is not a
/// density operator, is a parse failure.
fn load_state(path: &Path) -> std::result::Result<(qerase::qmath::DensityOperator, Vec<u8>), Failure> {
    let parse_fail = |error: Error| Failure { code: EXIT_PARSE, error };
    let bytes = std::fs::read(path).map_err(|e| parse_fail(Error::Io(e)))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| parse_fail(Error::Parse(e.to_string())))?;
    let state = StateFile::parse(&text).and_then(|f| f.to_state()).map_err(parse_fail)?;
    Ok((state, bytes))
}

#[derive(Serialize)]
struct DiscordOutput<'a> {
    units: Units,
    tool_version: &'static str,
    inputs_digest: String,
    seed: u64,
    #[serde(flatten)]
    report: &'a CorrelationReport,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    match cli.command {
        Command::Discord { state, side, opt } => {
            let (rho, bytes) = load_state(&state)?;
            let cfg = opt.config()?;
            let report = discord(&rho, &side, &cfg)?;
            let params = serde_json::to_vec(&cfg).expect("config serializes");
            print_json(&DiscordOutput {
                units: UNITS,
                tool_version: TOOL_VERSION,
                inputs_digest: digest(&[&bytes, side.as_bytes(), &params]),
                seed: cfg.seed,
                report: &report,
            })?;
        }
        Command::Scenario { name, state, side, beta, dist, energies, opt } => {
            let (rho, bytes) = load_state(&state)?;
            let kind = Scenario::from(name);
            let params = ScenarioParams { side, beta, dist, energies, optimizer: opt.config()? };
            let tag = format!("{kind} side={} beta={:?} dist={:?} energies={:?}", params.side, params.beta, params.dist, params.energies);
            let cfg = serde_json::to_vec(&params.optimizer).expect("config serializes");
            let report = run_scenario(kind, &rho, &params, &digest(&[&bytes, tag.as_bytes(), &cfg]))?;
            print_json(&report)?;
            if report.violated() {
                let failed: Vec<_> = report.checks.iter().filter(|c| !c.satisfied).map(|c| c.name.as_str()).collect();
                return Err(Failure {
                    code: EXIT_VIOLATION,
                    error: Error::InvalidParameter(format!("bound violated: {}", failed.join(", "))),
                });
            }
        }
        Command::Montecarlo { trials, dims, env_dim, kraus_count, ensemble, out, inject_violation, opt } => {
            let [dim_a, dim_b] = dims[..] else {
                return Err(Error::InvalidParameter(format!("--dims takes two values, got {dims:?}")).into());
            };
            let opt = opt.config()?;
            let cfg = EnsembleConfig {
                env_dim,
                kraus_count,
                channel: ChannelEnsemble::Random,
                state: match ensemble {
                    EnsembleName::Random => StateEnsemble::Random,
                    EnsembleName::QuantumClassical => StateEnsemble::QuantumClassical,
                },
                ..EnsembleConfig::new(opt.seed, dim_a, dim_b, trials)
            };
            let mut run = monte_carlo_verify(&cfg, &opt)?;
            if let Some(t) = inject_violation {
                run.inject_violation(t)?;
            }
            match &out {
                Some(path) => {
                    let mut w = BufWriter::new(File::create(path).map_err(Error::Io)?);
                    write_monte_carlo_csv(&run, &mut w)?;
                    w.flush().map_err(Error::Io)?;
                }
                None => write_monte_carlo_csv(&run, std::io::stdout().lock())?,
            }
            let s = &run.summary;
            eprintln!(
                "{} trials, {} failed, {} violations (erasure {}, total entropy {}, generalized landauer {}, mutual information {}, creation {})",
                s.trials,
                s.failed_trials,
                s.total_violations(),
                s.erasure.violations,
                s.total_entropy.violations,
                s.generalized_landauer.violations,
                s.mutual_information.violations,
                s.creation.violations
            );
            if s.total_violations() > 0 {
                return Err(Failure {
                    code: EXIT_VIOLATION,
                    error: Error::InvalidParameter(format!("{} bound violations", s.total_violations())),
                });
            }
        }
        Command::Validate { state } => {
            let (rho, _) = load_state(&state)?;
            let eig = rho.eigenvalues();
            print_json(&serde_json::json!({
                "valid": true,
                "dims": rho.dims().dims(),
                "labels": rho.dims().labels(),
                "min_eigenvalue": eig.last().copied().unwrap_or(0.0),
                "entropy_bits": rho.entropy(),
                "purity": rho.purity(),
            }))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
