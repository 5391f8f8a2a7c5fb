use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ebm_spectral::harness::{self, read_cluster, write_cluster, ExperimentConfig};
use ebm_spectral::noise::NoiseMode;
use ebm_spectral::relaxation::EbmModel;
use ebm_spectral::spectral::FrequencyIndex;

/// Forward and inverse solvers for clustered eigenvalues of the
/// extended Burgers relaxation model.
#[derive(Parser)]
#[command(name = "ebm-spectral", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Number of relaxation terms.
    #[arg(long, default_value_t = 5)]
    n: usize,
    /// Unrelaxed modulus D.
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    /// Explicit rates (comma-separated); default r_i = 5*i.
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<f64>>,
    /// Explicit weights (comma-separated); default b_i = 1.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Rescale weights so that sum(b_i/r_i) = 1.
    #[arg(long)]
    normalize_h: bool,
}

impl ModelArgs {
    fn build(&self) -> Result<EbmModel, String> {
        let rates = self
            .rates
            .clone()
            .unwrap_or_else(|| (1..=self.n).map(|i| 5.0 * i as f64).collect());
        let weights = self.weights.clone().unwrap_or_else(|| vec![1.0; self.n]);
        if rates.len() != self.n || weights.len() != self.n {
            return Err(format!(
                "expected {} rates and weights, got {} and {}",
                self.n,
                rates.len(),
                weights.len()
            ));
        }
        let model = EbmModel::new(self.d, weights, rates).map_err(|e| e.to_string())?;
        Ok(if self.normalize_h {
            model.normalized_h()
        } else {
            model
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute one eigenvalue cluster and report its structure.
    Forward {
        #[command(flatten)]
        model: ModelArgs,
        /// Frequency index k.
        #[arg(long)]
        k: u32,
        /// Bisection tolerance.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Also write the cluster as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct (D, b_i, r_i) from two cluster files.
    Invert {
        cluster1: PathBuf,
        cluster2: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Run the reconstruction sweep described by a config file.
    Experiment {
        /// Flat key = value config; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the seed list with a single seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the noise-level list with a single level.
        #[arg(long)]
        delta: Option<f64>,
        /// Noise application mode: all, interlaced, or single-draw.
        #[arg(long)]
        noise_mode: Option<NoiseMode>,
        /// Rescale weights so that sum(b_i/r_i) = 1.
        #[arg(long)]
        normalize_h: bool,
        /// Override the bisection tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Parse and validate a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_COMPUTATION: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help/version are not errors
            if err.use_stderr() {
                eprint!("{err}");
                return ExitCode::from(EXIT_VALIDATION);
            }
            print!("{err}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(CliError::Computation(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_COMPUTATION)
        }
    }
}

enum CliError {
    Validation(String),
    Computation(String),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Forward { model, k, tol, out } => {
            let model = model.build().map_err(CliError::Validation)?;
            let k = FrequencyIndex::new(k).map_err(|e| CliError::Validation(e.to_string()))?;
            let report = harness::run_forward(&model, k, tol)
                .map_err(|e| CliError::Computation(e.to_string()))?;
            println!("{report}");
            if let Some(path) = out {
                let measured = ebm_spectral::MeasuredCluster::from_cluster(&report.cluster);
                write_cluster(&path, &measured)
                    .map_err(|e| CliError::Computation(e.to_string()))?;
                println!("cluster written to {}", path.display());
            }
            Ok(())
        }
        Command::Invert {
            cluster1,
            cluster2,
            tol,
        } => {
            let c1 = read_cluster(&cluster1).map_err(|e| CliError::Validation(e.to_string()))?;
            let c2 = read_cluster(&cluster2).map_err(|e| CliError::Validation(e.to_string()))?;
            let result = harness::run_invert(&c1, &c2, tol)
                .map_err(|e| CliError::Computation(e.to_string()))?;
            println!("{}", harness::format_reconstruction(&result));
            Ok(())
        }
        Command::Experiment {
            config,
            out,
            seed,
            delta,
            noise_mode,
            normalize_h,
            tol,
        } => {
            let mut config = match config {
                Some(path) => ExperimentConfig::from_file(&path)
                    .map_err(|e| CliError::Validation(e.to_string()))?,
                None => ExperimentConfig::default(),
            };
            if let Some(dir) = out {
                config.out_dir = dir;
            }
            if let Some(seed) = seed {
                config.seeds = vec![seed];
            }
            if let Some(delta) = delta {
                config.deltas = vec![delta];
            }
            if let Some(mode) = noise_mode {
                config.noise_mode = mode;
            }
            if normalize_h {
                config.normalize_h = true;
            }
            if let Some(tol) = tol {
                config.bisect_tol = tol;
            }
            config
                .validate()
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let summary = harness::run_experiment(&config)
                .map_err(|e| CliError::Computation(e.to_string()))?;
            println!(
                "{} grid points, {} failures; outputs in {}",
                summary.grid_points,
                summary.failures,
                summary.out_dir.display()
            );
            Ok(())
        }
        Command::Validate { config } => {
            let config = ExperimentConfig::from_file(&config)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            config
                .validate()
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let grid = config.d_values.len()
                * config.deltas.len()
                * config.k_pairs.len()
                * config.seeds.len();
            let model = config
                .model_for(config.d_values[0])
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let (h, _) = model.modulus_h();
            println!("config ok: {grid} grid points, N={}, h={h:.6}", config.n);
            Ok(())
        }
    }
}
