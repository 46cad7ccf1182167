//! Command-line surface for the multispike library: closed-form power
//! envelopes, sup-LR critical values and powers, the sphericity-test
//! battery on data files, model simulation, batch experiments, and figure
//! regeneration.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use multispike::classic::{beta_clr, beta_john_lw_cm, beta_tw, envelope_lambda, envelope_mu};
use multispike::error::Error;
use multispike::experiment::{run_data_test, run_experiment, ExperimentSpec};
use multispike::field::{build_grid, FieldKernel, FieldVariant, GridSpec};
use multispike::figures::{emit_figure, FigureParams};
use multispike::matio::{write_binary, write_csv};
use multispike::rng::derive_seed;
use multispike::sim::{generate_data, SpikeBasis, SpikeVector, SpikedParams};

#[derive(Parser)]
#[command(
    name = "multispike",
    version,
    about = "Sphericity testing against multispiked alternatives"
)]
struct Cli {
    /// Base seed for every stochastic subcommand.
    #[arg(long, global = true, default_value_t = 20_120_509)]
    seed: u64,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Output path (defaults to stdout for JSON reports).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format where both make sense.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Variant {
    Lambda,
    Mu,
}

impl From<Variant> for FieldVariant {
    fn from(v: Variant) -> FieldVariant {
        match v {
            Variant::Lambda => FieldVariant::Lambda,
            Variant::Mu => FieldVariant::Mu,
        }
    }
}

#[derive(Args)]
struct GridArgs {
    /// Number of spikes the test is designed against.
    #[arg(long, default_value_t = 2)]
    r: usize,

    #[arg(long, default_value_t = 30)]
    points_per_axis: usize,

    #[arg(long, default_value_t = 0.05)]
    theta_min: f64,

    #[arg(long, default_value_t = 3.0)]
    theta_max: f64,

    /// Distance from the contiguity boundary (default 0.05·√c).
    #[arg(long)]
    delta: Option<f64>,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec {
            r: self.r,
            points_per_axis: self.points_per_axis,
            delta: self.delta,
            theta_min: self.theta_min,
            theta_max: self.theta_max,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Asymptotic power envelopes at an alternative h.
    Envelope {
        /// Spike magnitudes, comma separated (absolute units).
        #[arg(long, value_delimiter = ',')]
        h: Vec<f64>,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },

    /// Closed-form asymptotic powers of the classic tests at h.
    PowerAsym {
        #[arg(long, value_delimiter = ',')]
        h: Vec<f64>,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },

    /// Simulated critical value of the sup-LR test on a θ-grid.
    Critval {
        #[arg(long, value_enum, default_value_t = Variant::Lambda)]
        variant: Variant,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 200_000)]
        draws: usize,
        #[command(flatten)]
        grid: GridArgs,
    },

    /// Asymptotic power of the sup-LR test against h*.
    LrPower {
        #[arg(long, value_enum, default_value_t = Variant::Lambda)]
        variant: Variant,
        #[arg(long)]
        c: f64,
        #[arg(long, value_delimiter = ',')]
        h_star: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 200_000)]
        draws: usize,
        #[command(flatten)]
        grid: GridArgs,
    },

    /// Run the test battery on a data matrix (CSV or binary).
    Test {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated test ids: john,lw,clr,caima,tw,lr-lambda,lr-mu.
        #[arg(long, value_delimiter = ',')]
        tests: Vec<String>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Known noise variance to divide out before testing.
        #[arg(long)]
        sigma2_known: Option<f64>,
    },

    /// Draw one data matrix from the spiked model and write it out.
    Simulate {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        h: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        /// Spike basis: canonical coordinates or a Haar frame.
        #[arg(long, default_value = "canonical")]
        basis: String,
    },

    /// Run an experiment described by a JSON or TOML spec file.
    Experiment {
        #[arg(long)]
        spec: PathBuf,
        /// Stamp the report with the wall-clock time (off by default so
        /// reruns are byte-identical).
        #[arg(long, default_value_t = false)]
        stamp: bool,
    },

    /// Regenerate figure curve data (fig1 … fig7, or "all").
    Figures {
        #[arg(long, default_value = "all")]
        figure: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 200_000)]
        cv_draws: usize,
        #[arg(long, default_value_t = 40_000)]
        power_draws: usize,
    },
}

fn write_output(cli_out: &Option<PathBuf>, text: &str) -> multispike::Result<()> {
    match cli_out {
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            std::fs::write(path, text)?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> multispike::Result<()> {
    match &cli.command {
        Command::Envelope { h, c, alpha } => {
            let out = json!({
                "h": h,
                "c": c,
                "alpha": alpha,
                "envelope_lambda": envelope_lambda(h, *c, *alpha)?,
                "envelope_mu": envelope_mu(h, *c, *alpha)?,
            });
            write_output(&cli.out, &serde_json::to_string_pretty(&out).unwrap())
        }

        Command::PowerAsym { h, c, alpha } => {
            let clr = if *c < 1.0 {
                Some(beta_clr(h, *c, *alpha)?)
            } else {
                None
            };
            let out = json!({
                "h": h,
                "c": c,
                "alpha": alpha,
                "beta_john_lw_cm": beta_john_lw_cm(h, *c, *alpha)?,
                "beta_clr": clr,
                "beta_tw": beta_tw(h, *c, *alpha)?,
                "envelope_lambda": envelope_lambda(h, *c, *alpha)?,
                "envelope_mu": envelope_mu(h, *c, *alpha)?,
            });
            write_output(&cli.out, &serde_json::to_string_pretty(&out).unwrap())
        }

        Command::Critval {
            variant,
            c,
            alpha,
            draws,
            grid,
        } => {
            let g = build_grid(FieldKernel::new((*variant).into(), *c)?, &grid.spec())?;
            let cv = g.critical_value(*alpha, *draws, derive_seed(cli.seed, 1))?;
            let out = json!({
                "critical_value": cv,
                "alpha": alpha,
                "draws": draws,
                "seed": cli.seed,
                "jitter": g.jitter(),
                "grid_points": g.points().len(),
                "grid": g.summary(),
            });
            write_output(&cli.out, &serde_json::to_string_pretty(&out).unwrap())
        }

        Command::LrPower {
            variant,
            c,
            h_star,
            alpha,
            draws,
            grid,
        } => {
            let g = build_grid(FieldKernel::new((*variant).into(), *c)?, &grid.spec())?;
            let (power, se) = g.asymptotic_power(*alpha, h_star, *draws, cli.seed)?;
            let out = json!({
                "power": power,
                "mc_std_error": se,
                "h_star": h_star,
                "alpha": alpha,
                "draws": draws,
                "seed": cli.seed,
                "jitter": g.jitter(),
            });
            write_output(&cli.out, &serde_json::to_string_pretty(&out).unwrap())
        }

        Command::Test {
            input,
            tests,
            alpha,
            sigma2_known,
        } => {
            let outcomes = run_data_test(input, tests, *alpha, *sigma2_known, None, cli.seed)?;
            write_output(&cli.out, &serde_json::to_string_pretty(&outcomes).unwrap())
        }

        Command::Simulate {
            p,
            n,
            h,
            sigma2,
            basis,
        } => {
            let basis = match basis.as_str() {
                "canonical" => SpikeBasis::Canonical,
                "haar" => SpikeBasis::Haar,
                other => return Err(Error::Invalid(format!("unknown basis {other:?}"))),
            };
            let spikes = SpikeVector::new(h.clone())?;
            let params = SpikedParams::new(*p, *n, spikes, *sigma2, basis)?;
            let x = generate_data(&params, cli.seed);
            let path = cli
                .out
                .clone()
                .ok_or_else(|| Error::Invalid("simulate needs --out".into()))?;
            let as_csv = cli.format == Format::Csv
                || path.extension().and_then(|e| e.to_str()) == Some("csv");
            if as_csv {
                write_csv(&x, &path)?;
            } else {
                write_binary(&x, &path)?;
            }
            eprintln!("wrote {}x{} matrix to {}", p, n, path.display());
            Ok(())
        }

        Command::Experiment { spec, stamp } => {
            let text = std::fs::read_to_string(spec)?;
            let parsed: ExperimentSpec = match spec.extension().and_then(|e| e.to_str()) {
                Some("toml") => toml::from_str(&text)
                    .map_err(|e| Error::Invalid(format!("bad TOML spec: {e}")))?,
                _ => serde_json::from_str(&text)
                    .map_err(|e| Error::Invalid(format!("bad JSON spec: {e}")))?,
            };
            let mut report = run_experiment(&parsed)?;
            if *stamp {
                let now = std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                report.generated_at = Some(format!("unix:{now}"));
            }
            let text = serde_json::to_string_pretty(&report).unwrap();
            let target = cli
                .out
                .clone()
                .or_else(|| parsed.output.clone().map(PathBuf::from));
            write_output(&target, &text)
        }

        Command::Figures {
            figure,
            alpha,
            cv_draws,
            power_draws,
        } => {
            let params = FigureParams {
                alpha: *alpha,
                seed: cli.seed,
                cv_draws: *cv_draws,
                power_draws: *power_draws,
                ..Default::default()
            };
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
            let ids: Vec<String> = if figure == "all" {
                (1..=7).map(|i| format!("fig{i}")).collect()
            } else {
                vec![figure.clone()]
            };
            for id in ids {
                let path = dir.join(format!("{id}.csv"));
                let (written, rows) = emit_figure(&id, &params, &path)?;
                eprintln!("{id}: {rows} rows -> {}", written.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: failed to size the worker pool: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numerical(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
