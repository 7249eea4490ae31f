//! Command-line front end: PDF/tail/quantile evaluation (exact,
//! asymptotic, Monte Carlo) and reproduction of the reference accuracy
//! tables.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use normprod::asym::{self, TailSide};
use normprod::exact::{self, DistParams, EvalConfig};
use normprod::harness::{Harness, HarnessConfig, TruthMode};
use normprod::mc::{self, RandomStream};
use normprod::Error;

#[derive(Parser)]
#[command(
    name = "normprod",
    about = "Distribution of sums of products of correlated normals",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// Mean of the first factor.
    #[arg(long, allow_hyphen_values = true)]
    mu_x: f64,
    /// Mean of the second factor.
    #[arg(long, allow_hyphen_values = true)]
    mu_y: f64,
    /// Standard deviation of the first factor.
    #[arg(long, default_value_t = 1.0)]
    sigma_x: f64,
    /// Standard deviation of the second factor.
    #[arg(long, default_value_t = 1.0)]
    sigma_y: f64,
    /// Correlation between the factors.
    #[arg(long, allow_hyphen_values = true)]
    rho: f64,
    /// Number of independent product terms in the sum.
    #[arg(long, default_value_t = 1)]
    n: u32,
}

impl ParamArgs {
    fn build(&self) -> Result<DistParams, Error> {
        DistParams::new(self.mu_x, self.mu_y, self.sigma_x, self.sigma_y, self.rho, self.n)
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Output::Text)]
    output: Output,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out_path: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    ExactSeries,
    ExactIntegral,
    Asym,
    Mc,
    Numeric,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    Upper,
    Lower,
}

impl From<Side> for TailSide {
    fn from(s: Side) -> TailSide {
        match s {
            Side::Upper => TailSide::Upper,
            Side::Lower => TailSide::Lower,
        }
    }
}

fn default_seed() -> u64 {
    std::env::var("NORMPROD_SEED")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the density of S_n at a point.
    Pdf {
        #[command(flatten)]
        params: ParamArgs,
        /// Evaluation point.
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, value_enum, default_value_t = Mode::Numeric)]
        mode: Mode,
        /// Truncation order of the asymptotic expansion (asym mode).
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate a tail probability at a point.
    Tail {
        #[command(flatten)]
        params: ParamArgs,
        /// Evaluation point.
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, value_enum, default_value_t = Mode::Numeric)]
        mode: Mode,
        /// Which tail the asymptotic formula targets: upper = P(S > x),
        /// lower = P(S < x).
        #[arg(long, value_enum, default_value_t = Side::Upper)]
        side: Side,
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Monte Carlo sample count (mc mode).
        #[arg(long, default_value_t = 1_000_000)]
        n_samples: u64,
        /// Master RNG seed (mc mode); env NORMPROD_SEED overrides the
        /// default.
        #[arg(long, default_value_t = default_seed())]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate the quantile function at a probability level.
    Quantile {
        #[command(flatten)]
        params: ParamArgs,
        /// Probability level in (0,1).
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value_t = Mode::Numeric)]
        mode: Mode,
        #[arg(long, default_value_t = 1_000_000)]
        n_samples: u64,
        #[arg(long, default_value_t = default_seed())]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Draw reproducible realisations of S_n.
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 10)]
        n_samples: u64,
        #[arg(long, default_value_t = default_seed())]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Reproduce one of the reference accuracy tables (1, 3, 4 or 5).
    Table {
        /// Table identifier.
        #[arg(long)]
        id: u8,
        /// Truth source: deterministic quadrature or seeded Monte Carlo.
        #[arg(long, value_enum, default_value_t = Truth::Quadrature)]
        truth: Truth,
        #[arg(long, default_value_t = 1_000_000)]
        n_samples: u64,
        #[arg(long, default_value_t = default_seed())]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Truth {
    Quadrature,
    Mc,
}

/// A single scalar result rendered in the requested format.
fn emit_scalar(name: &str, value: f64, out: &OutputArgs) -> Result<(), Error> {
    let text = match out.output {
        Output::Text => format!("{name} = {value:.17e}\n"),
        Output::Csv => format!("{name}\n{value:.17e}\n"),
        Output::Json => {
            format!("{}\n", serde_json::json!({ name: value }))
        }
    };
    write_out(&text, out)
}

fn write_out(text: &str, out: &OutputArgs) -> Result<(), Error> {
    match &out.out_path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Parameter(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = EvalConfig::default();
    match cli.command {
        Command::Pdf { params, x, mode, order, out } => {
            let p = params.build()?;
            let v = match mode {
                Mode::ExactSeries => exact::pdf_series(&p, x, &cfg)?,
                Mode::ExactIntegral => exact::pdf_integral(&p, x, &cfg)?,
                Mode::Numeric => exact::pdf(&p, x, &cfg)?,
                Mode::Asym => {
                    let side = if x >= 0.0 { TailSide::Upper } else { TailSide::Lower };
                    asym::pdf_asym(&p, x, side, order, &cfg)?
                }
                Mode::Mc => {
                    return Err(Error::Parameter(
                        "pdf has no mc mode; use tail or quantile".into(),
                    ))
                }
            };
            emit_scalar("pdf", v, &out)
        }
        Command::Tail { params, x, mode, side, order, n_samples, seed, out } => {
            let p = params.build()?;
            let v = match mode {
                Mode::Numeric => exact::tail(&p, x, &cfg)?,
                Mode::ExactSeries | Mode::ExactIntegral => exact::tail(&p, x, &cfg)?,
                Mode::Asym => asym::tail_asym(&p, x, side.into(), order, &cfg)?,
                Mode::Mc => {
                    let r = mc::empirical_tail(&p, x, n_samples, &RandomStream::new(seed, 0));
                    if out.output == Output::Json {
                        return write_out(
                            &format!(
                                "{}\n",
                                serde_json::json!({
                                    "tail": r.estimate,
                                    "n_samples": r.n_samples,
                                    "std_error": r.std_error,
                                })
                            ),
                            &out,
                        );
                    }
                    r.estimate
                }
            };
            emit_scalar("tail", v, &out)
        }
        Command::Quantile { params, p: prob, mode, n_samples, seed, out } => {
            let p = params.build()?;
            match mode {
                Mode::Numeric | Mode::ExactSeries | Mode::ExactIntegral => {
                    emit_scalar("quantile", exact::quantile_numeric(&p, prob, &cfg)?, &out)
                }
                Mode::Asym => {
                    let q = asym::quantile_asym(&p, prob, &cfg)?;
                    if out.output == Output::Json {
                        write_out(
                            &format!(
                                "{}\n",
                                serde_json::json!({
                                    "quantile": q.value,
                                    "asymptotic_regime": q.asymptotic_regime,
                                })
                            ),
                            &out,
                        )
                    } else {
                        emit_scalar("quantile", q.value, &out)
                    }
                }
                Mode::Mc => {
                    let r = mc::empirical_quantile(
                        &p,
                        prob,
                        n_samples,
                        &RandomStream::new(seed, 0),
                        &cfg,
                    )?;
                    if out.output == Output::Json {
                        write_out(
                            &format!(
                                "{}\n",
                                serde_json::json!({
                                    "quantile": r.estimate,
                                    "n_samples": r.n_samples,
                                    "std_error": r.std_error,
                                })
                            ),
                            &out,
                        )
                    } else {
                        emit_scalar("quantile", r.estimate, &out)
                    }
                }
            }
        }
        Command::Sample { params, n_samples, seed, out } => {
            let p = params.build()?;
            let mut state = RandomStream::new(seed, 0).state();
            let draws: Vec<f64> =
                (0..n_samples).map(|_| mc::sample_sn(&p, &mut state)).collect();
            let text = match out.output {
                Output::Text | Output::Csv => {
                    let mut t = String::from("sample\n");
                    for d in &draws {
                        t.push_str(&format!("{d:.17e}\n"));
                    }
                    t
                }
                Output::Json => format!("{}\n", serde_json::json!({ "samples": draws })),
            };
            write_out(&text, &out)
        }
        Command::Table { id, truth, n_samples, seed, out } => {
            let mut harness = Harness::new(HarnessConfig {
                truth_mode: match truth {
                    Truth::Quadrature => TruthMode::Quadrature,
                    Truth::Mc => TruthMode::Mc,
                },
                n_samples,
                seed,
                eval: cfg,
            });
            let report = harness.reproduce_table(id)?;
            let text = match out.output {
                Output::Json => format!("{}\n", report.to_json()),
                Output::Csv => report.to_csv(),
                Output::Text => {
                    let mut t = String::new();
                    for r in &report.rows {
                        t.push_str(&format!(
                            "table {} ({},{},{},{}) point {} {:?}: rel_err {:.3e}\n",
                            report.table_id,
                            r.params.mu_x,
                            r.params.mu_y,
                            r.params.rho,
                            r.params.n,
                            r.eval_point,
                            r.status,
                            r.rel_err,
                        ));
                    }
                    t
                }
            };
            write_out(&text, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {} ({})", e, e.category());
            ExitCode::FAILURE
        }
    }
}
