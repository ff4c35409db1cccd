//! `specsense`: energy-detection analytics and simulations from the shell.

mod commands;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use specsense_core::montecarlo::{DEFAULT_SEED, DEFAULT_STREAMS, DEFAULT_TRIALS};

use output::{Format, OutputRecord};

#[derive(Parser, Debug)]
#[command(
    name = "specsense",
    version,
    about = "Energy-detection spectrum sensing over Fisher-Snedecor F composite fading"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ROC table (pf, pd) over a false-alarm grid.
    Roc(RocArgs),
    /// Average detection probability with series diagnostics.
    Pd(PdArgs),
    /// Area under the ROC curve, optionally swept over m and m_s.
    Auc(AucArgs),
    /// Shannon, cross and relative entropies of the SNR law.
    Entropy(EntropyArgs),
    /// Monte Carlo estimate next to its closed form.
    Simulate(SimulateArgs),
    /// Runs the acceptance criteria.
    Selftest,
}

#[derive(Args, Debug, Clone)]
struct ChannelArgs {
    /// Average SNR in dB.
    #[arg(long = "snr-db", allow_negative_numbers = true)]
    snr_db: Option<f64>,
    /// Multipath shape m. Omit together with --ms for a non-fading channel.
    #[arg(long)]
    m: Option<f64>,
    /// Shadowing shape m_s (> 1).
    #[arg(long)]
    ms: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct DetectorArgs {
    /// Time-bandwidth product.
    #[arg(long, default_value_t = 2)]
    u: u32,
    /// Detection threshold λ.
    #[arg(long, conflicts_with = "pf")]
    threshold: Option<f64>,
    /// False-alarm target used to set λ [default: 0.1].
    #[arg(long)]
    pf: Option<f64>,
    /// Noise uncertainty β in dB.
    #[arg(long = "noise-db", default_value_t = 0.0)]
    noise_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FusionArg {
    None,
    Or,
    And,
}

#[derive(Args, Debug, Clone)]
struct SchemeArgs {
    /// Hard-decision fusion rule.
    #[arg(long, value_enum, default_value_t = FusionArg::None)]
    fusion: FusionArg,
    /// Cooperating users for --fusion.
    #[arg(long, default_value_t = 1)]
    users: u32,
    /// Square-law selection over this many branches.
    #[arg(long)]
    sls: Option<u32>,
}

#[derive(Args, Debug, Clone)]
struct SeriesArgs {
    #[arg(long = "rel-tol", default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long = "max-terms", default_value_t = 10_000)]
    max_terms: usize,
}

#[derive(Args, Debug, Clone)]
struct SimArgs {
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Random substreams.
    #[arg(long, default_value_t = DEFAULT_STREAMS)]
    streams: u32,
}

#[derive(Args, Debug)]
struct RocArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Time-bandwidth product.
    #[arg(long, default_value_t = 2)]
    u: u32,
    /// Noise uncertainty β in dB.
    #[arg(long = "noise-db", default_value_t = 0.0)]
    noise_db: f64,
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Log-spaced grid `lo:hi:points`.
    #[arg(long = "pf-grid", default_value = "1e-4:0.999:200")]
    pf_grid: String,
    /// Adds Monte Carlo columns.
    #[arg(long)]
    simulate: bool,
    #[command(flatten)]
    sim: SimArgs,
    #[command(flatten)]
    series: SeriesArgs,
}

#[derive(Args, Debug)]
struct PdArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    detector: DetectorArgs,
    #[command(flatten)]
    series: SeriesArgs,
}

#[derive(Args, Debug)]
struct AucArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long, default_value_t = 2)]
    u: u32,
    /// `m:lo:hi:steps` or `ms:lo:hi:steps`; repeat or comma-separate.
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<String>,
}

#[derive(Args, Debug)]
struct EntropyArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// The eight (m, m_s, γ̄) settings of the entropy table.
    #[arg(long)]
    table1: bool,
    /// Samples drawn for the encoder fits.
    #[arg(long, default_value_t = specsense_core::entropy::DEFAULT_SAMPLE_COUNT)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    Pd,
    Pfa,
    Auc,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    detector: DetectorArgs,
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long, value_enum, default_value_t = Quantity::Pd)]
    quantity: Quantity,
    #[command(flatten)]
    sim: SimArgs,
    #[command(flatten)]
    series: SeriesArgs,
}

/// A bad flag combination or value caught before any numerics run.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

fn flag_for(name: &str) -> Option<&'static str> {
    Some(match name {
        "m" => "--m",
        "m_s" => "--ms",
        "mean_snr" | "gamma" | "snr" => "--snr-db",
        "threshold" => "--threshold",
        "target_pfa" | "target" | "pf_grid" | "lo/hi" => "--pf / --pf-grid",
        "u" => "--u",
        "noise_uncertainty_db" => "--noise-db",
        "trials" => "--trials",
        "stream_count" => "--streams",
        "n_users" => "--users",
        "branches" => "--sls",
        "rel_tol" => "--rel-tol",
        "max_terms" => "--max-terms",
        "n" => "--pf-grid",
        _ => return None,
    })
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("SPECSENSE_THREADS") else {
        return Ok(());
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => {
            return usage(format!(
                "SPECSENSE_THREADS must be a positive integer, got `{raw}`"
            ))
        }
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| anyhow::anyhow!("thread pool: {e}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let echo = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let mut record = OutputRecord::new(echo);

    let outcome = configure_threads().and_then(|()| match &cli.command {
        Command::Roc(a) => commands::roc(a, &mut record),
        Command::Pd(a) => commands::pd(a, &mut record),
        Command::Auc(a) => commands::auc(a, &mut record),
        Command::Entropy(a) => commands::entropy(a, &mut record),
        Command::Simulate(a) => commands::simulate(a, &mut record),
        Command::Selftest => commands::selftest(&mut record),
    });
    let outcome = outcome.and_then(|passed| {
        record.write(cli.format, std::io::stdout().lock())?;
        Ok(passed)
    });

    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            let mut code = 1;
            for cause in err.chain() {
                if cause.downcast_ref::<UsageError>().is_some() {
                    code = 2;
                }
                if let Some(specsense_core::Error::Domain { name, .. }) =
                    cause.downcast_ref::<specsense_core::Error>()
                {
                    code = 2;
                    if let Some(flag) = flag_for(name) {
                        eprintln!("  check {flag}");
                    }
                }
            }
            if code == 1 && !record.parameters.is_empty() {
                eprintln!("  parameters: {}", record.describe());
            }
            ExitCode::from(code)
        }
    }
}
