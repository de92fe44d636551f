use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use moment_cruncher::analyze::{AnalysisOptions, PlotMode};
use moment_cruncher_cli::commands::{
    self, GjRequest, OutputFormat, PlotFormat, Source,
};

/// Exact moment analysis for sequences of discrete distributions defined by
/// rational generating functions, built-in families, or marked subword
/// patterns.
#[derive(Parser)]
#[command(name = "moment-cruncher", version, max_term_width = 100)]
struct Cli {
    /// Reserved: the pipeline contains no randomness to seed. Passing the
    /// flag is an error by design.
    #[arg(long = "seed-free", global = true)]
    seed_free: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SourceArgs {
    /// Generating function R(t,s) (or R(t1,t2,s)), e.g. "1/(1-s*(t+1/t)/2)"
    #[arg(long)]
    gf: Option<String>,
    /// Built-in family name, e.g. "heads-count(1/3)"; see `examples`
    #[arg(long)]
    family: Option<String>,
    /// Marked subword patterns, e.g. "HH" or "HH:t1,TT:t2"
    #[arg(long)]
    patterns: Option<String>,
    /// Alphabet size for --patterns
    #[arg(long, default_value_t = 2)]
    alphabet: usize,
}

impl SourceArgs {
    fn resolve(&self) -> anyhow::Result<Source> {
        Ok(commands::resolve_source(
            self.gf.as_deref(),
            self.family.as_deref(),
            self.patterns.as_deref(),
            self.alphabet,
        )?)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, default_value = "text")]
    format: OutputFormat,
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Largest moment order as a multiple of two: moments through 2*rmax
    /// (and 2*rmax+1) are analyzed
    #[arg(long, default_value_t = 4)]
    rmax: usize,
    /// Number of 1/n correction terms in asymptotic formulas
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Held-out points demanded by every fit
    #[arg(long = "hold-out", default_value_t = 5)]
    hold_out: usize,
    /// First n trusted to be past boundary transients
    #[arg(long)]
    n0: Option<usize>,
    /// Length of the fitting window beyond n0
    #[arg(long = "probe-window", default_value_t = 40)]
    probe_window: usize,
}

impl FitArgs {
    fn to_options(&self) -> AnalysisOptions {
        AnalysisOptions {
            r_max: self.rmax,
            depth: self.depth,
            hold_out: self.hold_out,
            n0: self.n0,
            probe_window: self.probe_window,
            coeff_max_deg: None,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in example families
    Examples {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact per-n moment tables
    Moments {
        #[command(flatten)]
        source: SourceArgs,
        /// n range A..B (inclusive)
        #[arg(long = "n-range", default_value = "1..10")]
        n_range: String,
        /// Highest moment order to extract (default 2*rmax = 8)
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit moment polynomials, decide asymptotic normality, and produce
    /// asymptotic formulas in n and the moment order r
    Analyse {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bivariate analysis: mixed moments, the independence gate, and the
    /// four parity-class formulas
    Analyse2 {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build the Goulden-Jackson enumerator for marked patterns
    Gj {
        /// Marked subword patterns, e.g. "HH" or "HH:t1,TT:t2"
        #[arg(long)]
        patterns: String,
        /// Alphabet size
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
        /// Print avoid-counts (the markers = 0 specialization)
        #[arg(long)]
        avoid: bool,
        /// n range A..B for per-n output
        #[arg(long = "n-range")]
        n_range: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Export a histogram of one distribution (standardized or raw)
    Plot {
        #[command(flatten)]
        source: SourceArgs,
        /// Family index n
        #[arg(long)]
        n: usize,
        /// "standardized" ((x-mean)/sigma with density scaling) or "raw"
        #[arg(long, default_value = "standardized")]
        mode: String,
        /// Output format: csv, svg or json
        #[arg(long, default_value = "csv")]
        format: PlotFormat,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the pipeline against brute-force enumeration
    Verify {
        #[command(flatten)]
        source: SourceArgs,
        /// n range A..B (inclusive)
        #[arg(long = "n-range", default_value = "1..10")]
        n_range: String,
        /// Factorial-moment order to compare
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
}

fn write_output(text: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text)
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn configure_threads() {
    if let Ok(value) = std::env::var("MOMENT_CRUNCHER_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if cli.seed_free {
        bail!("--seed-free is reserved: the pipeline contains no randomness to seed");
    }
    match cli.command {
        Command::Examples { output } => {
            let text = commands::run_examples(output.format)?;
            write_output(&text, output.out.as_ref())
        }
        Command::Moments {
            source,
            n_range,
            order,
            output,
        } => {
            let src = source.resolve()?;
            let range = commands::parse_range(&n_range)?;
            let text = commands::run_moments(&src, range, order, output.format)?;
            write_output(&text, output.out.as_ref())
        }
        Command::Analyse {
            source,
            fit,
            output,
        } => {
            let src = source.resolve()?;
            let text = commands::run_analyse(&src, &fit.to_options(), output.format)?;
            write_output(&text, output.out.as_ref())
        }
        Command::Analyse2 {
            source,
            fit,
            output,
        } => {
            let src = source.resolve()?;
            let text = commands::run_analyse2(&src, &fit.to_options(), output.format)?;
            write_output(&text, output.out.as_ref())
        }
        Command::Gj {
            patterns,
            alphabet,
            avoid,
            n_range,
            output,
        } => {
            let range = n_range.as_deref().map(commands::parse_range).transpose()?;
            let text = commands::run_gj(
                &GjRequest {
                    patterns: &patterns,
                    alphabet,
                    avoid,
                    n_range: range,
                },
                output.format,
            )?;
            write_output(&text, output.out.as_ref())
        }
        Command::Plot {
            source,
            n,
            mode,
            format,
            out,
        } => {
            let src = source.resolve()?;
            let mode = match mode.as_str() {
                "standardized" => PlotMode::Standardized,
                "raw" => PlotMode::Raw,
                other => bail!("unknown mode `{other}` (use standardized or raw)"),
            };
            let text = commands::run_plot(&src, n, mode, format)?;
            write_output(&text, out.as_ref())
        }
        Command::Verify {
            source,
            n_range,
            order,
        } => {
            let src = source.resolve()?;
            let range = commands::parse_range(&n_range)?;
            let text = commands::run_verify(&src, range, order)?;
            print!("{text}");
            Ok(())
        }
    }
}

fn main() {
    configure_threads();
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
