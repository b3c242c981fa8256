use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mmcodes::{Budget, ConfinementMode};
use mmcodes_cli::commands::{self, Effort, Input, Output, TextFormat};
use mmcodes_cli::config::BuildConfig;
use mmcodes_cli::error::{CliError, CliResult};
use mmcodes_cli::manifest::MatrixFormat;

#[derive(Parser)]
#[command(name = "mmcodes", version, about = "Build and analyse multi-dimensional CSS codes over group algebras")]
struct Cli {
    /// Cap on sum_{j<=w} C(n,j) for exhaustive searches.
    #[arg(long, global = true, env = "MMCODES_BUDGET")]
    budget: Option<f64>,
    /// Cap on stored keys for exact confinement.
    #[arg(long, global = true)]
    key_budget: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct EffortArgs {
    /// Exhaustive search weight.
    #[arg(long, default_value_t = 4)]
    w_exhaustive: usize,
    /// Randomized information-set iterations.
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Cluster,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    X,
    Z,
    Both,
}

impl Which {
    fn as_str(self) -> &'static str {
        match self {
            Which::X => "x",
            Which::Z => "z",
            Which::Both => "both",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a code from a TOML config and write a bundle directory.
    Build {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Matrix formats to write (alist, mtx).
        #[arg(long, value_delimiter = ',', default_value = "alist,mtx")]
        formats: Vec<String>,
    },
    /// Check the chain-complex identities of a config or bundle.
    Verify { input: PathBuf },
    /// Compute a full parameter report.
    Params {
        input: PathBuf,
        #[command(flatten)]
        effort: EffortArgs,
        #[arg(long)]
        confinement_w: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        confinement_mode: Mode,
        #[arg(long)]
        single_shot_w: Option<usize>,
        #[arg(long, value_enum, default_value_t = Fmt::Json)]
        format: Fmt,
    },
    /// Bounds on the X/Z distance.
    Distance {
        input: PathBuf,
        #[arg(long = "type", value_enum, default_value_t = Which::Both)]
        which: Which,
        #[command(flatten)]
        effort: EffortArgs,
    },
    /// Bounds on the single-shot (metacheck) distance.
    Ssdist {
        input: PathBuf,
        #[arg(long = "type", value_enum, default_value_t = Which::Both)]
        which: Which,
        #[command(flatten)]
        effort: EffortArgs,
    },
    /// Confinement profile up to a weight.
    Confine {
        input: PathBuf,
        #[arg(long = "type", value_enum, default_value_t = Which::Both)]
        which: Which,
        #[arg(long, default_value_t = 4)]
        confinement_w: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        confinement_mode: Mode,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Random search over generator choices; writes JSONL.
    Search {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config worker count.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Write check matrices to files or stdout.
    Export {
        input: PathBuf,
        #[arg(long, default_value = "alist")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the bundled code zoo.
    Table2 {
        /// Row numbers or ranges (e.g. 1 3-5); all rows when empty.
        rows: Vec<String>,
        #[command(flatten)]
        effort: EffortArgs,
        #[arg(long, value_enum, default_value_t = Fmt::Text)]
        format: Fmt,
    },
}

fn fmt(f: Fmt) -> TextFormat {
    match f {
        Fmt::Json => TextFormat::Json,
        Fmt::Text => TextFormat::Text,
    }
}

fn mode(m: Mode) -> ConfinementMode {
    match m {
        Mode::Exact => ConfinementMode::Exact,
        Mode::Cluster => ConfinementMode::Cluster,
    }
}

fn effort(a: &EffortArgs, budget: Budget) -> Effort {
    Effort {
        w_exhaustive: a.w_exhaustive,
        iterations: a.iterations,
        seed: a.seed,
        workers: a.workers,
        budget,
    }
}

fn parse_formats(names: &[String]) -> CliResult<Vec<MatrixFormat>> {
    names
        .iter()
        .map(|s| match s.as_str() {
            "alist" => Ok(MatrixFormat::Alist),
            "mtx" => Ok(MatrixFormat::Mtx),
            other => Err(CliError::Usage(format!("unknown matrix format {other:?}"))),
        })
        .collect()
}

fn run(cli: Cli) -> CliResult<Output> {
    let mut budget = Budget::default();
    if let Some(b) = cli.budget {
        if b <= 0.0 {
            return Err(CliError::Usage("--budget must be positive".into()));
        }
        budget.enumeration = b;
    }
    if let Some(k) = cli.key_budget {
        budget.keys = k;
    }
    match cli.command {
        Command::Build { config, out, formats } => {
            let cfg = BuildConfig::load(&config)?;
            commands::build(&cfg, &out, &parse_formats(&formats)?)
        }
        Command::Verify { input } => commands::verify(&Input::load(&input)?),
        Command::Params {
            input,
            effort: e,
            confinement_w,
            confinement_mode,
            single_shot_w,
            format,
        } => commands::params(
            &Input::load(&input)?,
            &effort(&e, budget),
            confinement_w,
            mode(confinement_mode),
            single_shot_w,
            fmt(format),
        ),
        Command::Distance { input, which, effort: e } => {
            commands::distance(&Input::load(&input)?, which.as_str(), &effort(&e, budget))
        }
        Command::Ssdist { input, which, effort: e } => {
            commands::ssdist(&Input::load(&input)?, which.as_str(), &effort(&e, budget))
        }
        Command::Confine {
            input,
            which,
            confinement_w,
            confinement_mode,
            workers,
        } => commands::confine(&Input::load(&input)?, which.as_str(), confinement_w, mode(confinement_mode), workers, &budget),
        Command::Search { config, out, seed, workers } => {
            let mut cfg = commands::load_search_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(CliError::io(&path))?;
                    let mut w = std::io::BufWriter::new(file);
                    let res = commands::search(&cfg, &mut w)?;
                    w.flush().map_err(CliError::io(&path))?;
                    Ok(res)
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    let mut res = commands::search(&cfg, &mut lock)?;
                    // the summary goes to stderr so stdout stays pure JSONL
                    eprint!("{}", res.text);
                    res.text.clear();
                    Ok(res)
                }
            }
        }
        Command::Export { input, format, out } => commands::export(&Input::load(&input)?, &format, out.as_deref()),
        Command::Table2 { rows, effort: e, format } => commands::table2(&rows, &effort(&e, budget), fmt(format)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { mmcodes_cli::error::exit::USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
