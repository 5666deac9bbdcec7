use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fmc_cli::acceptance;
use fmc_cli::commands::{self, RunRequest};
use fmc_cli::config::{key_value, Config, FileConfig, Format, Overrides, Seed};
use fmc_cli::CliError;
use fmc_measure::Kind;

#[derive(Parser)]
#[command(
    name = "fmc",
    version,
    about = "Run, type, rewrite and translate machine-calculus terms"
)]
struct Cli {
    /// TOML config file (default: the file named by FMC_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format: text or json.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// PRNG seed, or `random`.
    #[arg(long, global = true)]
    seed: Option<Seed>,
    /// Machine step limit.
    #[arg(long, global = true)]
    fuel: Option<u64>,
    /// A program whose signature is added to every loaded program.
    #[arg(long, global = true)]
    signature: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a program and print its main term.
    Parse { file: PathBuf },
    /// Print the type of the main term.
    Check { file: PathBuf },
    /// Run the main term on the machine and print the final memory.
    Run {
        file: PathBuf,
        /// Initialise a cell: NAME=VALUE.
        #[arg(long = "cell", value_parser = key_value)]
        cells: Vec<(String, String)>,
        /// Read a stream from a file of whitespace-separated values: LOC=FILE.
        #[arg(long = "stream", value_parser = key_value)]
        streams: Vec<(String, String)>,
        /// Push a value before running: LOC=VALUE, in order.
        #[arg(long = "push", value_parser = key_value)]
        pushes: Vec<(String, String)>,
        /// Print the number of machine transitions.
        #[arg(long)]
        count_steps: bool,
        /// Write the transition trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Print every machine transition.
    Step {
        file: PathBuf,
        #[arg(long = "cell", value_parser = key_value)]
        cells: Vec<(String, String)>,
        #[arg(long = "push", value_parser = key_value)]
        pushes: Vec<(String, String)>,
    },
    /// Reduce the main term to normal form.
    Normalize {
        file: PathBuf,
        /// lo (leftmost-outermost) or ri (rightmost-innermost).
        #[arg(long, default_value = "lo")]
        strategy: String,
        #[arg(long)]
        show_steps: bool,
        /// Explore every reduction path and list the normal forms.
        #[arg(long)]
        all_paths: bool,
    },
    /// Translate between the lambda-calculus and the machine calculus.
    Translate {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// cbv or cbn, for lambda to fmc.
        #[arg(long)]
        strategy: Option<String>,
        file: PathBuf,
    },
    /// Collapse a multi-location term onto the main stack.
    Collapse {
        file: PathBuf,
        /// Location order, e.g. `lam,a,b`.
        #[arg(long)]
        order: Option<String>,
    },
    /// Embed a single-stack term at a location.
    Embed {
        file: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long)]
        order: Option<String>,
    },
    /// Test two terms for machine equivalence; prints a JSON verdict.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        /// The type to compare at (default: inferred from the first term).
        #[arg(long = "type")]
        ty: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Compute the strong or weak measure of the main term.
    Measure {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "strong")]
        kind: KindArg,
        /// Also run the machine with the measure as fuel.
        #[arg(long)]
        fuel_check: bool,
    },
    /// Run the acceptance checks.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Strong,
    Weak,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Strong => Kind::Strong,
            KindArg::Weak => Kind::Weak,
        }
    }
}

fn stream_file(loc: String, path: &str) -> Result<(String, Vec<String>), CliError> {
    let text = commands::read_source(Path::new(path))?;
    Ok((loc, text.split_whitespace().map(str::to_string).collect()))
}

fn config(
    cli: &Cli,
    cells: Vec<(String, String)>,
    streams: Vec<(String, Vec<String>)>,
    depth: Option<usize>,
) -> Result<Config, CliError> {
    let file = FileConfig::discover(cli.config.as_deref())?;
    let flags = Overrides {
        signature: cli.signature.clone(),
        fuel: cli.fuel,
        seed: cli.seed,
        depth,
        format: cli.format,
        cells,
        streams,
    };
    Ok(Config::resolve(file, flags))
}

fn program(path: &Path, cfg: &Config) -> Result<fmc_surface::Program, CliError> {
    commands::load_program(&commands::read_source(path)?, cfg)
}

/// The text to print, and whether the command succeeded.
fn dispatch(cli: &Cli) -> Result<(String, bool), CliError> {
    let plain = || config(cli, Vec::new(), Vec::new(), None);
    let ok = |s: String| Ok((s, true));
    match &cli.command {
        Command::Parse { file } => {
            let cfg = plain()?;
            ok(commands::cmd_parse(&program(file, &cfg)?, cfg.format)?)
        }
        Command::Check { file } => {
            let cfg = plain()?;
            ok(commands::cmd_check(&program(file, &cfg)?, cfg.format)?)
        }
        Command::Run {
            file,
            cells,
            streams,
            pushes,
            count_steps,
            trace,
        } => {
            let streams = streams
                .iter()
                .map(|(l, p)| stream_file(l.clone(), p))
                .collect::<Result<Vec<_>, _>>()?;
            let cfg = config(cli, cells.clone(), streams, None)?;
            let req = RunRequest {
                pushes,
                count_steps: *count_steps,
                trace: trace.as_deref(),
            };
            ok(commands::cmd_run(&program(file, &cfg)?, &cfg, &req)?)
        }
        Command::Step { file, cells, pushes } => {
            let cfg = config(cli, cells.clone(), Vec::new(), None)?;
            ok(commands::cmd_step(&program(file, &cfg)?, &cfg, pushes)?)
        }
        Command::Normalize {
            file,
            strategy,
            show_steps,
            all_paths,
        } => {
            let cfg = plain()?;
            let strat = commands::strategy(strategy)?;
            ok(commands::cmd_normalize(
                &program(file, &cfg)?,
                &cfg,
                strat,
                *show_steps,
                *all_paths,
            )?)
        }
        Command::Translate {
            from,
            to,
            strategy,
            file,
        } => {
            let cfg = plain()?;
            ok(commands::cmd_translate(
                &commands::read_source(file)?,
                from,
                to,
                strategy.as_deref(),
                &cfg,
            )?)
        }
        Command::Collapse { file, order } => {
            let cfg = plain()?;
            ok(commands::cmd_collapse(
                &program(file, &cfg)?,
                order.as_deref(),
                cfg.format,
            )?)
        }
        Command::Embed { file, at, order } => {
            let cfg = plain()?;
            ok(commands::cmd_embed(
                &program(file, &cfg)?,
                at,
                order.as_deref(),
                cfg.format,
            )?)
        }
        Command::Equiv { a, b, ty, depth } => {
            let cfg = config(cli, Vec::new(), Vec::new(), *depth)?;
            let (json, same) = commands::cmd_equiv(&program(a, &cfg)?, &program(b, &cfg)?, ty.as_deref(), &cfg)?;
            Ok((json, same))
        }
        Command::Measure { file, kind, fuel_check } => {
            let cfg = plain()?;
            ok(commands::cmd_measure(
                &program(file, &cfg)?,
                (*kind).into(),
                *fuel_check,
                &cfg,
            )?)
        }
        Command::Selftest => {
            let outcomes = acceptance::run_all();
            let lines: Vec<String> = outcomes.iter().map(acceptance::Outcome::line).collect();
            Ok((lines.join("\n"), outcomes.iter().all(|o| o.passed)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok((text, success)) => {
            if !text.is_empty() {
                // A closed pipe is not an error.
                let _ = writeln!(std::io::stdout(), "{text}");
            }
            ExitCode::from(if success { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("fmc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
