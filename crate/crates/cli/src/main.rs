use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use orbit_rank::par::Strategy;
use orbit_rank::symrank::ExampleKind;
use orbit_rank::verify::{Mutant, VerifyConfig};
use orbit_rank_cli::commands::{self, CliError, TreeFormat, EXIT_VERIFY_FAILED};
use orbit_rank_cli::config;

#[derive(Parser)]
#[command(name = "orbit-rank", version, about = "Orbit-tree ranks of subgroup chains and the alpha-CLI rank calculus")]
struct Cli {
    /// TOML file with `max_group_order`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Evaluate everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    #[value(name = "G")]
    G,
    #[value(name = "H")]
    H,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutantArg {
    ProductSum,
}

#[derive(Subcommand)]
enum Command {
    /// rho^k table of a chain, or the classification of a group expression.
    Rank {
        file: PathBuf,
        name: String,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Orbit tree of the coset space G/G_k.
    Tree {
        file: PathBuf,
        name: String,
        #[arg(long)]
        k: usize,
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
    },
    /// Seeded property suite, or the chain checks on a spec file.
    Verify {
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Inject a known fault to confirm it is caught.
        #[arg(long, value_enum)]
        mutant: Option<MutantArg>,
    },
    /// Finite chain truncation of a group expression, written as a spec file.
    Truncate {
        file: PathBuf,
        name: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        breadth: usize,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// The hierarchy witnesses G_alpha and H_alpha.
    Examples {
        #[arg(long)]
        alpha: String,
        #[arg(long, value_enum, ignore_case = true)]
        kind: Option<Kind>,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let group_config = config::load(cli.config.as_deref()).map_err(CliError::Input)?;
    let strategy = if cli.sequential { Strategy::Sequential } else { Strategy::Parallel };
    let text = match cli.command {
        Command::Rank { file, name, alpha } => {
            let spec = commands::load_spec(&file, &group_config)?;
            let alpha = alpha.as_deref().map(commands::parse_ordinal).transpose()?;
            commands::cmd_rank(&spec, &name, alpha.as_ref(), strategy)?
        }
        Command::Tree { file, name, k, dot, .. } => {
            let spec = commands::load_spec(&file, &group_config)?;
            commands::cmd_tree(&spec, &name, k, if dot { TreeFormat::Dot } else { TreeFormat::Json })?
        }
        Command::Verify { file, seed, trials, mutant } => {
            let spec = file.map(|f| commands::load_spec(&f, &group_config)).transpose()?;
            let config = VerifyConfig {
                seed,
                trials,
                strategy,
                mutant: mutant.map(|MutantArg::ProductSum| Mutant::ProductSum),
                ..VerifyConfig::default()
            };
            let (text, passed) = commands::cmd_verify(spec.as_ref(), &config);
            print!("{text}");
            return Ok(if passed { 0 } else { EXIT_VERIFY_FAILED });
        }
        Command::Truncate { file, name, depth, breadth, out } => {
            let spec = commands::load_spec(&file, &group_config)?;
            let text = commands::cmd_truncate(&spec, &name, depth, breadth, &group_config)?;
            std::fs::write(&out, &text).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
            format!("wrote {}\n", out.display())
        }
        Command::Examples { alpha, kind } => {
            let alpha = commands::parse_ordinal(&alpha)?;
            let kind = kind.map(|k| match k {
                Kind::G => ExampleKind::G,
                Kind::H => ExampleKind::H,
            });
            commands::cmd_examples(&alpha, kind)?
        }
    };
    print!("{text}");
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CliError::EXIT_CODE)
        }
    }
}
