use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use monster_cli::commands::{self, AutAction, CliError, Outcome};
use monster_cli::config::{Config, Overrides, CONFIG_ENV};

/// Exact computations with the monster Lie algebra and its completed group.
///
/// Reports are JSON on stdout (or --output). Exit status: 0 when every check
/// passes, 1 when a check fails, 2 on usage or configuration errors.
#[derive(Debug, Parser)]
#[command(name = "monster", version)]
struct Cli {
    /// Flat TOML config file (N, K<j>, samples, suite, output, threads).
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Degree bound N.
    #[arg(long = "n", short = 'N', global = true)]
    n: Option<i64>,
    /// Caps per level, as `1=2,2=1,3=1`.
    #[arg(long, global = true)]
    caps: Option<String>,
    /// Parameter samples, as `1,-1,2,1/2`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    samples: Option<String>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Coefficients c(-1)..c(nmax) of j - 744.
    Jcoef {
        #[arg(long, default_value_t = 15)]
        nmax: i64,
    },
    /// Root-space and degree dimensions of the positive part up to a degree.
    Dims {
        #[arg(long)]
        degree: i64,
        /// Use the true multiplicities c(j) instead of the caps.
        #[arg(long)]
        symbolic: bool,
    },
    /// Evaluate a bracket expression such as `[e(-1),e(0,1,1)]`.
    Bracket {
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
    },
    /// Realize group words and act with them.
    Aut {
        #[command(subcommand)]
        action: AutCmd,
    },
    /// Validate the relation catalog.
    Relcheck {
        /// adjoint, sl2, shadow or all.
        #[arg(long)]
        suite: Option<String>,
        /// Exported catalog to compare with the built-in one first.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Automorphism permuting the generators of one level.
    Permaut {
        #[arg(long)]
        level: u32,
        /// Cycle notation, e.g. `(1 2)(3 4 5)`.
        #[arg(long)]
        cycles: String,
        /// Check the defining relations under the permutation.
        #[arg(long)]
        verify: bool,
    },
    /// Check the printed group order and c(15) factorizations.
    Numerology,
    /// Export the relation catalog.
    Catalog,
}

#[derive(Debug, Subcommand)]
enum AutCmd {
    Images { word: String },
    Apply {
        word: String,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    Compose { left: String, right: String },
    Log { word: String },
    Level { word: String },
    Approx {
        word: String,
        #[arg(long)]
        level: i64,
    },
}

fn run(cli: &Cli) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let ov = Overrides {
        n: cli.n,
        caps: cli.caps.clone(),
        samples: cli.samples.clone(),
        output: cli.output.clone(),
        threads: cli.threads,
    };
    let load = || Config::load(cli.config.as_deref(), None, &ov);
    let mut out = cli.output.clone();
    let outcome = match &cli.cmd {
        Cmd::Jcoef { nmax } => commands::jcoef(*nmax)?,
        Cmd::Numerology => commands::numerology()?,
        Cmd::Catalog => commands::catalog(),
        cmd => {
            let mut cfg = load()?;
            out = cfg.output.clone();
            match cmd {
                Cmd::Dims { degree, symbolic } => commands::dims(&cfg, *degree, *symbolic)?,
                Cmd::Bracket { expr } => commands::bracket(&cfg, expr)?,
                Cmd::Aut { action } => {
                    let a = match action {
                        AutCmd::Images { word } => AutAction::Images { word: word.clone() },
                        AutCmd::Apply { word, expr } => AutAction::Apply { word: word.clone(), expr: expr.clone() },
                        AutCmd::Compose { left, right } => AutAction::Compose { left: left.clone(), right: right.clone() },
                        AutCmd::Log { word } => AutAction::Log { word: word.clone() },
                        AutCmd::Level { word } => AutAction::Level { word: word.clone() },
                        AutCmd::Approx { word, level } => AutAction::Approx { word: word.clone(), level: *level },
                    };
                    commands::aut(&cfg, &a)?
                }
                Cmd::Relcheck { suite, catalog } => {
                    if let Some(p) = catalog {
                        let text = std::fs::read_to_string(p)
                            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
                        commands::check_catalog(&text)?;
                    }
                    if let Some(s) = suite {
                        cfg.suite = s.clone();
                        cfg.validate()?;
                    }
                    commands::relcheck(&cfg)?
                }
                Cmd::Permaut { level, cycles, verify } => commands::permaut(&cfg, *level, cycles, *verify)?,
                Cmd::Jcoef { .. } | Cmd::Numerology | Cmd::Catalog => unreachable!(),
            }
        }
    };
    Ok((outcome, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((o, out)) => {
            let text = serde_json::to_string_pretty(&o.report).expect("reports serialize") + "\n";
            match out {
                Some(p) => {
                    if let Err(e) = std::fs::write(&p, text) {
                        eprintln!("error: cannot write {}: {e}", p.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(if o.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
