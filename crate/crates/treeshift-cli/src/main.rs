//! `treeshift`: classify weighted shifts on directed trees and cross-check
//! the verdicts against a dense matrix oracle.
//!
//! Exit codes: 0 success, 2 unusable input, 3 numerical failure,
//! 4 oracle/classifier disagreement (or a failed named check).

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use treeshift::{Family, ScopeKind};
use treeshift_cli::run::{self, CliError, FamilyRequest, Input};
use treeshift_cli::spec_format::{export_dot, parse_number};
use treeshift_cli::report;

#[derive(Parser)]
#[command(
    name = "treeshift",
    version,
    about = "Classify weighted shift operators on directed trees, with an independent matrix oracle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the per-vertex classifier and print a report.
    Classify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Re-derive the verdicts from a dense matrix model and compare.
    Oracle {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Spectral map φ for the transported conditions (`id` or `q:VALUE`).
        #[arg(long)]
        phi: Option<String>,
        /// Spectral map ψ for the transported conditions (`id` or `q:VALUE`).
        #[arg(long)]
        psi: Option<String>,
        /// Oracle sampling seed; reports are byte-deterministic per input and seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run a named built-in check instead of an input (available: izonp).
        #[arg(long)]
        check: Option<String>,
    },
    /// Print the tree as a DOT digraph.
    Dot {
        #[command(flatten)]
        input: InputArgs,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Tree-spec file (`root`/`edge`/`norm` lines); see the README.
    file: Option<PathBuf>,
    /// Generator family: eunb, fig1, fig2, fig3, or path.
    #[arg(long)]
    family: Option<String>,
    /// Truncation depth for --family (default 4).
    #[arg(long)]
    depth: Option<usize>,
    /// Ratio parameter for fig1/fig2/fig3, as integer, `p/q`, or decimal.
    #[arg(long)]
    c: Option<String>,
    /// Weight parameter: fig1 tooth weight, fig3 branch weight, path ratio.
    #[arg(long)]
    q: Option<String>,
}

#[derive(Args)]
struct OutputArgs {
    /// Verdict scope.
    #[arg(long, value_enum, default_value_t = ScopeArg::Interior)]
    scope: ScopeArg,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Copy, Clone, ValueEnum)]
enum ScopeArg {
    Interior,
    Full,
}

impl From<ScopeArg> for ScopeKind {
    fn from(s: ScopeArg) -> ScopeKind {
        match s {
            ScopeArg::Interior => ScopeKind::Interior,
            ScopeArg::Full => ScopeKind::Full,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

fn resolve_input(a: &InputArgs) -> Result<Input, CliError> {
    let scalar_flag = |name: &str, token: &Option<String>| -> Result<Option<treeshift::Scalar>, CliError> {
        match token {
            None => Ok(None),
            Some(t) => parse_number(t)
                .map(Some)
                .ok_or_else(|| CliError::Usage(format!("malformed number `{t}` for --{name}"))),
        }
    };
    match (&a.file, &a.family) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give a tree-spec file or --family, not both".to_string(),
        )),
        (Some(f), None) => {
            for (flag, given) in [
                ("depth", a.depth.is_some()),
                ("c", a.c.is_some()),
                ("q", a.q.is_some()),
            ] {
                if given {
                    return Err(CliError::Usage(format!(
                        "--{flag} only applies to --family inputs"
                    )));
                }
            }
            Ok(Input::File(f.clone()))
        }
        (None, Some(token)) => {
            let family = Family::from_str(token)?;
            Ok(Input::Family(FamilyRequest {
                family,
                depth: a.depth.unwrap_or(4),
                c: scalar_flag("c", &a.c)?,
                q: scalar_flag("q", &a.q)?,
            }))
        }
        (None, None) => Err(CliError::Usage(
            "no input: give a tree-spec file or --family".to_string(),
        )),
    }
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Classify { input, out } => {
            let doc = run::classify_report(&resolve_input(&input)?, out.scope.into())?;
            print!(
                "{}",
                match out.format {
                    FormatArg::Json => report::to_json(&doc),
                    FormatArg::Text => report::classify_text(&doc),
                }
            );
            Ok(0)
        }
        Command::Oracle {
            input,
            out,
            phi,
            psi,
            seed,
            check,
        } => {
            if let Some(name) = check {
                if input.file.is_some() || input.family.is_some() {
                    return Err(CliError::Usage(
                        "--check runs standalone; drop the file/--family input".to_string(),
                    ));
                }
                let doc = run::named_check(&name, seed)?;
                print!(
                    "{}",
                    match out.format {
                        FormatArg::Json => report::to_json(&doc),
                        FormatArg::Text => report::check_text(&doc),
                    }
                );
                return Ok(if doc.holds { 0 } else { 4 });
            }
            let maps = match (phi, psi) {
                (None, None) => None,
                (Some(a), Some(b)) => Some((a, b)),
                _ => {
                    return Err(CliError::Usage(
                        "--phi and --psi go together".to_string(),
                    ))
                }
            };
            let outcome =
                run::oracle_report(&resolve_input(&input)?, out.scope.into(), maps, seed)?;
            print!(
                "{}",
                match out.format {
                    FormatArg::Json => report::to_json(&outcome.doc),
                    FormatArg::Text => report::oracle_text(&outcome.doc),
                }
            );
            Ok(if outcome.disagreement { 4 } else { 0 })
        }
        Command::Dot { input } => {
            let (s, _) = run::build_shift(&resolve_input(&input)?)?;
            print!("{}", export_dot(&s));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
