use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coherence_cli::sweep::default_measures;
use coherence_cli::{bloch, compute, load_state, sweep, CliError, Family, OutputFormat, Table};
use coherence_core::coherence::{MeasureSet, ReportOptions, RoofOptions};
use coherence_core::sdp::SdpOptions;

#[derive(Parser)]
#[command(
    name = "cohere",
    version,
    about = "Coherence measures of quantum states"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Target SDP duality gap.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed of the convex-roof search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random restarts of the convex-roof search.
    #[arg(long, global = true, default_value_t = 64)]
    restarts: usize,
    /// Allow upper bounds for c_f and c_0 on states with d > 2.
    #[arg(long, global = true)]
    allow_heuristic: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    PlusMix,
    Plus3Mix,
    CustomFile,
}

#[derive(Subcommand)]
enum Command {
    /// Report the measures of one state.
    Compute {
        #[arg(long)]
        state: PathBuf,
        /// Comma-separated subset of cr,cg,cmin,cmax,cf,c0.
        #[arg(long, default_value = "cr,cg,cmin,cmax")]
        measures: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Tabulate the measures of ν ρ + (1 − ν) I/d over ν ∈ [0, 1].
    Sweep {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// State file of ρ for the custom-file family.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 101)]
        nu_steps: usize,
        #[arg(long)]
        measures: Option<String>,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the measures of qubits on a (β, γ) grid.
    Bloch {
        #[arg(long)]
        beta_steps: usize,
        #[arg(long)]
        gamma_steps: usize,
        #[arg(long)]
        measures: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_measures(list: Option<&str>) -> Result<MeasureSet, CliError> {
    match list {
        None => Ok(default_measures()),
        Some(s) => s
            .parse()
            .map_err(|e: coherence_core::Error| CliError::Parse(e.to_string())),
    }
}

fn emit(table: &Table, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            table.write_csv(file)
        }
        None => table.write_csv(std::io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(CliError::Validation(format!(
            "tolerance must be positive, got {}",
            g.tol
        )));
    }
    let options = ReportOptions {
        sdp: SdpOptions {
            tol: g.tol,
            ..SdpOptions::default()
        },
        roof: RoofOptions {
            restarts: g.restarts,
            seed: g.seed,
            ..RoofOptions::default()
        },
        allow_heuristic: g.allow_heuristic,
    };
    match &cli.command {
        Command::Compute {
            state,
            measures,
            format,
        } => {
            let rho = load_state(state)?;
            let measures = parse_measures(Some(measures))?;
            let (rep, text) = compute(&rho, &measures, *format, &options)?;
            println!("{text}");
            if rep.flagged {
                eprintln!(
                    "warning: computation routes disagree by {:e}",
                    rep.route_disagreement
                );
            }
            Ok(())
        }
        Command::Sweep {
            family,
            state,
            nu_steps,
            measures,
            out,
        } => {
            let family = match (family, state) {
                (FamilyArg::PlusMix, None) => Family::PlusMix,
                (FamilyArg::Plus3Mix, None) => Family::Plus3Mix,
                (FamilyArg::CustomFile, Some(path)) => Family::Custom(load_state(path)?),
                (FamilyArg::CustomFile, None) => {
                    return Err(CliError::Parse("custom-file family needs --state".into()))
                }
                (_, Some(_)) => {
                    return Err(CliError::Parse(
                        "--state is only used by the custom-file family".into(),
                    ))
                }
            };
            let measures = parse_measures(measures.as_deref())?;
            emit(
                &sweep(&family, *nu_steps, &measures, &options)?,
                out.as_ref(),
            )
        }
        Command::Bloch {
            beta_steps,
            gamma_steps,
            measures,
            out,
        } => {
            let measures = parse_measures(measures.as_deref())?;
            emit(
                &bloch(*beta_steps, *gamma_steps, &measures, &options)?,
                out.as_ref(),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
