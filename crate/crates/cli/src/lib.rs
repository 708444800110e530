//! Command-line front end for the coherence measures: state-file ingestion,
//! single-state reports and parameter sweeps written as CSV.

mod error;
pub mod format;
pub mod state_file;
pub mod sweep;

use coherence_core::coherence::{report, CoherenceReport, Measure, MeasureSet, ReportOptions};
use coherence_core::DensityMatrix;

pub use error::CliError;
pub use state_file::{load_state, StateFile};
pub use sweep::{bloch, sweep, Family, Table};

use format::format_value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
}

/// Computes a report for one state and renders it.
pub fn compute(
    rho: &DensityMatrix,
    measures: &MeasureSet,
    format: OutputFormat,
    options: &ReportOptions,
) -> Result<(CoherenceReport, String), CliError> {
    let rep = report(rho, measures, options)?;
    let text = match format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(&rep).map_err(|e| CliError::Io(e.to_string()))?
        }
        OutputFormat::Table => render_table(&rep, measures),
    };
    Ok((rep, text))
}

fn render_table(rep: &CoherenceReport, measures: &MeasureSet) -> String {
    let mut lines = vec![format!("{:<20}{:<18}note", "measure", "value")];
    for m in Measure::ALL.into_iter().filter(|m| measures.contains(*m)) {
        let value = rep.get(m).expect("requested measure is reported");
        let note = if rep.is_exact(m) { "" } else { "upper bound" };
        lines.push(
            format!("{:<20}{:<18}{note}", m.column(), format_value(value))
                .trim_end()
                .to_string(),
        );
    }
    if !rep.solver_diagnostics.is_empty() {
        let flag = if rep.flagged { "routes disagree" } else { "" };
        lines.push(
            format!(
                "{:<20}{:<18}{flag}",
                "route_disagreement",
                format_value(rep.route_disagreement)
            )
            .trim_end()
            .to_string(),
        );
    }
    lines.join("\n")
}
