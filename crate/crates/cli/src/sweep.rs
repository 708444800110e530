//! Parameter sweeps over state families, tabulated for CSV output.

use std::io::Write;

use coherence_core::coherence::{report, BlochPoint, Measure, MeasureSet, ReportOptions};
use coherence_core::DensityMatrix;
use rayon::prelude::*;

use crate::format::format_value;
use crate::CliError;

/// Column order of measure values in every table.
pub const COLUMN_ORDER: [Measure; 6] = [
    Measure::Cmax,
    Measure::Cr,
    Measure::Cmin,
    Measure::Cg,
    Measure::Cf,
    Measure::C0,
];

/// Measures tabulated when none are requested.
pub fn default_measures() -> MeasureSet {
    MeasureSet::new([Measure::Cmax, Measure::Cr, Measure::Cmin, Measure::Cg])
}

/// One-parameter families `ν ρ₁ + (1 − ν) I/d`.
#[derive(Clone, Debug)]
pub enum Family {
    /// `ρ₁ = |+⟩⟨+|`, `d = 2`.
    PlusMix,
    /// `ρ₁ = (|+⟩⟨+|)^{⊗3}`, `d = 8`.
    Plus3Mix,
    /// `ρ₁` read from a state file.
    Custom(DensityMatrix),
}

impl Family {
    pub fn endpoint(&self) -> DensityMatrix {
        let plus = DensityMatrix::maximally_coherent(2);
        match self {
            Family::PlusMix => plus,
            Family::Plus3Mix => plus.tensor(&plus).tensor(&plus),
            Family::Custom(rho) => rho.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Family::PlusMix => 2,
            Family::Plus3Mix => 8,
            Family::Custom(rho) => rho.dim(),
        }
    }

    pub fn state(&self, nu: f64) -> Result<DensityMatrix, CliError> {
        if !(0.0..=1.0).contains(&nu) {
            return Err(CliError::Validation(format!("nu = {nu} outside [0, 1]")));
        }
        Ok(self
            .endpoint()
            .mix(&DensityMatrix::maximally_mixed(self.dim()), nu)?)
    }
}

/// Header plus numeric rows in a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format_value(*x)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String, CliError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Column name of `m`; search upper bounds get a `_ub` suffix.
pub fn column_name(m: Measure, dim: usize) -> String {
    if m.is_roof() && dim > 2 {
        format!("{}_ub", m.column())
    } else {
        m.column().to_string()
    }
}

fn ordered(measures: &MeasureSet) -> Vec<Measure> {
    COLUMN_ORDER
        .into_iter()
        .filter(|m| measures.contains(*m))
        .collect()
}

/// Evenly spaced points `k / (steps − 1)` of `[0, 1]`.
pub fn unit_grid(steps: usize) -> Result<Vec<f64>, CliError> {
    if steps < 2 {
        return Err(CliError::Validation(format!(
            "step count must be at least 2, got {steps}"
        )));
    }
    Ok((0..steps).map(|k| k as f64 / (steps - 1) as f64).collect())
}

fn measure_row(
    rho: &DensityMatrix,
    columns: &[Measure],
    measures: &MeasureSet,
    options: &ReportOptions,
) -> Result<Vec<f64>, CliError> {
    let rep = report(rho, measures, options)?;
    Ok(columns
        .iter()
        .map(|m| rep.get(*m).expect("requested measure is reported"))
        .collect())
}

/// Tabulates `measures` of `family` at `nu_steps` evenly spaced values of `ν`.
///
/// Rows are computed in parallel and returned in order of increasing `ν`.
pub fn sweep(
    family: &Family,
    nu_steps: usize,
    measures: &MeasureSet,
    options: &ReportOptions,
) -> Result<Table, CliError> {
    let grid = unit_grid(nu_steps)?;
    let columns = ordered(measures);
    let dim = family.dim();
    let mut header = vec!["nu".to_string()];
    header.extend(columns.iter().map(|m| column_name(*m, dim)));
    let rows = grid
        .par_iter()
        .map(|&nu| {
            let mut row = vec![nu];
            row.extend(measure_row(
                &family.state(nu)?,
                &columns,
                measures,
                options,
            )?);
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table { header, rows })
}

/// Tabulates `measures` of the qubit states `(I + n·σ)/2` with
/// `n = (γ sin βπ, 0, cos βπ)` on a `beta_steps × gamma_steps` grid.
pub fn bloch(
    beta_steps: usize,
    gamma_steps: usize,
    measures: &MeasureSet,
    options: &ReportOptions,
) -> Result<Table, CliError> {
    let betas = unit_grid(beta_steps)?;
    let gammas = unit_grid(gamma_steps)?;
    let columns = ordered(measures);
    let mut header = vec!["beta".to_string(), "gamma".to_string()];
    header.extend(columns.iter().map(|m| column_name(*m, 2)));
    let points: Vec<BlochPoint> = betas
        .iter()
        .flat_map(|&beta| gammas.iter().map(move |&gamma| BlochPoint { beta, gamma }))
        .collect();
    let rows = points
        .par_iter()
        .map(|p| {
            let mut row = vec![p.beta, p.gamma];
            row.extend(measure_row(&p.state()?, &columns, measures, options)?);
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_endpoints() {
        let rho = Family::Plus3Mix.state(1.0).unwrap();
        let coherent = DensityMatrix::maximally_coherent(8);
        assert!(rho.matrix().max_abs_diff(coherent.matrix()) < 1e-15);
        let mixed = Family::PlusMix.state(0.0).unwrap();
        assert!(mixed.is_diagonal(0.0));
        assert!(Family::PlusMix.state(1.5).is_err());
    }

    #[test]
    fn grid_and_columns() {
        assert_eq!(unit_grid(3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(unit_grid(1).is_err());
        assert_eq!(column_name(Measure::Cf, 2), "c_f");
        assert_eq!(column_name(Measure::Cf, 3), "c_f_ub");
        assert_eq!(column_name(Measure::Cmax, 8), "c_max");
    }
}
