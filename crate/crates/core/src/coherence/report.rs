//! Per-state record of the requested measures.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{c_g_from_c_min, c_max_routes, c_min_routes, c_r, roof};
use crate::linalg::DensityMatrix;
use crate::sdp::{SdpEstimate, SdpOptions};
use crate::{Error, Result};

/// Route disagreement above which a report is flagged.
pub const ROUTE_DISAGREEMENT_FLAG: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Measure {
    Cr,
    Cg,
    Cmin,
    Cmax,
    Cf,
    C0,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Cr,
        Measure::Cg,
        Measure::Cmin,
        Measure::Cmax,
        Measure::Cf,
        Measure::C0,
    ];

    /// Short name used on the command line.
    pub fn key(self) -> &'static str {
        match self {
            Measure::Cr => "cr",
            Measure::Cg => "cg",
            Measure::Cmin => "cmin",
            Measure::Cmax => "cmax",
            Measure::Cf => "cf",
            Measure::C0 => "c0",
        }
    }

    /// Name used for report fields and CSV columns.
    pub fn column(self) -> &'static str {
        match self {
            Measure::Cr => "c_r",
            Measure::Cg => "c_g",
            Measure::Cmin => "c_min",
            Measure::Cmax => "c_max",
            Measure::Cf => "c_f",
            Measure::C0 => "c_0",
        }
    }

    /// Whether the measure is only available as a search bound for `d > 2`.
    pub fn is_roof(self) -> bool {
        matches!(self, Measure::Cf | Measure::C0)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Measure::ALL
            .into_iter()
            .find(|m| m.key() == s || m.column() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown measure '{s}'")))
    }
}

/// Ordered set of measures without duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureSet(Vec<Measure>);

impl MeasureSet {
    pub fn new(measures: impl IntoIterator<Item = Measure>) -> Self {
        let mut v: Vec<Measure> = measures.into_iter().collect();
        v.sort();
        v.dedup();
        Self(v)
    }

    pub fn all() -> Self {
        Self::new(Measure::ALL)
    }

    pub fn contains(&self, m: Measure) -> bool {
        self.0.contains(&m)
    }

    pub fn iter(&self) -> impl Iterator<Item = Measure> + '_ {
        self.0.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for MeasureSet {
    type Err = Error;

    /// Comma-separated keys, e.g. `cr,cmin`.
    fn from_str(s: &str) -> Result<Self> {
        let set = Self::new(
            s.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(str::parse)
                .collect::<Result<Vec<_>>>()?,
        );
        if set.is_empty() {
            return Err(Error::InvalidArgument("no measures requested".into()));
        }
        Ok(set)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ReportOptions {
    pub sdp: SdpOptions,
    pub roof: roof::RoofOptions,
    /// Permit search upper bounds for `C_f` and `C_0` when `d > 2`.
    pub allow_heuristic: bool,
}

/// The two computations of `C_min` or `C_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteValues {
    pub direct: SdpEstimate,
    pub conditional: SdpEstimate,
}

impl RouteValues {
    /// Reported value; the conditional route.
    pub fn value(&self) -> f64 {
        self.conditional.value
    }

    pub fn disagreement(&self) -> f64 {
        (self.direct.value - self.conditional.value).abs()
    }
}

/// A convex-roof value without its decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoofValue {
    pub value: f64,
    pub exact: bool,
}

impl From<&roof::RoofEstimate> for RoofValue {
    fn from(e: &roof::RoofEstimate) -> Self {
        Self {
            value: e.value,
            exact: e.exact,
        }
    }
}

/// Requested measures of one state. Fields of measures not requested are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub dim: usize,
    pub c_r: Option<f64>,
    pub c_g: Option<f64>,
    pub c_min: Option<f64>,
    pub c_max: Option<f64>,
    pub c_f: Option<RoofValue>,
    pub c_0: Option<RoofValue>,
    /// Largest `|direct − conditional|` over the computed SDP measures.
    pub route_disagreement: f64,
    /// Set when `route_disagreement` exceeds [`ROUTE_DISAGREEMENT_FLAG`].
    pub flagged: bool,
    /// Both routes with their solve summaries, keyed by `c_min` / `c_max`.
    pub solver_diagnostics: BTreeMap<String, RouteValues>,
}

impl CoherenceReport {
    /// Value of `m` if it was computed.
    pub fn get(&self, m: Measure) -> Option<f64> {
        match m {
            Measure::Cr => self.c_r,
            Measure::Cg => self.c_g,
            Measure::Cmin => self.c_min,
            Measure::Cmax => self.c_max,
            Measure::Cf => self.c_f.map(|v| v.value),
            Measure::C0 => self.c_0.map(|v| v.value),
        }
    }

    /// Whether the value of `m` is exact rather than an upper bound.
    pub fn is_exact(&self, m: Measure) -> bool {
        match m {
            Measure::Cf => self.c_f.is_some_and(|v| v.exact),
            Measure::C0 => self.c_0.is_some_and(|v| v.exact),
            _ => true,
        }
    }
}

/// Computes the requested measures of `rho`.
///
/// `C_f` and `C_0` of states with `d > 2` are search upper bounds and are refused
/// unless `options.allow_heuristic` is set.
pub fn report(
    rho: &DensityMatrix,
    measures: &MeasureSet,
    options: &ReportOptions,
) -> Result<CoherenceReport> {
    let d = rho.dim();
    let wants_roof = measures.iter().any(Measure::is_roof);
    if wants_roof && d > 2 && !options.allow_heuristic {
        return Err(Error::InvalidArgument(format!(
            "c_f and c_0 are only upper bounds for d = {d} > 2; enable heuristic measures"
        )));
    }
    let mut diagnostics = BTreeMap::new();
    let min_routes = if measures.contains(Measure::Cmin) || measures.contains(Measure::Cg) {
        let r = c_min_routes(rho, &options.sdp)?;
        diagnostics.insert("c_min".to_string(), r);
        Some(r)
    } else {
        None
    };
    let max_routes = if measures.contains(Measure::Cmax) {
        let r = c_max_routes(rho, &options.sdp)?;
        diagnostics.insert("c_max".to_string(), r);
        Some(r)
    } else {
        None
    };
    let (c_f, c_0) = if !wants_roof {
        (None, None)
    } else if d == 2 {
        (
            Some(RoofValue::from(&roof::c_f(rho, &options.roof))),
            Some(RoofValue::from(&roof::c_0(rho, &options.roof))),
        )
    } else {
        let search = roof::convex_roof_search(rho, &options.roof);
        (
            Some(RoofValue::from(&search.c_f)),
            Some(RoofValue::from(&search.c_0)),
        )
    };
    let route_disagreement = diagnostics
        .values()
        .map(RouteValues::disagreement)
        .fold(0.0, f64::max);
    Ok(CoherenceReport {
        dim: d,
        c_r: measures.contains(Measure::Cr).then(|| c_r(rho)),
        c_g: measures
            .contains(Measure::Cg)
            .then(|| c_g_from_c_min(min_routes.expect("computed above").value())),
        c_min: measures
            .contains(Measure::Cmin)
            .then(|| min_routes.expect("computed above").value()),
        c_max: max_routes.map(|r| r.value()),
        c_f: c_f.filter(|_| measures.contains(Measure::Cf)),
        c_0: c_0.filter(|_| measures.contains(Measure::C0)),
        route_disagreement,
        flagged: route_disagreement > ROUTE_DISAGREEMENT_FLAG,
        solver_diagnostics: diagnostics,
    })
}
