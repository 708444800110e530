//! Small dense semidefinite programs in linear-matrix-inequality form.
//!
//! A problem is
//!
//! ```text
//! minimize    c·y
//! subject to  F_k(y) = F_k0 + Σ_i y_i F_ki ⪰ 0     for every block k
//!             a_j·y = b_j                          for every equality j
//! ```
//!
//! over a real decision vector `y`. Complex Hermitian constraints enter through
//! [`HermitianLmi`], which embeds them as real symmetric blocks of twice the
//! dimension. Equalities are eliminated before the interior-point iterations.

mod embed;
mod solver;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use embed::{hermitian_embed, HermitianLmi, HermitianVariable};
pub use solver::solve;

/// One symmetric affine block `F0 + Σ_i y_i F_i ⪰ 0`.
#[derive(Clone, Debug)]
pub struct LmiBlock {
    dim: usize,
    constant: DMatrix<f64>,
    terms: BTreeMap<usize, BTreeMap<(usize, usize), f64>>,
}

impl LmiBlock {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            constant: DMatrix::zeros(dim, dim),
            terms: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds `v` at `(i, j)` and, off the diagonal, at `(j, i)`.
    pub fn add_constant(&mut self, i: usize, j: usize, v: f64) {
        self.constant[(i, j)] += v;
        if i != j {
            self.constant[(j, i)] += v;
        }
    }

    /// Adds `v y_var` at `(i, j)` and, off the diagonal, at `(j, i)`.
    pub fn add_coefficient(&mut self, var: usize, i: usize, j: usize, v: f64) {
        let entries = self.terms.entry(var).or_default();
        *entries.entry((i, j)).or_insert(0.0) += v;
        if i != j {
            *entries.entry((j, i)).or_insert(0.0) += v;
        }
    }

    /// Adds a single (possibly asymmetric) entry; used by the Hermitian embedding,
    /// which inserts both halves itself.
    pub(crate) fn add_raw(&mut self, var: Option<usize>, i: usize, j: usize, v: f64) {
        match var {
            None => self.constant[(i, j)] += v,
            Some(var) => {
                *self
                    .terms
                    .entry(var)
                    .or_default()
                    .entry((i, j))
                    .or_insert(0.0) += v
            }
        }
    }

    pub fn constant(&self) -> &DMatrix<f64> {
        &self.constant
    }

    /// `F0 + Σ_i y_i F_i`
    pub fn evaluate(&self, y: &[f64]) -> DMatrix<f64> {
        let mut m = self.constant.clone();
        for (&var, entries) in &self.terms {
            let yv = y[var];
            if yv == 0.0 {
                continue;
            }
            for (&(i, j), &v) in entries {
                m[(i, j)] += yv * v;
            }
        }
        m
    }

    pub(crate) fn variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.keys().copied()
    }

    pub(crate) fn terms(&self) -> &BTreeMap<usize, BTreeMap<(usize, usize), f64>> {
        &self.terms
    }

    /// Largest asymmetry over the constant and all coefficient matrices.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = (&self.constant - self.constant.transpose()).amax();
        for entries in self.terms.values() {
            for (&(i, j), &v) in entries {
                let mirror = entries.get(&(j, i)).copied().unwrap_or(0.0);
                worst = worst.max((v - mirror).abs());
            }
        }
        worst
    }
}

/// Linear equality `Σ coeff·y = rhs`.
#[derive(Clone, Debug)]
pub struct LinearEquality {
    pub coefficients: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    decision_dim: usize,
    objective: Vec<f64>,
    blocks: Vec<LmiBlock>,
    equalities: Vec<LinearEquality>,
    start: Option<Vec<f64>>,
}

impl SdpProblem {
    pub fn new(decision_dim: usize) -> Self {
        Self {
            decision_dim,
            objective: vec![0.0; decision_dim],
            blocks: Vec::new(),
            equalities: Vec::new(),
            start: None,
        }
    }

    pub fn decision_dim(&self) -> usize {
        self.decision_dim
    }

    /// Sets the objective coefficient of `var` (the problem is a minimization).
    pub fn set_objective(&mut self, var: usize, c: f64) {
        self.objective[var] = c;
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn add_block(&mut self, block: LmiBlock) {
        self.blocks.push(block);
    }

    pub fn blocks(&self) -> &[LmiBlock] {
        &self.blocks
    }

    pub fn add_equality(&mut self, coefficients: Vec<(usize, f64)>, rhs: f64) {
        self.equalities.push(LinearEquality { coefficients, rhs });
    }

    pub fn equalities(&self) -> &[LinearEquality] {
        &self.equalities
    }

    /// A strictly feasible point supplied by the problem generator.
    pub fn set_start(&mut self, y: Vec<f64>) {
        self.start = Some(y);
    }

    pub fn start(&self) -> Option<&[f64]> {
        self.start.as_deref()
    }

    pub fn objective_value(&self, y: &[f64]) -> f64 {
        self.objective.iter().zip(y).map(|(c, y)| c * y).sum()
    }

    /// Smallest eigenvalue over all blocks at `y`.
    pub fn min_eigenvalue_at(&self, y: &[f64]) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let m = b.evaluate(y);
                m.symmetric_eigenvalues().min()
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        for block in &self.blocks {
            if block.constant.nrows() != block.dim {
                return Err(Error::DimensionMismatch {
                    expected: block.dim,
                    found: block.constant.nrows(),
                });
            }
            if let Some(var) = block.variables().find(|&v| v >= self.decision_dim) {
                return Err(Error::InvalidArgument(format!(
                    "block references variable {var} beyond decision dimension {}",
                    self.decision_dim
                )));
            }
            let asym = block.asymmetry();
            if asym > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "constraint matrix asymmetric by {asym:e}"
                )));
            }
        }
        if let Some(start) = &self.start {
            if start.len() != self.decision_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.decision_dim,
                    found: start.len(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SdpOptions {
    /// Target duality gap.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    MaxIterations,
    NumericalFailure,
}

/// Primal/dual objective values and infeasibilities at one iterate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IterateRecord {
    pub primal: f64,
    pub dual: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub optimal_value: f64,
    pub dual_value: f64,
    pub decision: Vec<f64>,
    pub duality_gap: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub history: Vec<IterateRecord>,
}

impl SdpSolution {
    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            status: self.status,
            optimal_value: self.optimal_value,
            duality_gap: self.duality_gap,
            iterations: self.iterations,
        }
    }

    /// Converts anything short of `Optimal` into [`Error::Solver`].
    pub fn require_optimal(self, context: &'static str) -> Result<Self> {
        if self.status == SolveStatus::Optimal {
            Ok(self)
        } else {
            Err(Error::Solver {
                context,
                status: self.status,
                iterations: self.iterations,
                gap: self.duality_gap,
            })
        }
    }
}

/// Compact diagnostic record of one solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub status: SolveStatus,
    pub optimal_value: f64,
    pub duality_gap: f64,
    pub iterations: usize,
}

/// Value of a quantity obtained from an SDP together with the solve diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpEstimate {
    pub value: f64,
    pub solve: SolveSummary,
}
