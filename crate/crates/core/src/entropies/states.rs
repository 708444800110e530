//! Classical-quantum and classical-classical bipartite states.

use serde::{Deserialize, Serialize};

use crate::linalg::{ComplexMatrix, DensityMatrix, PurifiedState};
use crate::{Error, Result};

const PROB_TOL: f64 = 1e-10;

fn check_distribution(p: &[f64]) -> Result<()> {
    if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < -PROB_TOL) {
        return Err(Error::InvalidArgument(format!("invalid probability {bad}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidTrace { trace: total });
    }
    Ok(())
}

/// `Σ_i p_i |i⟩⟨i|_X ⊗ ρ_E^i`
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalQuantumState {
    probs: Vec<f64>,
    conditional_states: Vec<DensityMatrix>,
}

impl ClassicalQuantumState {
    pub fn new(probs: Vec<f64>, conditional_states: Vec<DensityMatrix>) -> Result<Self> {
        if probs.is_empty() || probs.len() != conditional_states.len() {
            return Err(Error::DimensionMismatch {
                expected: probs.len(),
                found: conditional_states.len(),
            });
        }
        check_distribution(&probs)?;
        let de = conditional_states[0].dim();
        if let Some(s) = conditional_states.iter().find(|s| s.dim() != de) {
            return Err(Error::DimensionMismatch {
                expected: de,
                found: s.dim(),
            });
        }
        let probs = probs.into_iter().map(|p| p.max(0.0)).collect();
        Ok(Self {
            probs,
            conditional_states,
        })
    }

    /// Measures `A` of `|ψ⟩_AE` in the computational basis and keeps the outcome
    /// in a classical register. Outcomes of probability zero get the maximally
    /// mixed state as a placeholder.
    pub fn from_purification(psi: &PurifiedState) -> Self {
        let de = psi.dim_e;
        let mut probs = Vec::with_capacity(psi.dim_a);
        let mut states = Vec::with_capacity(psi.dim_a);
        for a in 0..psi.dim_a {
            let branch: Vec<_> = (0..de).map(|e| psi.amplitude(a, e)).collect();
            let p: f64 = branch.iter().map(|z| z.norm_sqr()).sum();
            probs.push(p);
            if p > 0.0 {
                let m = ComplexMatrix::outer(&branch).scale(1.0 / p);
                states.push(DensityMatrix::from_trusted(m.hermitian_part()));
            } else {
                states.push(DensityMatrix::maximally_mixed(de));
            }
        }
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        Self {
            probs,
            conditional_states: states,
        }
    }

    pub fn num_outcomes(&self) -> usize {
        self.probs.len()
    }

    pub fn dim_e(&self) -> usize {
        self.conditional_states[0].dim()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn conditional_states(&self) -> &[DensityMatrix] {
        &self.conditional_states
    }

    /// Block-diagonal matrix on `X ⊗ E`, indexed `x · d_E + e`.
    pub fn to_density_matrix(&self) -> DensityMatrix {
        let de = self.dim_e();
        let n = self.num_outcomes() * de;
        let mut m = ComplexMatrix::zeros(n, n);
        for (x, (p, s)) in self.probs.iter().zip(&self.conditional_states).enumerate() {
            for i in 0..de {
                for j in 0..de {
                    m[(x * de + i, x * de + j)] = s.get(i, j) * *p;
                }
            }
        }
        DensityMatrix::from_trusted(m)
    }
}

/// Joint distribution `q_ij` of two classical registers (rows `X_A`, columns `X_E`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalClassicalState {
    joint: Vec<Vec<f64>>,
}

impl ClassicalClassicalState {
    pub fn new(joint: Vec<Vec<f64>>) -> Result<Self> {
        let cols = joint.first().map_or(0, Vec::len);
        if cols == 0 {
            return Err(Error::InvalidArgument("empty joint distribution".into()));
        }
        if let Some(r) = joint.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: r.len(),
            });
        }
        let flat: Vec<f64> = joint.iter().flatten().copied().collect();
        check_distribution(&flat)?;
        let joint = joint
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.max(0.0)).collect())
            .collect();
        Ok(Self { joint })
    }

    pub fn num_a(&self) -> usize {
        self.joint.len()
    }

    pub fn num_e(&self) -> usize {
        self.joint[0].len()
    }

    pub fn joint(&self) -> &[Vec<f64>] {
        &self.joint
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.joint.iter().map(|r| r[j]).collect()
    }

    /// `H(X_A|X_E) = H(X_A X_E) − H(X_E)`
    pub fn conditional_entropy(&self) -> f64 {
        let flat: Vec<f64> = self.joint.iter().flatten().copied().collect();
        let marginal: Vec<f64> = (0..self.num_e())
            .map(|j| self.column(j).iter().sum())
            .collect();
        super::shannon_entropy(&flat) - super::shannon_entropy(&marginal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{purify, random};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validation() {
        let s = DensityMatrix::maximally_mixed(2);
        assert!(ClassicalQuantumState::new(vec![0.5, 0.6], vec![s.clone(), s.clone()]).is_err());
        assert!(ClassicalQuantumState::new(vec![1.0], vec![s.clone(), s.clone()]).is_err());
        assert!(ClassicalQuantumState::new(
            vec![0.5, 0.5],
            vec![s.clone(), DensityMatrix::maximally_mixed(3)]
        )
        .is_err());
        assert!(ClassicalClassicalState::new(vec![vec![0.5, 0.5], vec![0.1]]).is_err());
        assert!(ClassicalClassicalState::new(vec![vec![0.5, 0.6]]).is_err());
    }

    #[test]
    fn from_purification_recovers_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random::density_matrix(3, &mut rng);
        let cq = ClassicalQuantumState::from_purification(&purify(&rho));
        for (p, q) in cq.probs().iter().zip(rho.diagonal_probabilities()) {
            assert!((p - q).abs() < 1e-12);
        }
        for s in cq.conditional_states() {
            assert!((s.matrix().trace().re - 1.0).abs() < 1e-12);
            assert_eq!(s.rank(), 1);
        }
        let m = cq.to_density_matrix();
        assert_eq!(m.dim(), 9);
        assert!((m.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classical_conditional_entropy() {
        let cc = ClassicalClassicalState::new(vec![vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        assert!((cc.conditional_entropy() - 1.0).abs() < 1e-12);
        let cc = ClassicalClassicalState::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert!(cc.conditional_entropy().abs() < 1e-12);
    }
}
