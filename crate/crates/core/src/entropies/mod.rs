//! Entropies and divergences, all in bits.
//!
//! Unconditional quantities ([`von_neumann_entropy`], [`relative_entropy`], the
//! Rényi family) are closed forms on eigendecompositions. The conditional min-
//! and max-entropies are semidefinite programs; see [`h_min_cond`] and
//! [`h_max_cond`].

mod conditional;
mod divergence;
mod states;

use crate::linalg::{partial_trace, ComplexMatrix, DensityMatrix, Eigen, Subsystem};
use crate::Result;

pub use conditional::{
    h0_cond, h_max_cond, h_max_cond_bipartite, h_min_cond, h_min_cond_bipartite,
};
pub use divergence::{d_max, d_max_sdp, d_min, renyi_divergence};
pub use states::{ClassicalClassicalState, ClassicalQuantumState};

/// Mass of `ρ` outside the support of `σ` above which divergences are infinite.
pub const SUPPORT_VIOLATION_TOL: f64 = 1e-9;

/// Eigenvalues below `SUPPORT_REL_TOL · λ_max` count as zero when a support is needed.
const SUPPORT_REL_TOL: f64 = 1e-14;

/// `-Σ p log₂ p` over nonnegative weights, with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.log2())
        .sum::<f64>()
}

/// Binary entropy `h(p)`.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy(&[p, 1.0 - p])
}

/// `S(ρ) = −Tr ρ log₂ ρ`
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let values: Vec<f64> = rho.eigen().values.iter().map(|v| v.max(0.0)).collect();
    shannon_entropy(&values).max(0.0)
}

/// Orthonormal basis of the support and the corresponding eigenvalues.
pub(crate) fn support(eig: &Eigen) -> (Vec<f64>, ComplexMatrix) {
    let cut = SUPPORT_REL_TOL * eig.max_value().max(0.0);
    let keep: Vec<usize> = (0..eig.dim()).filter(|&k| eig.values[k] > cut).collect();
    let basis = ComplexMatrix::from_fn(eig.dim(), keep.len(), |i, j| eig.vectors[(i, keep[j])]);
    (keep.iter().map(|&k| eig.values[k]).collect(), basis)
}

pub(crate) fn support_of(rho: &DensityMatrix) -> (Vec<f64>, ComplexMatrix) {
    support(&rho.eigen())
}

/// `Tr ρ − Tr P ρ` with `P` the projector onto `span(basis)`.
pub(crate) fn mass_outside(rho: &ComplexMatrix, basis: &ComplexMatrix) -> f64 {
    let inside = (&basis.adjoint() * &(rho * basis)).trace().re;
    rho.trace().re - inside
}

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(crate::Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    Ok(())
}

/// `S(ρ‖σ) = Tr ρ log₂ ρ − Tr ρ log₂ σ`; `+∞` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let (values, basis) = support(&sigma.eigen());
    if mass_outside(rho.matrix(), &basis) > SUPPORT_VIOLATION_TOL {
        return Ok(f64::INFINITY);
    }
    let cross: f64 = values
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let u = basis.column(k);
            let weight: f64 = rho
                .matrix()
                .matvec(&u)
                .iter()
                .zip(&u)
                .map(|(a, b)| (b.conj() * a).re)
                .sum();
            weight * v.log2()
        })
        .sum();
    Ok((-von_neumann_entropy(rho) - cross).max(0.0))
}

/// `H(A|B) = S(ρ_AB) − S(ρ_B)`
pub fn conditional_entropy(rho_ab: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    let rho_b = partial_trace(rho_ab, dims, Subsystem::B)?;
    Ok(von_neumann_entropy(rho_ab) - von_neumann_entropy(&rho_b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random, C64};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket(d: usize, i: usize) -> DensityMatrix {
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[i] = C64::new(1.0, 0.0);
        DensityMatrix::pure(&v).unwrap()
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::maximally_coherent(2)
    }

    #[test]
    fn von_neumann_examples() {
        assert!(von_neumann_entropy(&plus()).abs() < 1e-12);
        for d in 2..6 {
            let s = von_neumann_entropy(&DensityMatrix::maximally_mixed(d));
            assert!((s - (d as f64).log2()).abs() < 1e-12);
        }
        // h(0.25) = −0.25 log₂ 0.25 − 0.75 log₂ 0.75
        let h = 0.5 + 0.75 * (4.0f64 / 3.0).log2();
        let s = von_neumann_entropy(&DensityMatrix::diagonal(&[0.75, 0.25]).unwrap());
        assert!((s - h).abs() < 1e-12);
        assert!((s - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn von_neumann_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for trial in 0..100 {
            let d = 2 + trial % 5;
            let s = von_neumann_entropy(&random::density_matrix(d, &mut rng));
            assert!(s >= 0.0 && s <= (d as f64).log2() + 1e-12);
        }
    }

    #[test]
    fn relative_entropy_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random::density_matrix(3, &mut rng);
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-10);
        let s = relative_entropy(&ket(2, 0), &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(
            relative_entropy(&plus(), &ket(2, 0)).unwrap(),
            f64::INFINITY
        );
        assert!(relative_entropy(&ket(2, 0), &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn conditional_entropy_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random::density_matrix(2, &mut rng);
        let b = random::density_matrix(3, &mut rng);
        let h = conditional_entropy(&a.tensor(&b), (2, 3)).unwrap();
        assert!((h - von_neumann_entropy(&a)).abs() < 1e-10);

        let bell = DensityMatrix::pure(&crate::linalg::maximally_entangled(2)).unwrap();
        assert!((conditional_entropy(&bell, (2, 2)).unwrap() + 1.0).abs() < 1e-10);

        let cq = DensityMatrix::maximally_mixed(2).tensor(&random::density_matrix(2, &mut rng));
        let h = conditional_entropy(&cq, (2, 2)).unwrap();
        assert!((h - 1.0).abs() < 1e-10);
        assert!(conditional_entropy(&bell, (3, 2)).is_err());
    }
}
