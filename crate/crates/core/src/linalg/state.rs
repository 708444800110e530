use serde::{Deserialize, Serialize};

use super::{eig_hermitian, kron, ComplexMatrix, Eigen, C64, HERMITIAN_TOL, PSD_CLIP_TOL};
use crate::{Error, Result};

const TRACE_TOL: f64 = 1e-10;
const STATE_PSD_TOL: f64 = 1e-10;
/// Eigenvalues at or below this are outside the support.
pub(crate) const SUPPORT_TOL: f64 = 1e-12;

/// A validated quantum state: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` and stores its exactly-Hermitian part.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if let Some(k) = matrix
            .as_slice()
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: k / matrix.cols(),
                col: k % matrix.cols(),
            });
        }
        matrix.check_hermitian(HERMITIAN_TOL)?;
        if matrix.rows() == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let matrix = matrix.hermitian_part();
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace { trace });
        }
        let min = eig_hermitian(&matrix)?.min_value();
        if min < -STATE_PSD_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self { matrix })
    }

    /// Skips validation; callers guarantee the invariants up to rounding.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    /// `|v><v|` for a vector normalized to unit length.
    pub fn pure(v: &[C64]) -> Result<Self> {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument(
                "zero or non-finite state vector".into(),
            ));
        }
        let v: Vec<C64> = v.iter().map(|z| z / norm).collect();
        Ok(Self::from_trusted(ComplexMatrix::outer(&v)))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(d).scale(1.0 / d as f64))
    }

    /// `|ψ_d> = d^{-1/2} Σ_i |i>`, the maximally coherent state.
    pub fn maximally_coherent(d: usize) -> Self {
        let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        Self::from_trusted(ComplexMatrix::from_fn(d, d, |_, _| amp * amp))
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diagonal(probs))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn diagonal_probabilities(&self) -> Vec<f64> {
        self.matrix
            .diag_real()
            .into_iter()
            .map(|p| p.max(0.0))
            .collect()
    }

    pub fn eigen(&self) -> Eigen {
        eig_hermitian(&self.matrix).expect("density matrix is Hermitian")
    }

    /// Number of eigenvalues above the support threshold.
    pub fn rank(&self) -> usize {
        self.eigen()
            .values
            .iter()
            .filter(|&&v| v > SUPPORT_TOL)
            .count()
    }

    /// `p self + (1 - p) other`
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "mixing weight {p} outside [0, 1]"
            )));
        }
        Ok(Self::from_trusted(
            &self.matrix.scale(p) + &other.matrix.scale(1.0 - p),
        ))
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Self {
        Self::from_trusted(kron(&self.matrix, &other.matrix))
    }

    /// `Σ_{i≠j} |ρ_ij|`
    pub fn off_diagonal_mass(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.matrix[(i, j)].norm())
            .sum()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.matrix[(i, j)].norm() <= tol))
    }

    /// `V ρ V^†` for an isometry `V`.
    pub fn apply_isometry(&self, v: &ComplexMatrix) -> Result<Self> {
        if v.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.cols(),
            });
        }
        check_isometry(v)?;
        Ok(Self::from_trusted(self.matrix.conjugate_by(v)))
    }
}

fn check_isometry(v: &ComplexMatrix) -> Result<()> {
    let dev = (&v.adjoint() * v).max_abs_diff(&ComplexMatrix::identity(v.cols()));
    if dev > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "operator is not an isometry (|V^†V - I| = {dev:e})"
        )));
    }
    Ok(())
}

/// Pure state `|ψ>_AE`, amplitudes indexed `a * dim_e + e`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurifiedState {
    pub dim_a: usize,
    pub dim_e: usize,
    pub amplitudes: Vec<C64>,
}

impl PurifiedState {
    pub fn new(dim_a: usize, dim_e: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != dim_a * dim_e {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_e,
                found: amplitudes.len(),
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "purification has squared norm {norm_sq}"
            )));
        }
        Ok(Self {
            dim_a,
            dim_e,
            amplitudes,
        })
    }

    pub fn amplitude(&self, a: usize, e: usize) -> C64 {
        self.amplitudes[a * self.dim_e + e]
    }

    /// `|ψ><ψ|` on `A ⊗ E`.
    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(ComplexMatrix::outer(&self.amplitudes))
    }

    /// `Tr_E |ψ><ψ|`
    pub fn reduced_a(&self) -> DensityMatrix {
        let (da, de) = (self.dim_a, self.dim_e);
        DensityMatrix::from_trusted(ComplexMatrix::from_fn(da, da, |a, b| {
            (0..de)
                .map(|e| self.amplitude(a, e) * self.amplitude(b, e).conj())
                .sum()
        }))
    }

    /// `Tr_A |ψ><ψ|`
    pub fn reduced_e(&self) -> DensityMatrix {
        let (da, de) = (self.dim_a, self.dim_e);
        DensityMatrix::from_trusted(ComplexMatrix::from_fn(de, de, |e, f| {
            (0..da)
                .map(|a| self.amplitude(a, e) * self.amplitude(a, f).conj())
                .sum()
        }))
    }

    /// `(I_A ⊗ W)|ψ>` for an isometry `W` from `E` into a `W.rows()`-dimensional system.
    pub fn apply_on_environment(&self, w: &ComplexMatrix) -> Result<Self> {
        if w.cols() != self.dim_e {
            return Err(Error::DimensionMismatch {
                expected: self.dim_e,
                found: w.cols(),
            });
        }
        check_isometry(w)?;
        let k = w.rows();
        let mut amplitudes = Vec::with_capacity(self.dim_a * k);
        for a in 0..self.dim_a {
            let row = &self.amplitudes[a * self.dim_e..(a + 1) * self.dim_e];
            amplitudes.extend(w.matvec(row));
        }
        Ok(Self {
            dim_a: self.dim_a,
            dim_e: k,
            amplitudes,
        })
    }

    /// Schmidt coefficients, descending.
    pub fn schmidt_coefficients(&self) -> Vec<f64> {
        self.reduced_a()
            .eigen()
            .values
            .into_iter()
            .map(|v| v.max(0.0).sqrt())
            .collect()
    }
}

/// Canonical purification `Σ_k √λ_k |u_k>_A |k>_E` with `dim_e = dim_a`.
pub fn purify(rho: &DensityMatrix) -> PurifiedState {
    let d = rho.dim();
    let eig = rho.eigen();
    let mut amplitudes = vec![C64::new(0.0, 0.0); d * d];
    for k in 0..d {
        let w = eig.values[k].max(0.0).sqrt();
        if w == 0.0 {
            continue;
        }
        for a in 0..d {
            amplitudes[a * d + k] = eig.vectors[(a, k)] * w;
        }
    }
    let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut amplitudes {
        *z /= norm;
    }
    PurifiedState {
        dim_a: d,
        dim_e: d,
        amplitudes,
    }
}

/// Which factor of a bipartite system survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if !m.is_square() || m.rows() != da * db {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            found: m.rows(),
        });
    }
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |a, c| {
            (0..db).map(|b| m[(a * db + b, c * db + b)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |b, c| {
            (0..da).map(|a| m[(a * db + b, a * db + c)]).sum()
        }),
    })
}

pub fn partial_trace(
    state: &DensityMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityMatrix> {
    partial_trace_matrix(state.matrix(), dims, keep).map(DensityMatrix::from_trusted)
}

fn clipped_eigen(m: &ComplexMatrix) -> Result<Eigen> {
    let mut eig = eig_hermitian(m)?;
    let min = eig.min_value();
    if min < -PSD_CLIP_TOL {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    for v in &mut eig.values {
        *v = v.max(0.0);
    }
    Ok(eig)
}

/// Principal square root of a PSD Hermitian matrix.
pub fn matrix_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(clipped_eigen(m)?.map(f64::sqrt))
}

/// `m^p` for PSD `m`. Negative powers act on the support only (pseudo-inverse convention).
pub fn matrix_power_psd(m: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    let eig = clipped_eigen(m)?;
    Ok(eig.map(|v| if v > SUPPORT_TOL { v.powf(p) } else { 0.0 }))
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`, evaluated as the squared trace norm of
/// `√ρ √σ` from its singular values so that rank-deficient inputs do not pick
/// up square roots of round-off.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let product = &support_sqrt(rho.matrix())? * &support_sqrt(sigma.matrix())?;
    let n = product.rows();
    let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| product[(i, j)]);
    let root_trace: f64 = dense.singular_values().iter().sum();
    Ok(root_trace * root_trace)
}

/// Square root that treats eigenvalues below `1e-14 λ_max` as exact zeros.
fn support_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = clipped_eigen(m)?;
    let cut = 1e-14 * eig.max_value();
    Ok(eig.map(|v| if v > cut { v.sqrt() } else { 0.0 }))
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.values.iter().map(|v| v.abs()).sum())
}

/// Bell-type test state `Σ_i |ii>/√d`.
#[cfg(test)]
pub(crate) fn maximally_entangled(d: usize) -> Vec<C64> {
    let basis = |i: usize| {
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[i] = C64::new(1.0, 0.0);
        v
    };
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for (o, x) in out.iter_mut().zip(super::kron_vec(&basis(i), &basis(i))) {
            *o += x / (d as f64).sqrt();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, random};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plus() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap()
    }

    fn ket(d: usize, i: usize) -> DensityMatrix {
        let mut p = vec![0.0; d];
        p[i] = 1.0;
        DensityMatrix::diagonal(&p).unwrap()
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::diagonal(&[0.5, 0.6])),
            Err(Error::InvalidTrace { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::diagonal(&[1.5, -0.5])),
            Err(Error::NotPsd { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]])),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn sqrt_examples() {
        let r = matrix_sqrt(&ComplexMatrix::diagonal(&[4.0, 9.0])).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::diagonal(&[2.0, 3.0])) < 1e-14);
        let id = ComplexMatrix::identity(3);
        assert!(matrix_sqrt(&id).unwrap().max_abs_diff(&id) < 1e-14);
        let p = plus();
        assert!(matrix_sqrt(p.matrix()).unwrap().max_abs_diff(p.matrix()) < 1e-12);
    }

    #[test]
    fn sqrt_clips_small_negative_but_rejects_large() {
        let tiny = ComplexMatrix::diagonal(&[1.0, -1e-9]);
        assert!(matrix_sqrt(&tiny).is_ok());
        let bad = ComplexMatrix::diagonal(&[1.0, -1e-6]);
        assert!(matches!(matrix_sqrt(&bad), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=8 {
            let rho = random::density_matrix_with_rank(d, 1 + d / 2, &mut rng);
            let r = matrix_sqrt(rho.matrix()).unwrap();
            assert!((&r * &r).max_abs_diff(rho.matrix()) <= 1e-9);
        }
    }

    #[test]
    fn fidelity_examples() {
        let p = plus();
        assert!((fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-10);
        assert!(fidelity(&ket(2, 0), &ket(2, 1)).unwrap().abs() < 1e-14);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((fidelity(&p, &mixed).unwrap() - 0.5).abs() < 1e-10);
        assert!(matches!(
            fidelity(&p, &DensityMatrix::maximally_mixed(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fidelity_bounds_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..200 {
            let d = 2 + trial % 4;
            let rho = random::density_matrix_with_rank(d, 1 + trial % d, &mut rng);
            let sigma = random::density_matrix(d, &mut rng);
            let f = fidelity(&rho, &sigma).unwrap();
            assert!((0.0..=1.0 + 1e-12).contains(&f));
            assert!((f - fidelity(&sigma, &rho).unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&pauli::z()).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(trace_norm(&ComplexMatrix::zeros(3, 3)).unwrap(), 0.0);
        assert!(
            (trace_norm(&ComplexMatrix::diagonal(&[0.5, -0.25])).unwrap() - 0.75).abs() < 1e-15
        );
    }

    #[test]
    fn partial_trace_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random::density_matrix(2, &mut rng);
        let e = random::density_matrix(3, &mut rng);
        let prod = a.tensor(&e);
        let back = partial_trace(&prod, (2, 3), Subsystem::A).unwrap();
        assert!(back.matrix().max_abs_diff(a.matrix()) < 1e-14);
        let back_e = partial_trace(&prod, (2, 3), Subsystem::B).unwrap();
        assert!(back_e.matrix().max_abs_diff(e.matrix()) < 1e-14);

        let bell = DensityMatrix::pure(&maximally_entangled(2)).unwrap();
        let reduced = partial_trace(&bell, (2, 2), Subsystem::A).unwrap();
        assert!(
            reduced
                .matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed(2).matrix())
                < 1e-14
        );

        assert!(matches!(
            partial_trace(&bell, (3, 2), Subsystem::A),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn purify_examples() {
        let psi = purify(&ket(2, 0));
        assert!((psi.amplitude(0, 0).norm() - 1.0).abs() < 1e-14);
        assert_eq!(psi.dim_e, 2);

        let psi = purify(&DensityMatrix::maximally_mixed(2));
        let sc = psi.schmidt_coefficients();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sc[0] - h).abs() < 1e-12 && (sc[1] - h).abs() < 1e-12);
        assert!(
            psi.reduced_e()
                .matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed(2).matrix())
                < 1e-12
        );

        let psi = purify(&DensityMatrix::diagonal(&[0.75, 0.25]).unwrap());
        let sc = psi.schmidt_coefficients();
        assert!((sc[0] - 0.75f64.sqrt()).abs() < 1e-12 && (sc[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn purification_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..200 {
            let d = 1 + trial % 8;
            let rho = random::density_matrix_with_rank(d, 1 + trial % d, &mut rng);
            let psi = purify(&rho);
            let back = partial_trace(&psi.density_matrix(), (d, d), Subsystem::A).unwrap();
            assert!(back.matrix().max_abs_diff(rho.matrix()) <= 1e-9);
            assert!(psi.reduced_a().matrix().max_abs_diff(rho.matrix()) <= 1e-9);
        }
    }

    #[test]
    fn environment_isometry_keeps_reduced_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random::density_matrix(3, &mut rng);
        let psi = purify(&rho);
        let w = random::isometry(5, 3, &mut rng);
        let moved = psi.apply_on_environment(&w).unwrap();
        assert_eq!(moved.dim_e, 5);
        assert!(moved.reduced_a().matrix().max_abs_diff(rho.matrix()) <= 1e-10);
    }
}
