//! Hermitian constraints as real symmetric ones.
//!
//! A Hermitian `H = A + iB` is positive semidefinite iff the real matrix
//! `[[A, -B], [B, A]]` is; the latter has the spectrum of `H` with every
//! multiplicity doubled.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::LmiBlock;
use crate::linalg::{ComplexMatrix, C64, HERMITIAN_TOL};
use crate::Result;

/// `[[Re h, -Im h], [Im h, Re h]]`
pub fn hermitian_embed(h: &ComplexMatrix) -> Result<DMatrix<f64>> {
    h.check_hermitian(HERMITIAN_TOL)?;
    let n = h.rows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
        }
    }
    Ok(out)
}

/// Builder for a complex Hermitian affine block `H0 + Σ_i y_i H_i ⪰ 0`.
///
/// Entries are inserted one at a time; callers add both `(i, j)` and `(j, i)`
/// so that every coefficient matrix ends up Hermitian. [`HermitianLmi::embed`]
/// checks this before producing the real block.
#[derive(Clone, Debug)]
pub struct HermitianLmi {
    dim: usize,
    constant: ComplexMatrix,
    terms: BTreeMap<usize, BTreeMap<(usize, usize), C64>>,
}

impl HermitianLmi {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            constant: ComplexMatrix::zeros(dim, dim),
            terms: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_constant(&mut self, i: usize, j: usize, z: C64) {
        self.constant[(i, j)] += z;
    }

    /// Adds `m` to the constant part at offset `(row0, col0)`.
    pub fn add_constant_matrix(&mut self, row0: usize, col0: usize, m: &ComplexMatrix) {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                self.constant[(row0 + i, col0 + j)] += m[(i, j)];
            }
        }
    }

    pub fn add_term(&mut self, var: usize, i: usize, j: usize, z: C64) {
        *self
            .terms
            .entry(var)
            .or_default()
            .entry((i, j))
            .or_insert(C64::new(0.0, 0.0)) += z;
    }

    /// Places `coeff · X` at rows `row_map(k)` / cols `row_map(l)` for a Hermitian variable `X`.
    pub fn add_variable(
        &mut self,
        x: &HermitianVariable,
        coeff: f64,
        mut index: impl FnMut(usize) -> usize,
    ) {
        for k in 0..x.dim() {
            for l in 0..x.dim() {
                let (i, j) = (index(k), index(l));
                for (var, z) in x.entry_terms(k, l) {
                    self.add_term(var, i, j, z * coeff);
                }
            }
        }
    }

    /// Real symmetric block of dimension `2 * dim`.
    pub fn embed(&self) -> Result<LmiBlock> {
        self.constant.check_hermitian(HERMITIAN_TOL)?;
        let n = self.dim;
        let mut block = LmiBlock::new(2 * n);
        let mut put = |var: Option<usize>, i: usize, j: usize, z: C64| {
            if z.re != 0.0 {
                block.add_raw(var, i, j, z.re);
                block.add_raw(var, i + n, j + n, z.re);
            }
            if z.im != 0.0 {
                block.add_raw(var, i, j + n, -z.im);
                block.add_raw(var, i + n, j, z.im);
            }
        };
        for i in 0..n {
            for j in 0..n {
                put(None, i, j, self.constant[(i, j)]);
            }
        }
        for (&var, entries) in &self.terms {
            for (&(i, j), &z) in entries {
                let mirror = entries.get(&(j, i)).copied().unwrap_or_default();
                let dev = (z - mirror.conj()).norm();
                if dev > HERMITIAN_TOL {
                    return Err(crate::Error::NonHermitian {
                        row: i,
                        col: j,
                        deviation: dev,
                    });
                }
                put(Some(var), i, j, z);
            }
        }
        Ok(block)
    }
}

/// A `dim x dim` complex Hermitian matrix variable occupying `dim²` consecutive
/// real decision variables starting at `offset`: the diagonal first, then a
/// (real, imaginary) pair for each entry above the diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HermitianVariable {
    offset: usize,
    dim: usize,
}

impl HermitianVariable {
    pub fn new(offset: usize, dim: usize) -> Self {
        Self { offset, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.dim * self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dim == 0
    }

    /// One past the last decision variable used.
    pub fn end(&self) -> usize {
        self.offset + self.len()
    }

    pub fn diagonal_var(&self, k: usize) -> usize {
        self.offset + k
    }

    fn pair_vars(&self, k: usize, l: usize) -> (usize, usize) {
        debug_assert!(k < l);
        // Row-major index of (k, l) among strictly-upper entries.
        let idx = k * (2 * self.dim - k - 1) / 2 + (l - k - 1);
        let base = self.offset + self.dim + 2 * idx;
        (base, base + 1)
    }

    /// Decision variables and complex weights making up entry `(k, l)`.
    pub fn entry_terms(&self, k: usize, l: usize) -> Vec<(usize, C64)> {
        use std::cmp::Ordering;
        match k.cmp(&l) {
            Ordering::Equal => vec![(self.diagonal_var(k), C64::new(1.0, 0.0))],
            Ordering::Less => {
                let (re, im) = self.pair_vars(k, l);
                vec![(re, C64::new(1.0, 0.0)), (im, C64::new(0.0, 1.0))]
            }
            Ordering::Greater => {
                let (re, im) = self.pair_vars(l, k);
                vec![(re, C64::new(1.0, 0.0)), (im, C64::new(0.0, -1.0))]
            }
        }
    }

    pub fn value(&self, y: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, self.dim, |k, l| {
            self.entry_terms(k, l)
                .into_iter()
                .map(|(var, z)| z * y[var])
                .sum()
        })
    }

    /// Writes the Hermitian part of `m` into `y`.
    pub fn assign(&self, y: &mut [f64], m: &ComplexMatrix) {
        for k in 0..self.dim {
            y[self.diagonal_var(k)] = m[(k, k)].re;
            for l in (k + 1)..self.dim {
                let (re, im) = self.pair_vars(k, l);
                let z = (m[(k, l)] + m[(l, k)].conj()) * 0.5;
                y[re] = z.re;
                y[im] = z.im;
            }
        }
    }

    pub fn assign_scaled_identity(&self, y: &mut [f64], s: f64) {
        self.assign(y, &ComplexMatrix::identity(self.dim).scale(s));
    }

    /// Adds the objective `weight · Tr X`.
    pub fn trace_objective(&self, problem: &mut super::SdpProblem, weight: f64) {
        for k in 0..self.dim {
            problem.set_objective(self.diagonal_var(k), weight);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_hermitian, pauli, random};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sorted_eigs(m: &DMatrix<f64>) -> Vec<f64> {
        let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    #[test]
    fn real_input_gives_block_diagonal_copy() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, -3.0]]);
        let e = hermitian_embed(&h).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(e[(i, j)], h[(i, j)].re);
                assert_eq!(e[(i + 2, j + 2)], h[(i, j)].re);
                assert_eq!(e[(i, j + 2)], 0.0);
                assert_eq!(e[(i + 2, j)], 0.0);
            }
        }
    }

    #[test]
    fn pauli_y_spectrum_doubles() {
        let e = hermitian_embed(&pauli::y()).unwrap();
        let eigs = sorted_eigs(&e);
        let expected = [1.0, 1.0, -1.0, -1.0];
        for (a, b) in eigs.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn random_spectrum_doubles() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let h = random::hermitian(3, &mut rng);
            let eigs = sorted_eigs(&hermitian_embed(&h).unwrap());
            let orig = eig_hermitian(&h).unwrap().values;
            for (k, v) in orig.iter().enumerate() {
                assert!((eigs[2 * k] - v).abs() <= 1e-10);
                assert!((eigs[2 * k + 1] - v).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn hermitian_variable_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = HermitianVariable::new(3, 4);
        let h = random::hermitian(4, &mut rng);
        let mut y = vec![0.0; x.end()];
        x.assign(&mut y, &h);
        assert!(x.value(&y).max_abs_diff(&h) < 1e-15);
        // All dim² slots are distinct.
        let mut seen = std::collections::BTreeSet::new();
        for k in 0..4 {
            for l in k..4 {
                for (v, _) in x.entry_terms(k, l) {
                    assert!(seen.insert(v));
                }
            }
        }
        assert_eq!(seen.len(), 16);
        assert_eq!(*seen.iter().next().unwrap(), 3);
    }

    #[test]
    fn embedded_lmi_matches_direct_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = HermitianVariable::new(0, 3);
        let c = random::hermitian(3, &mut rng);
        let mut lmi = HermitianLmi::new(3);
        lmi.add_constant_matrix(0, 0, &c.scale(-1.0));
        lmi.add_variable(&x, 1.0, |k| k);
        let block = lmi.embed().unwrap();
        let xv = random::hermitian(3, &mut rng);
        let mut y = vec![0.0; x.len()];
        x.assign(&mut y, &xv);
        let expected = hermitian_embed(&(&xv - &c)).unwrap();
        assert!((block.evaluate(&y) - expected).amax() < 1e-14);
    }
}
