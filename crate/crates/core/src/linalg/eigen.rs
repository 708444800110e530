//! Cyclic Jacobi eigensolver for Hermitian matrices.

use super::{ComplexMatrix, C64, HERMITIAN_TOL};
use crate::Result;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `m = U diag(values) U^†` with eigenvalues sorted descending.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `U f(Λ) U^†`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let u = &self.vectors;
        let fvals: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .filter(|&k| fvals[k] != 0.0)
                .map(|k| u[(i, k)] * u[(j, k)].conj() * fvals[k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|v| v)
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Eigen> {
    m.check_hermitian(HERMITIAN_TOL)?;
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum();
            if off.sqrt() <= 1e-16 * scale {
                break;
            }
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    rotated |= rotate(&mut a, &mut v, p, q);
                }
            }
            if !rotated {
                break;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]));
    let values = order.iter().map(|&k| diag[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(Eigen { values, vectors })
}

/// One Jacobi rotation annihilating `a[p][q]`.
///
/// The unitary is `D R` where `D` rotates the phase of column `q` so the pivot
/// becomes real and `R` is the classical real rotation.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) -> bool {
    let g = a[(p, q)];
    let g_abs = g.norm();
    if g_abs == 0.0 {
        return false;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip pivots that are negligible against the diagonal.
    if g_abs < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return false;
    }
    let phase = g / g_abs;
    let theta = (aqq - app) / (2.0 * g_abs);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U restricted to columns (p, q).
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    let n = a.rows();
    // A <- A U
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * u_pp + aiq * u_qp;
        a[(i, q)] = aip * u_pq + aiq * u_qq;
    }
    // A <- U^† A
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = u_pp.conj() * apj + u_qp.conj() * aqj;
        a[(q, j)] = u_pq.conj() * apj + u_qq.conj() * aqj;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // V <- V U
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * u_pp + viq * u_qp;
        v[(i, q)] = vip * u_pq + viq * u_qq;
    }
    true
}
