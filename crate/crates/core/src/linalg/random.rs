//! Random matrices and states for tests, property checks and heuristic restarts.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{ComplexMatrix, DensityMatrix, C64};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Complex Ginibre matrix with i.i.d. standard normal real and imaginary parts.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(d, d, rng).hermitian_part()
}

/// Haar-random `rows x cols` isometry (`rows >= cols`) via Gram-Schmidt on a Ginibre matrix.
pub fn isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = ginibre(rows, cols, rng);
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = g.column(j);
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for u in &q {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        q.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i])
}

pub fn unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    isometry(d, d, rng)
}

/// Normalized Haar-random pure state.
pub fn pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Random mixed state `G G^† / Tr(G G^†)` with `G` a `d x rank` Ginibre matrix.
pub fn density_matrix_with_rank<R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
) -> DensityMatrix {
    let g = ginibre(d, rank.max(1), rng);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(1.0 / tr)).expect("Ginibre product is a valid state")
}

/// Full-rank random state (Hilbert-Schmidt measure).
pub fn density_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    density_matrix_with_rank(d, d, rng)
}

/// Random incoherent (diagonal) state.
pub fn incoherent_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let w: Vec<f64> = (0..d).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    let p: Vec<f64> = w.iter().map(|x| x / s).collect();
    DensityMatrix::new(ComplexMatrix::diagonal(&p)).expect("diagonal probabilities")
}
