//! Convex-roof measures `C_f` and `C_0`.
//!
//! Every pure-state decomposition of `ρ = Σ_m λ_m |u_m⟩⟨u_m|` has the form
//! `√p_j |ψ_j⟩ = Σ_m U_jm √λ_m |u_m⟩` for a `k × r` isometry `U`, equivalently a
//! rank-one measurement on the purifying system. Qubits have closed forms; in
//! higher dimension the search below only yields upper bounds.
//!
//! The search runs restarts from Haar-random isometries with `k` cycling through
//! `r..=d²`, followed by coordinate descent over complex Givens rotations of
//! pairs of decomposition elements. The step halves whenever a full sweep fails
//! to improve and the descent stops once it falls below the tolerance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::c_r;
use crate::entropies::{binary_entropy, h0_cond, support_of, ClassicalClassicalState};
use crate::linalg::{purify, random, ComplexMatrix, DensityMatrix, C64};
use crate::Result;

/// Amplitudes of a normalized decomposition element at or below this magnitude
/// do not count toward its coherence rank. `C_0` is discontinuous, so values
/// near this threshold are sensitive to it.
pub const C0_AMPLITUDE_TOL: f64 = 1e-8;
/// Decomposition elements of weight at or below this are ignored by `C_0`.
const NEGLIGIBLE_WEIGHT: f64 = 1e-12;
/// Off-diagonal magnitude below which a qubit counts as incoherent.
const QUBIT_DIAGONAL_TOL: f64 = 1e-10;
/// Gap to the `C_r` lower bound under which an upper bound is declared exact.
const CERTIFY_TOL: f64 = 1e-9;
const MIN_IMPROVEMENT: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoofOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Smallest rotation step of the descent.
    pub tol: f64,
    pub initial_step: f64,
    pub max_sweeps: usize,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            seed: 0,
            tol: 1e-7,
            initial_step: 0.5,
            max_sweeps: 2000,
        }
    }
}

/// Weights `p_j` and normalized pure states `|ψ_j⟩` with `Σ_j p_j |ψ_j⟩⟨ψ_j| = ρ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexRoofDecomposition {
    pub weights: Vec<f64>,
    pub states: Vec<Vec<C64>>,
}

impl ConvexRoofDecomposition {
    fn from_unnormalized(vectors: &[Vec<C64>]) -> Self {
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for v in vectors {
            let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if p > 0.0 {
                weights.push(p);
                states.push(v.iter().map(|z| z / p.sqrt()).collect());
            }
        }
        Self { weights, states }
    }

    /// `Σ_j p_j |ψ_j⟩⟨ψ_j|`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.states.first().map_or(0, Vec::len);
        let mut m = ComplexMatrix::zeros(d, d);
        for (p, s) in self.weights.iter().zip(&self.states) {
            m = &m + &ComplexMatrix::outer(s).scale(*p);
        }
        m
    }
}

/// Value of a convex-roof measure; `exact` is false for upper bounds that could
/// not be certified optimal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoofEstimate {
    pub value: f64,
    pub exact: bool,
    pub decomposition: Option<ConvexRoofDecomposition>,
}

/// One decomposition visited by the search.
#[derive(Clone, Debug)]
pub struct Candidate {
    /// `k × r` isometry acting on the support eigenbasis.
    pub isometry: ComplexMatrix,
    pub formation: f64,
    pub rank_bound: f64,
}

/// Result of the shared decomposition search.
#[derive(Clone, Debug)]
pub struct RoofSearch {
    pub c_f: RoofEstimate,
    pub c_0: RoofEstimate,
    pub candidates: Vec<Candidate>,
}

/// `‖v‖² S(Δ(v/‖v‖))` in bits.
fn formation_term(v: &[C64]) -> f64 {
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if n <= 0.0 {
        return 0.0;
    }
    let s: f64 = v
        .iter()
        .map(|z| z.norm_sqr())
        .filter(|&a| a > 0.0)
        .map(|a| a * a.log2())
        .sum();
    (n * n.log2() - s).max(0.0)
}

fn coherence_rank(v: &[C64]) -> usize {
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let cut = C0_AMPLITUDE_TOL * C0_AMPLITUDE_TOL * n;
    v.iter().filter(|z| z.norm_sqr() > cut).count()
}

/// `max_j log₂ T_j` over elements of non-negligible weight.
fn rank_bound(vectors: &[Vec<C64>]) -> f64 {
    vectors
        .iter()
        .filter(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > NEGLIGIBLE_WEIGHT)
        .map(|v| (coherence_rank(v) as f64).log2())
        .fold(0.0, f64::max)
}

/// Rows `√λ_m u_m†`-style: `phi[m]` is `√λ_m |u_m⟩`.
fn weighted_support(rho: &DensityMatrix) -> Vec<Vec<C64>> {
    let (values, basis) = support_of(rho);
    values
        .iter()
        .enumerate()
        .map(|(m, v)| basis.column(m).into_iter().map(|z| z * v.sqrt()).collect())
        .collect()
}

fn decompose(u: &ComplexMatrix, phi: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let d = phi[0].len();
    (0..u.rows())
        .map(|j| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            for (m, row) in phi.iter().enumerate() {
                let c = u[(j, m)];
                for (x, y) in v.iter_mut().zip(row) {
                    *x += c * y;
                }
            }
            v
        })
        .collect()
}

fn candidate(u: ComplexMatrix, phi: &[Vec<C64>]) -> Candidate {
    let vectors = decompose(&u, phi);
    Candidate {
        formation: vectors.iter().map(|v| formation_term(v)).sum(),
        rank_bound: rank_bound(&vectors),
        isometry: u,
    }
}

/// Coordinate descent of `Σ_j formation_term(ψ̃_j)` over rotations of row pairs.
/// `u` receives the same rotations so that it stays the generating isometry.
fn descend(u: &mut ComplexMatrix, phi: &[Vec<C64>], floor: f64, options: &RoofOptions) {
    let mut vectors = decompose(u, phi);
    let k = vectors.len();
    let d = phi[0].len();
    let r = u.cols();
    let mut terms: Vec<f64> = vectors.iter().map(|v| formation_term(v)).collect();
    let mut total: f64 = terms.iter().sum();
    let mut step = options.initial_step;
    let mut new_p = vec![C64::new(0.0, 0.0); d];
    let mut new_q = vec![C64::new(0.0, 0.0); d];
    let phases = [C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
    let mut sweeps = 0;
    while step >= options.tol && sweeps < options.max_sweeps && total - floor > CERTIFY_TOL {
        sweeps += 1;
        let mut improved = false;
        for p in 0..k {
            for q in (p + 1)..k {
                'pair: for phase in phases {
                    for sign in [1.0, -1.0] {
                        let (s, c) = (sign * step).sin_cos();
                        let a = -phase.conj() * s;
                        let b = phase * s;
                        for i in 0..d {
                            new_p[i] = vectors[p][i] * c + vectors[q][i] * a;
                            new_q[i] = vectors[p][i] * b + vectors[q][i] * c;
                        }
                        let fp = formation_term(&new_p);
                        let fq = formation_term(&new_q);
                        let delta = fp + fq - terms[p] - terms[q];
                        if delta < -MIN_IMPROVEMENT {
                            vectors[p].copy_from_slice(&new_p);
                            vectors[q].copy_from_slice(&new_q);
                            for m in 0..r {
                                let (up, uq) = (u[(p, m)], u[(q, m)]);
                                u[(p, m)] = up * c + uq * a;
                                u[(q, m)] = up * b + uq * c;
                            }
                            terms[p] = fp;
                            terms[q] = fq;
                            total += delta;
                            improved = true;
                            break 'pair;
                        }
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
}

fn qubit_formation(rho: &DensityMatrix) -> f64 {
    let c = rho.get(0, 1).norm();
    binary_entropy(0.5 * (1.0 + (1.0 - 4.0 * c * c).max(0.0).sqrt()))
}

fn qubit_rank(rho: &DensityMatrix) -> f64 {
    if rho.get(0, 1).norm() <= QUBIT_DIAGONAL_TOL {
        0.0
    } else {
        1.0
    }
}

/// Runs the decomposition search and returns both convex-roof bounds.
///
/// Both bounds are minima over the same candidate set, so `C_f ≤ C_0` holds for
/// the returned values. The search is deterministic for a given seed.
pub fn convex_roof_search(rho: &DensityMatrix, options: &RoofOptions) -> RoofSearch {
    let d = rho.dim();
    let phi = weighted_support(rho);
    let r = phi.len();
    let floor = c_r(rho);

    let mut candidates = vec![candidate(ComplexMatrix::identity(r), &phi)];
    if r > 1 {
        let certified =
            candidates[0].formation - floor <= CERTIFY_TOL && candidates[0].rank_bound == 0.0;
        if !certified {
            let span = d * d - r + 1;
            let runs: Vec<[Candidate; 2]> = (0..options.restarts)
                .into_par_iter()
                .map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
                    rng.set_stream(t as u64);
                    let k = r + t % span;
                    let start = random::isometry(k, r, &mut rng);
                    let mut u = start.clone();
                    descend(&mut u, &phi, floor, options);
                    [candidate(start, &phi), candidate(u, &phi)]
                })
                .collect();
            candidates.extend(runs.into_iter().flatten());
        }
    }

    let best_f = candidates
        .iter()
        .min_by(|a, b| a.formation.total_cmp(&b.formation))
        .expect("at least one candidate");
    let best_0 = candidates
        .iter()
        .min_by(|a, b| a.rank_bound.total_cmp(&b.rank_bound))
        .expect("at least one candidate");
    let t_ub = best_0.rank_bound.exp2().round();
    let c_f = RoofEstimate {
        value: best_f.formation,
        exact: r == 1 || best_f.formation - floor <= CERTIFY_TOL,
        decomposition: Some(ConvexRoofDecomposition::from_unnormalized(&decompose(
            &best_f.isometry,
            &phi,
        ))),
    };
    let c_0 = RoofEstimate {
        value: best_0.rank_bound,
        exact: r == 1 || t_ub <= 1.0 || (t_ub - 1.0).log2() < floor - CERTIFY_TOL,
        decomposition: Some(ConvexRoofDecomposition::from_unnormalized(&decompose(
            &best_0.isometry,
            &phi,
        ))),
    };
    RoofSearch {
        c_f,
        c_0,
        candidates,
    }
}

/// Coherence of formation. Exact for qubits (closed form); otherwise the search
/// bound, flagged exact only when it meets the `C_r` lower bound.
pub fn c_f(rho: &DensityMatrix, options: &RoofOptions) -> RoofEstimate {
    if rho.dim() == 2 {
        return RoofEstimate {
            value: qubit_formation(rho),
            exact: true,
            decomposition: None,
        };
    }
    convex_roof_search(rho, options).c_f
}

/// `C_0 = min max_j log₂ T_j`. Exact for qubits: 0 for diagonal states, else 1.
pub fn c_0(rho: &DensityMatrix, options: &RoofOptions) -> RoofEstimate {
    if rho.dim() == 2 {
        return RoofEstimate {
            value: qubit_rank(rho),
            exact: true,
            decomposition: None,
        };
    }
    convex_roof_search(rho, options).c_0
}

/// Which conditional entropy of `ρ_{X_A X_E}` to minimize.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdversaryEntropy {
    /// `H(X_A|X_E)`, giving `C_f`.
    VonNeumann,
    /// `H_0(X_A|X_E)`, giving `C_0`.
    Zero,
}

/// Minimum over the searched measurements `M_E` on the purifying system of the
/// conditional entropy of the resulting classical-classical state.
///
/// Each candidate isometry `U` of [`convex_roof_search`] defines the rank-one
/// measurement with elements `|e_j⟩ = Σ_m U*_jm |m⟩_E` on the eigenbasis
/// purification; outcome columns of weight at most `1e-12` are dropped.
pub fn classical_adversary_entropy(
    rho: &DensityMatrix,
    which: AdversaryEntropy,
    options: &RoofOptions,
) -> Result<f64> {
    let search = convex_roof_search(rho, options);
    let psi = purify(rho);
    let d = rho.dim();
    let mut best = f64::INFINITY;
    for cand in &search.candidates {
        let u = &cand.isometry;
        let mut columns: Vec<Vec<f64>> = Vec::new();
        for j in 0..u.rows() {
            let col: Vec<f64> = (0..d)
                .map(|a| {
                    (0..u.cols())
                        .map(|m| u[(j, m)] * psi.amplitude(a, m))
                        .sum::<C64>()
                        .norm_sqr()
                })
                .collect();
            if col.iter().sum::<f64>() > NEGLIGIBLE_WEIGHT {
                columns.push(col);
            }
        }
        let total: f64 = columns.iter().flatten().sum();
        let joint: Vec<Vec<f64>> = (0..d)
            .map(|a| columns.iter().map(|c| c[a] / total).collect())
            .collect();
        let cc = ClassicalClassicalState::new(joint)?;
        let value = match which {
            AdversaryEntropy::VonNeumann => cc.conditional_entropy(),
            AdversaryEntropy::Zero => h0_cond(&cc),
        };
        best = best.min(value);
    }
    Ok(best.max(0.0))
}
