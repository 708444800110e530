//! Conditional min-, max- and zero-entropies.
//!
//! ```text
//! 2^{−H_min(A|B)} = min Tr σ_B      s.t.  I_A ⊗ σ_B ⪰ ρ_AB,  σ_B ⪰ 0
//! 2^{ H_max(A|B)} = min μ           s.t.  μ I_B ⪰ Tr_A σ_AB,  σ_AB ⊗ I_C ⪰ ψψ†,
//!                                         σ_AB ⪰ 0,  μ ≥ 0
//! ```
//!
//! where `ψ` purifies `ρ_AB` on `ABC`. Only the support of `ρ_AB` is used for `C`;
//! components of a purification with zero weight add nothing beyond `σ_AB ⪰ 0`.

use super::{support, ClassicalClassicalState, ClassicalQuantumState};
use crate::linalg::{eig_hermitian, ComplexMatrix, DensityMatrix, C64};
use crate::sdp::{
    solve, HermitianLmi, HermitianVariable, LmiBlock, SdpEstimate, SdpOptions, SdpProblem,
};
use crate::{Error, Result};

/// Outcomes with at most this probability are dropped from the programs.
const NEGLIGIBLE_PROB: f64 = 1e-15;

fn psd_block(x: &HermitianVariable) -> Result<LmiBlock> {
    let mut lmi = HermitianLmi::new(x.dim());
    lmi.add_variable(x, 1.0, |k| k);
    lmi.embed()
}

fn nonneg_block(var: usize) -> LmiBlock {
    let mut b = LmiBlock::new(1);
    b.add_coefficient(var, 0, 0, 1.0);
    b
}

fn estimate(
    problem: &SdpProblem,
    options: &SdpOptions,
    context: &'static str,
    f: impl Fn(f64) -> f64,
) -> Result<SdpEstimate> {
    let sol = solve(problem, options)?.require_optimal(context)?;
    Ok(SdpEstimate {
        value: f(sol.optimal_value),
        solve: sol.summary(),
    })
}

/// Support vectors of `ρ` scaled by `√λ`, i.e. a purification `Σ_c √λ_c |u_c⟩|c⟩`
/// laid out as `v[k · r + c]`, together with `r`.
fn purification_on_support(m: &ComplexMatrix) -> Result<(Vec<C64>, usize)> {
    let (values, basis) = support(&eig_hermitian(m)?);
    let r = values.len();
    let n = basis.rows();
    let mut v = vec![C64::new(0.0, 0.0); n * r];
    for (c, lam) in values.iter().enumerate() {
        let w = lam.sqrt();
        for k in 0..n {
            v[k * r + c] = basis[(k, c)] * w;
        }
    }
    Ok((v, r))
}

/// `H_min(X|E)` of a classical-quantum state, as `−log₂` of the optimal guessing
/// probability. The constraint `I_X ⊗ σ_E ⪰ ρ_XE` splits into `σ_E ⪰ p_x ρ_E^x`.
pub fn h_min_cond(cq: &ClassicalQuantumState, options: &SdpOptions) -> Result<SdpEstimate> {
    let de = cq.dim_e();
    let sigma = HermitianVariable::new(0, de);
    let mut problem = SdpProblem::new(sigma.len());
    sigma.trace_objective(&mut problem, 1.0);
    for (p, state) in cq.probs().iter().zip(cq.conditional_states()) {
        if *p <= NEGLIGIBLE_PROB {
            continue;
        }
        let mut lmi = HermitianLmi::new(de);
        lmi.add_constant_matrix(0, 0, &state.matrix().scale(-p));
        lmi.add_variable(&sigma, 1.0, |k| k);
        problem.add_block(lmi.embed()?);
    }
    problem.add_block(psd_block(&sigma)?);
    let mut start = vec![0.0; sigma.len()];
    sigma.assign_scaled_identity(&mut start, 2.0);
    problem.set_start(start);
    estimate(&problem, options, "h_min_cond", |opt| -opt.log2())
}

/// `H_min(A|B)` of a general bipartite state with `dims = (d_A, d_B)`.
pub fn h_min_cond_bipartite(
    rho_ab: &DensityMatrix,
    dims: (usize, usize),
    options: &SdpOptions,
) -> Result<SdpEstimate> {
    let (da, db) = dims;
    if rho_ab.dim() != da * db {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            found: rho_ab.dim(),
        });
    }
    let sigma = HermitianVariable::new(0, db);
    let mut problem = SdpProblem::new(sigma.len());
    sigma.trace_objective(&mut problem, 1.0);
    let mut lmi = HermitianLmi::new(da * db);
    lmi.add_constant_matrix(0, 0, &rho_ab.matrix().scale(-1.0));
    for a in 0..da {
        lmi.add_variable(&sigma, 1.0, |k| a * db + k);
    }
    problem.add_block(lmi.embed()?);
    problem.add_block(psd_block(&sigma)?);
    let mut start = vec![0.0; sigma.len()];
    sigma.assign_scaled_identity(&mut start, 2.0);
    problem.set_start(start);
    estimate(&problem, options, "h_min_cond", |opt| -opt.log2())
}

/// `H_max(X|E)` of a classical-quantum state.
///
/// The program is invariant under phase rotations of `X` applied together with
/// the conjugate rotation on the copy of `X` inside the purification, so an
/// optimal `σ_XE` can be taken block diagonal, `⊕_x σ_x`. The purification
/// constraint then reduces to `⊕_x (σ_x ⊗ I) ⪰ ψ̃ψ̃†` with `ψ̃ = ⊕_x √p_x ψ_x`
/// and `ψ_x` a purification of `ρ_E^x`.
pub fn h_max_cond(cq: &ClassicalQuantumState, options: &SdpOptions) -> Result<SdpEstimate> {
    let de = cq.dim_e();
    let mut branches = Vec::new();
    for (p, state) in cq.probs().iter().zip(cq.conditional_states()) {
        if *p > NEGLIGIBLE_PROB {
            branches.push((*p, purification_on_support(state.matrix())?));
        }
    }
    let r = branches.iter().map(|(_, (_, r))| *r).max().unwrap_or(1);
    let n = branches.len();
    let sigmas: Vec<HermitianVariable> = (0..n)
        .map(|s| HermitianVariable::new(s * de * de, de))
        .collect();
    let mu = n * de * de;
    let mut problem = SdpProblem::new(mu + 1);
    problem.set_objective(mu, 1.0);

    // ⊕_x (σ_x ⊗ I_r) − ψ̃ψ̃†, indexed (x, e, c) ↦ x·d_E·r + e·r + c.
    let big = n * de * r;
    let mut psi = vec![C64::new(0.0, 0.0); big];
    for (s, (p, (v, rs))) in branches.iter().enumerate() {
        for e in 0..de {
            for c in 0..*rs {
                psi[s * de * r + e * r + c] = v[e * rs + c] * p.sqrt();
            }
        }
    }
    let mut lmi = HermitianLmi::new(big);
    lmi.add_constant_matrix(0, 0, &ComplexMatrix::outer(&psi).scale(-1.0));
    for (s, sigma) in sigmas.iter().enumerate() {
        for c in 0..r {
            lmi.add_variable(sigma, 1.0, |k| s * de * r + k * r + c);
        }
    }
    problem.add_block(lmi.embed()?);

    // μ I − Σ_x σ_x
    let mut marginal = HermitianLmi::new(de);
    for k in 0..de {
        marginal.add_term(mu, k, k, C64::new(1.0, 0.0));
    }
    for sigma in &sigmas {
        marginal.add_variable(sigma, -1.0, |k| k);
    }
    problem.add_block(marginal.embed()?);
    for sigma in &sigmas {
        problem.add_block(psd_block(sigma)?);
    }
    problem.add_block(nonneg_block(mu));

    let mut start = vec![0.0; mu + 1];
    for sigma in &sigmas {
        sigma.assign_scaled_identity(&mut start, 2.0);
    }
    start[mu] = 2.0 * n as f64 + 1.0;
    problem.set_start(start);
    estimate(&problem, options, "h_max_cond", f64::log2)
}

/// `H_max(A|B)` of a general bipartite state, directly from the program above
/// with the eigendecomposition purification.
pub fn h_max_cond_bipartite(
    rho_ab: &DensityMatrix,
    dims: (usize, usize),
    options: &SdpOptions,
) -> Result<SdpEstimate> {
    let (da, db) = dims;
    let n = da * db;
    if rho_ab.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rho_ab.dim(),
        });
    }
    let (psi, r) = purification_on_support(rho_ab.matrix())?;
    let sigma = HermitianVariable::new(0, n);
    let mu = sigma.end();
    let mut problem = SdpProblem::new(mu + 1);
    problem.set_objective(mu, 1.0);

    // μ I_B − Tr_A σ_AB
    let mut marginal = HermitianLmi::new(db);
    for b in 0..db {
        marginal.add_term(mu, b, b, C64::new(1.0, 0.0));
        for b2 in 0..db {
            for a in 0..da {
                for (var, z) in sigma.entry_terms(a * db + b, a * db + b2) {
                    marginal.add_term(var, b, b2, -z);
                }
            }
        }
    }
    problem.add_block(marginal.embed()?);

    // σ_AB ⊗ I_C − ψψ†
    let mut lmi = HermitianLmi::new(n * r);
    lmi.add_constant_matrix(0, 0, &ComplexMatrix::outer(&psi).scale(-1.0));
    for c in 0..r {
        lmi.add_variable(&sigma, 1.0, |k| k * r + c);
    }
    problem.add_block(lmi.embed()?);
    problem.add_block(psd_block(&sigma)?);
    problem.add_block(nonneg_block(mu));

    let mut start = vec![0.0; mu + 1];
    sigma.assign_scaled_identity(&mut start, 2.0);
    start[mu] = 2.0 * da as f64 + 1.0;
    problem.set_start(start);
    estimate(&problem, options, "h_max_cond", f64::log2)
}

/// Amplitude-free threshold for counting support entries of a column, relative
/// to the column mass.
const CC_SUPPORT_REL_TOL: f64 = 1e-16;

/// `H_0(X_A|X_E) = max_j log₂ T_j` with `T_j` the number of outcomes of `X_A`
/// compatible with outcome `j` of `X_E`.
pub fn h0_cond(cc: &ClassicalClassicalState) -> f64 {
    (0..cc.num_e())
        .filter_map(|j| {
            let col = cc.column(j);
            let mass: f64 = col.iter().sum();
            if mass <= 0.0 {
                return None;
            }
            let t = col
                .iter()
                .filter(|&&q| q > CC_SUPPORT_REL_TOL * mass)
                .count();
            Some((t as f64).log2())
        })
        .fold(0.0, f64::max)
}
