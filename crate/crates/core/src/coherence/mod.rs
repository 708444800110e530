//! Coherence measures with respect to the computational basis.
//!
//! `C_min` and `C_max` are each computed along two independent routes:
//!
//! - *direct*: optimize the min/max divergence over diagonal states;
//! - *conditional*: purify `ρ`, dephase `A` into a classical register `X_A` and
//!   evaluate `H_min(X_A|E)` or `H_max(X_A|E)`.
//!
//! Both are reported, and their difference is kept as a self-check.

mod report;
mod roof;

use serde::{Deserialize, Serialize};

use crate::entropies::{
    conditional_entropy, h_max_cond, h_min_cond, von_neumann_entropy, ClassicalQuantumState,
};
use crate::linalg::{purify, trace_norm, ComplexMatrix, DensityMatrix, C64};
use crate::sdp::{solve, HermitianLmi, SdpEstimate, SdpOptions, SdpProblem};
use crate::{Error, Result};

pub use report::{
    report, CoherenceReport, Measure, MeasureSet, ReportOptions, RoofValue, RouteValues,
    ROUTE_DISAGREEMENT_FLAG,
};
pub use roof::{
    c_0, c_f, classical_adversary_entropy, convex_roof_search, AdversaryEntropy, Candidate,
    ConvexRoofDecomposition, RoofEstimate, RoofOptions, RoofSearch, C0_AMPLITUDE_TOL,
};

/// `Δ(ρ)`: the diagonal of `ρ` as a state.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::diagonal(&rho.diagonal_probabilities())
        .expect("diagonal of a density matrix is a distribution")
}

/// `V = Σ_i |i⟩_{X_A} ⊗ |i⟩⟨i|_A`, a `d² × d` isometry; row index `x · d + a`.
pub fn dephasing_isometry(d: usize) -> ComplexMatrix {
    let mut v = ComplexMatrix::zeros(d * d, d);
    for i in 0..d {
        v[(i * d + i, i)] = C64::new(1.0, 0.0);
    }
    v
}

/// Classical-quantum state `ρ_{X_A E}` obtained by dephasing `A` of the
/// eigendecomposition purification of `ρ`.
pub fn build_cq_state(rho: &DensityMatrix) -> ClassicalQuantumState {
    ClassicalQuantumState::from_purification(&purify(rho))
}

/// `C_r(ρ) = S(Δ(ρ)) − S(ρ)`
pub fn c_r(rho: &DensityMatrix) -> f64 {
    (von_neumann_entropy(&dephase(rho)) - von_neumann_entropy(rho)).max(0.0)
}

/// `C_r` as the conditional entropy `H(X_A|E)` of the classical-quantum state.
pub fn c_r_conditional(rho: &DensityMatrix) -> Result<f64> {
    let d = rho.dim();
    conditional_entropy(&build_cq_state(rho).to_density_matrix(), (d, d))
}

/// `C_g = 1 − 2^{−C_min}`
pub fn c_g_from_c_min(c_min: f64) -> f64 {
    1.0 - (-c_min).exp2()
}

/// Square root of the largest fidelity between `ρ` and a diagonal state.
///
/// With `ρ = W Λ W†` on its support, maximizes `Re Tr(W Y)` subject to
/// `[[Λ, Y], [Y†, diag(δ)]] ⪰ 0` and `Σ δ_i = 1`. Working on the support keeps
/// `Y = 0, δ = I/d` strictly feasible for every input.
pub fn max_root_fidelity_to_incoherent(
    rho: &DensityMatrix,
    options: &SdpOptions,
) -> Result<SdpEstimate> {
    let d = rho.dim();
    let (values, w) = crate::entropies::support_of(rho);
    let r = values.len();
    // Y is r × d complex: (re, im) of Y[k][i] at 2(k d + i), 2(k d + i) + 1.
    let y = |k: usize, i: usize| 2 * (k * d + i);
    let delta = |i: usize| 2 * r * d + i;
    let mut problem = SdpProblem::new(2 * r * d + d);
    for k in 0..r {
        for i in 0..d {
            // −Re(W[i][k] Y[k][i])
            problem.set_objective(y(k, i), -w[(i, k)].re);
            problem.set_objective(y(k, i) + 1, w[(i, k)].im);
        }
    }
    let mut lmi = HermitianLmi::new(r + d);
    for (k, v) in values.iter().enumerate() {
        lmi.add_constant(k, k, C64::new(*v, 0.0));
    }
    for k in 0..r {
        for i in 0..d {
            lmi.add_term(y(k, i), k, r + i, C64::new(1.0, 0.0));
            lmi.add_term(y(k, i), r + i, k, C64::new(1.0, 0.0));
            lmi.add_term(y(k, i) + 1, k, r + i, C64::new(0.0, 1.0));
            lmi.add_term(y(k, i) + 1, r + i, k, C64::new(0.0, -1.0));
        }
    }
    for i in 0..d {
        lmi.add_term(delta(i), r + i, r + i, C64::new(1.0, 0.0));
    }
    problem.add_block(lmi.embed()?);
    problem.add_equality((0..d).map(|i| (delta(i), 1.0)).collect(), 1.0);
    let mut start = vec![0.0; problem.decision_dim()];
    for i in 0..d {
        start[delta(i)] = 1.0 / d as f64;
    }
    problem.set_start(start);
    let sol = solve(&problem, options)?.require_optimal("c_min direct")?;
    Ok(SdpEstimate {
        value: -sol.optimal_value,
        solve: sol.summary(),
    })
}

/// Direct route for `C_min`: `−log₂ max_δ F(ρ, δ)`.
pub fn c_min_direct(rho: &DensityMatrix, options: &SdpOptions) -> Result<SdpEstimate> {
    let est = max_root_fidelity_to_incoherent(rho, options)?;
    Ok(SdpEstimate {
        value: (-2.0 * est.value.log2()).max(0.0),
        solve: est.solve,
    })
}

/// Conditional route for `C_min`: `H_min(X_A|E)`.
pub fn c_min_conditional(rho: &DensityMatrix, options: &SdpOptions) -> Result<SdpEstimate> {
    let mut est = h_min_cond(&build_cq_state(rho), options)?;
    est.value = est.value.max(0.0);
    Ok(est)
}

/// Direct route for `C_max`: `log₂ min Tr D` subject to `diag(D) ⪰ ρ`.
///
/// The substitution `D = λ δ` turns `min λ s.t. λ δ ⪰ ρ` into a linear program.
pub fn c_max_direct(rho: &DensityMatrix, options: &SdpOptions) -> Result<SdpEstimate> {
    let d = rho.dim();
    let mut problem = SdpProblem::new(d);
    let mut lmi = HermitianLmi::new(d);
    lmi.add_constant_matrix(0, 0, &rho.matrix().scale(-1.0));
    for i in 0..d {
        problem.set_objective(i, 1.0);
        lmi.add_term(i, i, i, C64::new(1.0, 0.0));
    }
    problem.add_block(lmi.embed()?);
    problem.set_start(vec![2.0; d]);
    let sol = solve(&problem, options)?.require_optimal("c_max direct")?;
    Ok(SdpEstimate {
        value: sol.optimal_value.log2().max(0.0),
        solve: sol.summary(),
    })
}

/// Conditional route for `C_max`: `H_max(X_A|E)`.
pub fn c_max_conditional(rho: &DensityMatrix, options: &SdpOptions) -> Result<SdpEstimate> {
    let mut est = h_max_cond(&build_cq_state(rho), options)?;
    est.value = est.value.max(0.0);
    Ok(est)
}

/// Both routes for `C_min`.
pub fn c_min_routes(rho: &DensityMatrix, options: &SdpOptions) -> Result<RouteValues> {
    Ok(RouteValues {
        direct: c_min_direct(rho, options)?,
        conditional: c_min_conditional(rho, options)?,
    })
}

/// Both routes for `C_max`.
pub fn c_max_routes(rho: &DensityMatrix, options: &SdpOptions) -> Result<RouteValues> {
    Ok(RouteValues {
        direct: c_max_direct(rho, options)?,
        conditional: c_max_conditional(rho, options)?,
    })
}

pub fn c_min(rho: &DensityMatrix, options: &SdpOptions) -> Result<f64> {
    Ok(c_min_routes(rho, options)?.value())
}

pub fn c_g(rho: &DensityMatrix, options: &SdpOptions) -> Result<f64> {
    Ok(c_g_from_c_min(c_min(rho, options)?))
}

pub fn c_max(rho: &DensityMatrix, options: &SdpOptions) -> Result<f64> {
    Ok(c_max_routes(rho, options)?.value())
}

/// `p_guess(X_A|E) = 2^{−H_min(X_A|E)}`
pub fn p_guess(cq: &ClassicalQuantumState, options: &SdpOptions) -> Result<f64> {
    Ok((-h_min_cond(cq, options)?.value).exp2())
}

/// Optimal probability of identifying a binary `X_A` from `E`:
/// `½(1 + ‖p₀ρ₀ − p₁ρ₁‖₁)`.
pub fn p_guess_binary(cq: &ClassicalQuantumState) -> Result<f64> {
    if cq.num_outcomes() != 2 {
        return Err(Error::InvalidArgument(format!(
            "closed-form guessing probability needs 2 outcomes, got {}",
            cq.num_outcomes()
        )));
    }
    let (p, s) = (cq.probs(), cq.conditional_states());
    let diff = &s[0].matrix().scale(p[0]) - &s[1].matrix().scale(p[1]);
    Ok(0.5 * (1.0 + trace_norm(&diff.hermitian_part())?))
}

/// `p_secr(X_A|E) = 2^{H_max(X_A|E)}`
pub fn p_secr(cq: &ClassicalQuantumState, options: &SdpOptions) -> Result<f64> {
    Ok(h_max_cond(cq, options)?.value.exp2())
}

/// Parameters of the qubit family `(I + n·σ)/2` with `n = (γ sin βπ, 0, cos βπ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub beta: f64,
    pub gamma: f64,
}

impl BlochPoint {
    pub fn state(&self) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&self.beta) || !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidArgument(format!(
                "Bloch parameters ({}, {}) outside [0, 1]",
                self.beta, self.gamma
            )));
        }
        let angle = self.beta * std::f64::consts::PI;
        let (nx, nz) = (self.gamma * angle.sin(), angle.cos());
        DensityMatrix::new(ComplexMatrix::from_real_rows(&[
            &[(1.0 + nz) / 2.0, nx / 2.0],
            &[nx / 2.0, (1.0 - nz) / 2.0],
        ]))
    }
}
