//! Min-, max- and sandwiched Rényi divergences.

use super::{check_dims, mass_outside, support, SUPPORT_VIOLATION_TOL};
use crate::linalg::{eig_hermitian, fidelity, ComplexMatrix, DensityMatrix, C64};
use crate::sdp::{solve, HermitianLmi, LmiBlock, SdpOptions, SdpProblem};
use crate::{Error, Result};

/// `W Λ^p W†` over the support of `sigma`, with the support basis `W`.
fn support_power(values: &[f64], basis: &ComplexMatrix, p: f64) -> ComplexMatrix {
    let n = basis.rows();
    ComplexMatrix::from_fn(n, n, |i, j| {
        values
            .iter()
            .enumerate()
            .map(|(k, v)| basis[(i, k)] * basis[(j, k)].conj() * v.powf(p))
            .sum()
    })
}

/// `D_max(ρ‖σ) = log₂ min{λ : ρ ≤ λσ}`, evaluated as `λ_max(σ^{-1/2} ρ σ^{-1/2})` on
/// the support of `σ`. Infinite when `ρ` has mass outside that support.
pub fn d_max(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let (values, basis) = support(&sigma.eigen());
    if mass_outside(rho.matrix(), &basis) > SUPPORT_VIOLATION_TOL {
        return Ok(f64::INFINITY);
    }
    let inv_sqrt = support_power(&values, &basis, -0.5);
    let m = (&(&inv_sqrt * rho.matrix()) * &inv_sqrt).hermitian_part();
    Ok(eig_hermitian(&m)?.max_value().log2())
}

/// [`d_max`] through the program `minimize λ s.t. λσ − ρ ⪰ 0`, restricted to the support
/// of `σ` so that a strictly feasible start exists.
pub fn d_max_sdp(rho: &DensityMatrix, sigma: &DensityMatrix, options: &SdpOptions) -> Result<f64> {
    check_dims(rho, sigma)?;
    let (values, basis) = support(&sigma.eigen());
    if mass_outside(rho.matrix(), &basis) > SUPPORT_VIOLATION_TOL {
        return Ok(f64::INFINITY);
    }
    let r = values.len();
    let rho_s = (&basis.adjoint() * &(rho.matrix() * &basis)).hermitian_part();
    let mut problem = SdpProblem::new(1);
    problem.set_objective(0, 1.0);
    let mut lmi = HermitianLmi::new(r);
    lmi.add_constant_matrix(0, 0, &rho_s.scale(-1.0));
    for (k, v) in values.iter().enumerate() {
        lmi.add_term(0, k, k, C64::new(*v, 0.0));
    }
    problem.add_block(lmi.embed()?);
    let mut nonneg = LmiBlock::new(1);
    nonneg.add_coefficient(0, 0, 0, 1.0);
    problem.add_block(nonneg);
    let min_sigma = values.iter().copied().fold(f64::INFINITY, f64::min);
    problem.set_start(vec![2.0 / min_sigma + 1.0]);
    let sol = solve(&problem, options)?.require_optimal("d_max")?;
    Ok(sol.optimal_value.log2())
}

/// `D_min(ρ‖σ) = −log₂ F(ρ, σ)`
pub fn d_min(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let f = fidelity(rho, sigma)?;
    Ok(if f <= 0.0 {
        f64::INFINITY
    } else {
        (-f.log2()).max(0.0)
    })
}

/// Sandwiched Rényi divergence
/// `D̃_α(ρ‖σ) = log₂ Tr[(σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α] / (α − 1)`.
///
/// `α = 1/2` gives [`d_min`] and `α = ∞` gives [`d_max`]. For `α > 1` the support of
/// `ρ` must lie inside that of `σ`.
pub fn renyi_divergence(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> Result<f64> {
    check_dims(rho, sigma)?;
    if alpha.is_nan() || alpha <= 0.0 || alpha == 1.0 {
        return Err(Error::InvalidOrder(alpha));
    }
    if alpha == f64::INFINITY {
        return d_max(rho, sigma);
    }
    let (values, basis) = support(&sigma.eigen());
    if alpha > 1.0 && mass_outside(rho.matrix(), &basis) > SUPPORT_VIOLATION_TOL {
        return Err(Error::SupportViolation);
    }
    let s = support_power(&values, &basis, (1.0 - alpha) / (2.0 * alpha));
    let q = (&(&s * rho.matrix()) * &s).hermitian_part();
    let eig = eig_hermitian(&q)?;
    let cut = 1e-14 * eig.max_value().max(0.0);
    let tr: f64 = eig
        .values
        .iter()
        .filter(|&&v| v > cut)
        .map(|v| v.powf(alpha))
        .sum();
    if tr <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(tr.log2() / (alpha - 1.0))
}
