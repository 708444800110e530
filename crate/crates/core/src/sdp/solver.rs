//! Infeasible-start primal-dual interior-point method (HKM direction with
//! Mehrotra predictor-corrector).
//!
//! With slack `S = F(y)` and primal matrix `X`, the iteration drives
//!
//! ```text
//! F0 + Σ y_i F_i − S = 0,    <F_i, X> = c_i,    X S = μ I
//! ```
//!
//! to `μ → 0`. The dual problem is `maximize −<F0, X>` over `X ⪰ 0` with
//! `<F_i, X> = c_i`, so `c·y + <F0, X>` is the duality gap.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{IterateRecord, SdpOptions, SdpProblem, SdpSolution, SolveStatus};
use crate::{Error, Result};

const STEP_FRACTION: f64 = 0.98;
const PIVOT_TOL: f64 = 1e-12;
/// Minimum eigenvalue accepted when verifying the returned decision.
const FEASIBILITY_TOL: f64 = 1e-9;

type Entries = Vec<(usize, usize, f64)>;

/// Block after equality elimination; variable indices refer to the reduced vector.
struct Block {
    constant: DMatrix<f64>,
    vars: Vec<(usize, Entries)>,
}

impl Block {
    fn dim(&self) -> usize {
        self.constant.nrows()
    }

    fn evaluate(&self, z: &[f64]) -> DMatrix<f64> {
        let mut m = self.constant.clone();
        for (var, entries) in &self.vars {
            let v = z[*var];
            for &(i, j, c) in entries {
                m[(i, j)] += v * c;
            }
        }
        m
    }

    fn combine(&self, dz: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (var, entries) in &self.vars {
            let v = dz[*var];
            for &(i, j, c) in entries {
                m[(i, j)] += v * c;
            }
        }
        m
    }
}

fn inner(entries: &Entries, m: &DMatrix<f64>) -> f64 {
    entries.iter().map(|&(i, j, c)| c * m[(i, j)]).sum()
}

fn frob(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// How each original variable is recovered from the reduced vector.
enum Recovery {
    Reduced(usize),
    Fixed(f64),
    /// `rhs − Σ coef · y_free`, with free variables given by original index.
    Pivot(f64, Vec<(usize, f64)>),
}

struct Reduced {
    objective: Vec<f64>,
    offset: f64,
    blocks: Vec<Block>,
    recovery: Vec<Recovery>,
}

impl Reduced {
    fn recover(&self, z: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.recovery.len()];
        for (k, r) in self.recovery.iter().enumerate() {
            match r {
                Recovery::Reduced(i) => y[k] = z[*i],
                Recovery::Fixed(v) => y[k] = *v,
                Recovery::Pivot(..) => {}
            }
        }
        for (k, r) in self.recovery.iter().enumerate() {
            if let Recovery::Pivot(rhs, coefs) = r {
                y[k] = rhs - coefs.iter().map(|(f, c)| c * y[*f]).sum::<f64>();
            }
        }
        y
    }
}

/// Row-reduces the equalities and substitutes pivot variables into the blocks.
fn reduce(problem: &SdpProblem) -> Result<Reduced> {
    let n = problem.decision_dim();
    let m = problem.equalities().len();
    let mut a = DMatrix::<f64>::zeros(m, n);
    let mut b = DVector::<f64>::zeros(m);
    for (r, eq) in problem.equalities().iter().enumerate() {
        for &(var, c) in &eq.coefficients {
            if var >= n {
                return Err(Error::InvalidArgument(format!(
                    "equality references variable {var} beyond decision dimension {n}"
                )));
            }
            a[(r, var)] += c;
        }
        b[r] = eq.rhs;
    }

    // Reduced row echelon form with partial pivoting.
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let (best, val) = (row..m)
            .map(|r| (r, a[(r, col)].abs()))
            .fold((row, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= PIVOT_TOL {
            continue;
        }
        a.swap_rows(row, best);
        b.swap_rows(row, best);
        let p = a[(row, col)];
        for c in 0..n {
            a[(row, c)] /= p;
        }
        b[row] /= p;
        for r in 0..m {
            if r != row {
                let f = a[(r, col)];
                if f != 0.0 {
                    for c in 0..n {
                        a[(r, c)] -= f * a[(row, c)];
                    }
                    b[r] -= f * b[row];
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    for r in row..m {
        if b[r].abs() > 1e-9 {
            return Err(Error::InvalidArgument(
                "inconsistent equality constraints".into(),
            ));
        }
    }

    let mut is_pivot = vec![None; n];
    for &(r, col) in &pivots {
        is_pivot[col] = Some(r);
    }
    let free: Vec<usize> = (0..n).filter(|&v| is_pivot[v].is_none()).collect();
    let mut free_pos = vec![usize::MAX; n];
    for (k, &v) in free.iter().enumerate() {
        free_pos[v] = k;
    }
    // Pivot variable expansions over free variables (original indices).
    let pivot_expr = |r: usize| -> Vec<(usize, f64)> {
        free.iter()
            .filter_map(|&f| {
                let c = a[(r, f)];
                (c.abs() > 0.0).then_some((f, c))
            })
            .collect()
    };

    let c = problem.objective();
    let mut objective = vec![0.0; free.len()];
    let mut offset = 0.0;
    for (k, &f) in free.iter().enumerate() {
        objective[k] = c[f];
    }
    for &(r, col) in &pivots {
        offset += c[col] * b[r];
        for (f, coef) in pivot_expr(r) {
            objective[free_pos[f]] -= c[col] * coef;
        }
    }

    let mut blocks = Vec::with_capacity(problem.blocks().len());
    for block in problem.blocks() {
        let mut constant = block.constant().clone();
        let mut vars: std::collections::BTreeMap<
            usize,
            std::collections::BTreeMap<(usize, usize), f64>,
        > = Default::default();
        for (&var, entries) in block.terms() {
            match is_pivot[var] {
                None => {
                    let slot = vars.entry(free_pos[var]).or_default();
                    for (&ij, &v) in entries {
                        *slot.entry(ij).or_insert(0.0) += v;
                    }
                }
                Some(r) => {
                    for (&(i, j), &v) in entries {
                        constant[(i, j)] += b[r] * v;
                    }
                    for (f, coef) in pivot_expr(r) {
                        let slot = vars.entry(free_pos[f]).or_default();
                        for (&ij, &v) in entries {
                            *slot.entry(ij).or_insert(0.0) -= coef * v;
                        }
                    }
                }
            }
        }
        let vars = vars
            .into_iter()
            .map(|(k, e)| {
                let e: Entries = e
                    .into_iter()
                    .filter(|(_, v)| *v != 0.0)
                    .map(|((i, j), v)| (i, j, v))
                    .collect();
                (k, e)
            })
            .filter(|(_, e)| !e.is_empty())
            .collect();
        blocks.push(Block { constant, vars });
    }

    // Free variables absent from every block are fixed; a nonzero cost on one
    // would make the problem unbounded.
    let mut used = vec![false; free.len()];
    for block in &blocks {
        for (k, _) in &block.vars {
            used[*k] = true;
        }
    }
    let start = problem.start();
    let mut renumber = vec![usize::MAX; free.len()];
    let mut next = 0;
    let mut recovery: Vec<Recovery> = (0..n).map(|_| Recovery::Fixed(0.0)).collect();
    let mut reduced_objective = Vec::new();
    for (k, &f) in free.iter().enumerate() {
        if used[k] {
            renumber[k] = next;
            recovery[f] = Recovery::Reduced(next);
            reduced_objective.push(objective[k]);
            next += 1;
        } else {
            if objective[k].abs() > 1e-14 {
                return Err(Error::InvalidArgument(format!(
                    "variable {f} is unconstrained with nonzero cost"
                )));
            }
            recovery[f] = Recovery::Fixed(start.map_or(0.0, |s| s[f]));
        }
    }
    for &(r, col) in &pivots {
        recovery[col] = Recovery::Pivot(b[r], pivot_expr(r));
    }
    for block in &mut blocks {
        for (k, _) in &mut block.vars {
            *k = renumber[*k];
        }
    }
    Ok(Reduced {
        objective: reduced_objective,
        offset,
        blocks,
        recovery,
    })
}

/// Largest `α` with `base + α·dir ⪰ 0`, given a Cholesky factor of `base`.
fn max_step(chol: &Cholesky<f64, Dyn>, dir: &DMatrix<f64>) -> f64 {
    let l = chol.l();
    let a = l.solve_lower_triangular(dir).expect("nonsingular factor");
    let w = l
        .solve_lower_triangular(&a.transpose())
        .expect("nonsingular factor");
    let lam = sym(w).symmetric_eigenvalues().min();
    if lam >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lam
    }
}

fn step_length(chols: &[Cholesky<f64, Dyn>], dirs: &[DMatrix<f64>]) -> f64 {
    chols
        .iter()
        .zip(dirs)
        .map(|(c, d)| max_step(c, d))
        .fold(f64::INFINITY, f64::min)
}

fn all_pd(ms: &[DMatrix<f64>]) -> Option<Vec<Cholesky<f64, Dyn>>> {
    ms.iter().map(|m| Cholesky::new(m.clone())).collect()
}

struct Direction {
    dz: Vec<f64>,
    dx: Vec<DMatrix<f64>>,
    ds: Vec<DMatrix<f64>>,
}

struct Workspace<'a> {
    red: &'a Reduced,
    x: Vec<DMatrix<f64>>,
    s_inv: Vec<DMatrix<f64>>,
    /// `X R_s S⁻¹` per block.
    xrs: Vec<DMatrix<f64>>,
    rs: Vec<DMatrix<f64>>,
    r: Vec<f64>,
    schur: Cholesky<f64, Dyn>,
}

impl Workspace<'_> {
    fn direction(&self, g: &[DMatrix<f64>]) -> Direction {
        let nz = self.red.objective.len();
        let mut rhs = DVector::from_iterator(nz, self.r.iter().map(|r| -r));
        for (k, block) in self.red.blocks.iter().enumerate() {
            let t = &g[k] - &self.xrs[k];
            for (var, entries) in &block.vars {
                rhs[*var] += inner(entries, &t);
            }
        }
        let dz = self.schur.solve(&rhs);
        let dz: Vec<f64> = dz.iter().copied().collect();
        let mut dx = Vec::with_capacity(g.len());
        let mut ds = Vec::with_capacity(g.len());
        for (k, block) in self.red.blocks.iter().enumerate() {
            let d_s = &self.rs[k] + block.combine(&dz);
            let d_x = sym(&g[k] - &self.x[k] * &d_s * &self.s_inv[k]);
            dx.push(d_x);
            ds.push(d_s);
        }
        Direction { dz, dx, ds }
    }
}

/// Schur complement `M_ij = Σ_blocks Tr(F_i X F_j S⁻¹)`.
fn schur_matrix(red: &Reduced, x: &[DMatrix<f64>], s_inv: &[DMatrix<f64>]) -> DMatrix<f64> {
    let nz = red.objective.len();
    let mut m = DMatrix::<f64>::zeros(nz, nz);
    for (k, block) in red.blocks.iter().enumerate() {
        let (xk, qk) = (&x[k], &s_inv[k]);
        for (p, (vi, ei)) in block.vars.iter().enumerate() {
            for (vj, ej) in &block.vars[p..] {
                let mut acc = 0.0;
                for &(a, b, v) in ei {
                    for &(c, e, w) in ej {
                        acc += v * w * xk[(b, c)] * qk[(e, a)];
                    }
                }
                m[(*vi, *vj)] += acc;
                if vi != vj {
                    m[(*vj, *vi)] += acc;
                }
            }
        }
    }
    m
}

fn factor_schur(m: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    if let Some(c) = Cholesky::new(m.clone()) {
        return Some(c);
    }
    let scale = m.diagonal().amax().max(1e-300);
    let mut reg = 1e-14 * scale;
    for _ in 0..8 {
        let mut mm = m.clone();
        for i in 0..mm.nrows() {
            mm[(i, i)] += reg;
        }
        if let Some(c) = Cholesky::new(mm) {
            return Some(c);
        }
        reg *= 100.0;
    }
    None
}

/// Solves the problem to the requested duality gap.
///
/// A strictly feasible start supplied with [`SdpProblem::set_start`] is used as
/// the initial dual slack; otherwise the method starts from a scaled identity
/// and reduces the infeasibility along the way.
pub fn solve(problem: &SdpProblem, options: &SdpOptions) -> Result<SdpSolution> {
    problem.validate()?;
    let red = reduce(problem)?;
    let nz = red.objective.len();
    let nblocks = red.blocks.len();
    let total_dim: usize = red.blocks.iter().map(Block::dim).sum();

    let mut z = vec![0.0; nz];
    if let Some(start) = problem.start() {
        for (k, r) in red.recovery.iter().enumerate() {
            if let Recovery::Reduced(i) = r {
                z[*i] = start[k];
            }
        }
    }

    if total_dim == 0 {
        if red.objective.iter().any(|c| *c != 0.0) {
            return Err(Error::InvalidArgument("problem has no constraints".into()));
        }
        let y = red.recover(&z);
        return Ok(SdpSolution {
            optimal_value: red.offset,
            dual_value: red.offset,
            decision: y,
            duality_gap: 0.0,
            iterations: 0,
            status: SolveStatus::Optimal,
            history: Vec::new(),
        });
    }

    let c_norm = red.objective.iter().map(|c| c * c).sum::<f64>().sqrt();
    let f0_norm = red
        .blocks
        .iter()
        .map(|b| b.constant.norm())
        .fold(0.0, f64::max);
    let coef_norm = |b: &Block, var: usize| -> f64 {
        b.vars
            .iter()
            .find(|(v, _)| *v == var)
            .map_or(0.0, |(_, e)| {
                e.iter().map(|t| t.2 * t.2).sum::<f64>().sqrt()
            })
    };
    let mut var_norm = vec![0.0f64; nz];
    for b in &red.blocks {
        for (v, _) in &b.vars {
            var_norm[*v] = var_norm[*v].max(coef_norm(b, *v));
        }
    }
    let sqrt_n = (total_dim as f64).sqrt();
    let xi = (0..nz)
        .map(|i| sqrt_n * (1.0 + red.objective[i].abs()) / (1.0 + var_norm[i]))
        .fold(10.0, f64::max);
    let eta = var_norm.iter().fold(f0_norm, |a, &b| a.max(b)).max(1.0) * sqrt_n.max(10.0);

    let start_slack: Vec<DMatrix<f64>> = red.blocks.iter().map(|b| b.evaluate(&z)).collect();
    let mut s = if all_pd(&start_slack).is_some() {
        start_slack
    } else {
        red.blocks
            .iter()
            .map(|b| DMatrix::identity(b.dim(), b.dim()) * eta)
            .collect()
    };
    let mut x: Vec<DMatrix<f64>> = red
        .blocks
        .iter()
        .map(|b| DMatrix::identity(b.dim(), b.dim()) * xi)
        .collect();

    let mut history = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;
    let mut gap: f64;
    let mut dual_value: f64;
    let mut stalls = 0;

    loop {
        let rs: Vec<DMatrix<f64>> = red
            .blocks
            .iter()
            .zip(&s)
            .map(|(b, sk)| b.evaluate(&z) - sk)
            .collect();
        let mut r = red.objective.clone();
        for (k, block) in red.blocks.iter().enumerate() {
            for (var, entries) in &block.vars {
                r[*var] -= inner(entries, &x[k]);
            }
        }
        let primal = red
            .objective
            .iter()
            .zip(&z)
            .map(|(c, v)| c * v)
            .sum::<f64>()
            + red.offset;
        dual_value = -red
            .blocks
            .iter()
            .zip(&x)
            .map(|(b, xk)| frob(&b.constant, xk))
            .sum::<f64>()
            + red.offset;
        gap = primal - dual_value;
        let p_inf = rs.iter().map(|m| m.norm()).fold(0.0, f64::max) / (1.0 + f0_norm);
        let d_inf = r.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + c_norm);
        history.push(IterateRecord {
            primal,
            dual: dual_value,
            primal_infeasibility: p_inf,
            dual_infeasibility: d_inf,
        });
        let mu = x.iter().zip(&s).map(|(a, b)| frob(a, b)).sum::<f64>() / total_dim as f64;
        let scale = 1.0f64.max(primal.abs());
        if gap.abs() <= options.tol * scale
            && mu * total_dim as f64 <= options.tol * scale
            && p_inf <= options.tol
            && d_inf <= options.tol
            && red
                .blocks
                .iter()
                .all(|b| b.evaluate(&z).symmetric_eigenvalues().min() >= -FEASIBILITY_TOL)
        {
            status = SolveStatus::Optimal;
            break;
        }
        if iterations >= options.max_iter {
            break;
        }
        iterations += 1;

        let (Some(x_chol), Some(s_chol)) = (all_pd(&x), all_pd(&s)) else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        let s_inv: Vec<DMatrix<f64>> = s_chol.iter().map(|c| sym(c.inverse())).collect();
        let Some(schur) = factor_schur(schur_matrix(&red, &x, &s_inv)) else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        let xrs: Vec<DMatrix<f64>> = (0..nblocks).map(|k| &x[k] * &rs[k] * &s_inv[k]).collect();
        let ws = Workspace {
            red: &red,
            x: x.clone(),
            s_inv: s_inv.clone(),
            xrs,
            rs,
            r,
            schur,
        };

        // Predictor.
        let g: Vec<DMatrix<f64>> = x.iter().map(|xk| -xk).collect();
        let aff = ws.direction(&g);
        let ap = step_length(&x_chol, &aff.dx).min(1.0);
        let ad = step_length(&s_chol, &aff.ds).min(1.0);
        let mu_aff = (0..nblocks)
            .map(|k| frob(&(&x[k] + &aff.dx[k] * ap), &(&s[k] + &aff.ds[k] * ad)))
            .sum::<f64>()
            / total_dim as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector.
        let g: Vec<DMatrix<f64>> = (0..nblocks)
            .map(|k| &s_inv[k] * (sigma * mu) - &x[k] - &aff.dx[k] * &aff.ds[k] * &s_inv[k])
            .collect();
        let dir = ws.direction(&g);
        let mut ap = (STEP_FRACTION * step_length(&x_chol, &dir.dx)).min(1.0);
        let mut ad = (STEP_FRACTION * step_length(&s_chol, &dir.ds)).min(1.0);

        // Guard against eigenvalue round-off at the boundary.
        let mut new_x: Vec<DMatrix<f64>>;
        loop {
            new_x = (0..nblocks).map(|k| &x[k] + &dir.dx[k] * ap).collect();
            if all_pd(&new_x).is_some() || ap < 1e-12 {
                break;
            }
            ap *= 0.8;
        }
        let mut new_s: Vec<DMatrix<f64>>;
        loop {
            new_s = (0..nblocks).map(|k| &s[k] + &dir.ds[k] * ad).collect();
            if all_pd(&new_s).is_some() || ad < 1e-12 {
                break;
            }
            ad *= 0.8;
        }
        if ap < 1e-12 && ad < 1e-12 {
            status = SolveStatus::NumericalFailure;
            break;
        }
        if ap.max(ad) < 1e-6 {
            stalls += 1;
            if stalls >= 5 {
                status = SolveStatus::NumericalFailure;
                break;
            }
        } else {
            stalls = 0;
        }
        x = new_x;
        s = new_s;
        for (zi, d) in z.iter_mut().zip(&dir.dz) {
            *zi += ad * d;
        }
    }

    let decision = red.recover(&z);
    let optimal_value = problem.objective_value(&decision);
    Ok(SdpSolution {
        optimal_value,
        dual_value,
        decision,
        duality_gap: gap,
        iterations,
        status,
        history,
    })
}
