//! Acceptance suite: one PASS/FAIL line per criterion, with pinned tolerances.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use coherence_cli::sweep::default_measures;
use coherence_cli::{sweep, Family, Table};
use coherence_core::coherence::{
    build_cq_state, c_0, c_f, c_g, c_max_routes, c_min, c_min_routes, p_guess_binary,
    ReportOptions, RoofOptions,
};
use coherence_core::entropies::{
    binary_entropy, d_max, d_min, h_max_cond_bipartite, h_min_cond_bipartite, relative_entropy,
    renyi_divergence, ClassicalQuantumState,
};
use coherence_core::linalg::{partial_trace_matrix, random, Subsystem};
use coherence_core::sdp::{solve, LmiBlock, SdpOptions, SdpProblem, SolveStatus};
use coherence_core::{ComplexMatrix, DensityMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sdp() -> SdpOptions {
    SdpOptions::default()
}

fn random_state(d: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let rank = rng.random_range(1..=d);
    random::density_matrix_with_rank(d, rank, rng)
}

fn column(table: &Table, name: &str) -> Vec<f64> {
    let k = table.column(name).expect("column present");
    table.rows.iter().map(|r| r[k]).collect()
}

fn timed_sweep(family: Family) -> Result<(Table, Duration), String> {
    let start = Instant::now();
    let table = sweep(&family, 101, &default_measures(), &ReportOptions::default())
        .map_err(|e| e.to_string())?;
    Ok((table, start.elapsed()))
}

fn criterion_1() -> Check {
    let (table, elapsed) = timed_sweep(Family::PlusMix)?;
    let first = &table.rows[0][1..];
    ensure(first.iter().all(|v| v.abs() <= 1e-7), || {
        format!("nu = 0 row {first:?} exceeds 1e-7")
    })?;
    let last = table.rows.last().unwrap();
    let get = |name: &str| last[table.column(name).unwrap()];
    for name in ["c_max", "c_r", "c_min"] {
        ensure((get(name) - 1.0).abs() <= 1e-6, || {
            format!("{name}(nu = 1) = {}", get(name))
        })?;
    }
    ensure((get("c_g") - 0.5).abs() <= 1e-6, || {
        format!("c_g(nu = 1) = {}", get("c_g"))
    })?;
    ensure(elapsed < Duration::from_secs(5), || {
        format!("sweep took {elapsed:?}")
    })?;
    Ok(format!(
        "nu=0 <= 1e-7, nu=1 within 1e-6; 101-point sweep in {:.2} s (< 5 s)",
        elapsed.as_secs_f64()
    ))
}

fn check_shape(table: &Table, label: &str) -> Result<(), String> {
    let names = ["c_g", "c_min", "c_r", "c_max"];
    let cols: Vec<Vec<f64>> = names.iter().map(|n| column(table, n)).collect();
    for (name, col) in names.iter().zip(&cols) {
        for k in 1..col.len() {
            ensure(col[k] >= col[k - 1] - 1e-7, || {
                format!("{label}: {name} decreases at step {k}")
            })?;
        }
    }
    for w in 0..3 {
        for (k, (lo, hi)) in cols[w].iter().zip(&cols[w + 1]).enumerate() {
            ensure(*lo <= hi + 1e-7, || {
                format!("{label}: {} > {} at row {k}", names[w], names[w + 1])
            })?;
        }
    }
    Ok(())
}

fn criterion_2() -> Check {
    let (qubit, _) = timed_sweep(Family::PlusMix)?;
    check_shape(&qubit, "plus-mix")?;
    let (eight, elapsed) = timed_sweep(Family::Plus3Mix)?;
    check_shape(&eight, "plus3-mix")?;
    ensure(elapsed < Duration::from_secs(600), || {
        format!("d = 8 sweep took {elapsed:?}")
    })?;
    Ok(format!(
        "monotone (1e-7/step) and ordered on both 101-point sweeps; d = 8 sweep in {:.1} s (< 600 s)",
        elapsed.as_secs_f64()
    ))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_min, mut worst_max) = (0.0f64, 0.0f64);
    for trial in 0..200 {
        let rho = random_state(2 + trial % 3, &mut rng);
        let min = c_min_routes(&rho, &sdp()).map_err(|e| e.to_string())?;
        let max = c_max_routes(&rho, &sdp()).map_err(|e| e.to_string())?;
        worst_min = worst_min.max(min.disagreement());
        worst_max = worst_max.max(max.disagreement());
    }
    ensure(worst_min <= 1e-6 && worst_max <= 1e-6, || {
        format!("max route gaps c_min {worst_min:e}, c_max {worst_max:e}")
    })?;
    Ok(format!(
        "200 states: max |direct - conditional| c_min {worst_min:.1e}, c_max {worst_max:.1e} (<= 1e-6)"
    ))
}

/// `ρ_AB` and `ρ_AC` of a pure state on `A ⊗ B ⊗ C`.
fn marginals(psi: &[C64], da: usize, db: usize, dc: usize) -> (DensityMatrix, DensityMatrix) {
    let ab = partial_trace_matrix(&ComplexMatrix::outer(psi), (da * db, dc), Subsystem::A).unwrap();
    let reordered: Vec<C64> = (0..da)
        .flat_map(|a| (0..dc).flat_map(move |c| (0..db).map(move |b| (a, b, c))))
        .map(|(a, b, c)| psi[(a * db + b) * dc + c])
        .collect();
    let ac = partial_trace_matrix(
        &ComplexMatrix::outer(&reordered),
        (da * dc, db),
        Subsystem::A,
    )
    .unwrap();
    (
        DensityMatrix::new(ab.hermitian_part()).unwrap(),
        DensityMatrix::new(ac.hermitian_part()).unwrap(),
    )
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (da, db, dc) = (
            rng.random_range(2..=3),
            rng.random_range(1..=3),
            rng.random_range(1..=3),
        );
        let psi = random::pure_state(da * db * dc, &mut rng);
        let (ab, ac) = marginals(&psi, da, db, dc);
        let hmin = h_min_cond_bipartite(&ab, (da, db), &sdp()).map_err(|e| e.to_string())?;
        let hmax = h_max_cond_bipartite(&ac, (da, dc), &sdp()).map_err(|e| e.to_string())?;
        worst = worst.max((hmin.value + hmax.value).abs());
    }
    ensure(worst <= 1e-6, || format!("max |H_min + H_max| = {worst:e}"))?;
    Ok(format!(
        "100 pure tripartite states: max |H_min(A|B) + H_max(A|C)| = {worst:.1e} (<= 1e-6)"
    ))
}

/// Qubit fidelity `Tr ρσ + 2 √(det ρ det σ)`.
fn qubit_fidelity(rho: &DensityMatrix, t: f64) -> f64 {
    let (a, b, c) = (rho.get(0, 0).re, rho.get(1, 1).re, rho.get(0, 1).norm_sqr());
    let det = (a * b - c).max(0.0);
    a * t + b * (1.0 - t) + 2.0 * (det * t * (1.0 - t)).sqrt()
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_pg, mut worst_grid) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let rho = random_state(2, &mut rng);
        let closed = p_guess_binary(&build_cq_state(&rho)).map_err(|e| e.to_string())?;
        let cmin = c_min(&rho, &sdp()).map_err(|e| e.to_string())?;
        worst_pg = worst_pg.max((cmin + closed.log2()).abs());
        let grid = (0..=100_000)
            .map(|k| qubit_fidelity(&rho, k as f64 * 1e-5))
            .fold(0.0, f64::max);
        let cg = c_g(&rho, &sdp()).map_err(|e| e.to_string())?;
        worst_grid = worst_grid.max((cg - (1.0 - grid)).abs());
    }
    ensure(worst_pg <= 1e-7 && worst_grid <= 1e-4, || {
        format!("trace-norm gap {worst_pg:e}, grid gap {worst_grid:e}")
    })?;
    Ok(format!(
        "200 qubits: |C_min + log2 p_guess| <= {worst_pg:.1e} (1e-7); |C_g - grid| <= {worst_grid:.1e} (1e-4)"
    ))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_incoherent = 0.0f64;
    let mut least_coherent = f64::INFINITY;
    for trial in 0..100 {
        let d = 2 + trial % 3;
        let delta = random::incoherent_state(d, &mut rng);
        worst_incoherent = worst_incoherent.max(c_min(&delta, &sdp()).map_err(|e| e.to_string())?);
        let rho = random_state(d, &mut rng);
        if rho.off_diagonal_mass() > 1e-3 {
            least_coherent = least_coherent.min(c_min(&rho, &sdp()).map_err(|e| e.to_string())?);
        }
    }
    ensure(worst_incoherent <= 1e-7, || {
        format!("incoherent C_min up to {worst_incoherent:e}")
    })?;
    ensure(least_coherent > 0.0, || {
        "coherent state with C_min = 0".into()
    })?;
    let mut worst_convexity = f64::NEG_INFINITY;
    for trial in 0..200 {
        let d = 2 + trial % 3;
        let (a, b) = (random_state(d, &mut rng), random_state(d, &mut rng));
        let p: f64 = rng.random();
        let mixed = c_min(&a.mix(&b, p).unwrap(), &sdp()).map_err(|e| e.to_string())?;
        let avg = p * c_min(&a, &sdp()).map_err(|e| e.to_string())?
            + (1.0 - p) * c_min(&b, &sdp()).map_err(|e| e.to_string())?;
        worst_convexity = worst_convexity.max(mixed - avg);
    }
    ensure(worst_convexity <= 1e-7, || {
        format!("convexity violated by {worst_convexity:e}")
    })?;
    Ok(format!(
        "incoherent C_min <= {worst_incoherent:.1e}; coherent C_min >= {least_coherent:.1e} > 0; \
         200 mixtures: max excess {worst_convexity:.1e} (<= 1e-7)"
    ))
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let slack = 1e-7;
    let orders = [0.5, 0.8, 1.2, 2.0, 5.0];
    for trial in 0..200 {
        let d = 2 + trial % 3;
        let rho = random::density_matrix(d, &mut rng);
        let sigma = random::density_matrix(d, &mut rng);
        let e = |r: coherence_core::Result<f64>| r.map_err(|e| e.to_string());
        let (lo, mid, hi) = (
            e(d_min(&rho, &sigma))?,
            e(relative_entropy(&rho, &sigma))?,
            e(d_max(&rho, &sigma))?,
        );
        ensure(lo <= mid + slack && mid <= hi + slack, || {
            format!("pair {trial}: {lo} {mid} {hi}")
        })?;
        let values = orders
            .iter()
            .map(|&a| e(renyi_divergence(&rho, &sigma, a)))
            .collect::<Result<Vec<_>, _>>()?;
        for w in values.windows(2) {
            ensure(w[0] <= w[1] + slack, || format!("pair {trial}: {values:?}"))?;
        }
        ensure(values[1] <= mid + slack && mid <= values[2] + slack, || {
            format!("pair {trial}: relative entropy {mid} outside {values:?}")
        })?;
    }
    Ok(
        "200 pairs: D_min <= S <= D_max and D_0.5 <= D_0.8 <= D_1.2 <= D_2 <= D_5 (slack 1e-7)"
            .into(),
    )
}

/// Two-element decomposition along the chord through Bloch vector `r` in
/// direction `(θ, φ)`: weights and z-coordinates of the pure endpoints.
fn chord(r: [f64; 3], theta: f64, phi: f64) -> [(f64, f64); 2] {
    let n = [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ];
    let rn: f64 = r.iter().zip(&n).map(|(a, b)| a * b).sum();
    let rr: f64 = r.iter().map(|a| a * a).sum();
    // Grouped so that chords through a diagonal state end exactly on the poles.
    let disc = (1.0 - (rr - rn * rn)).max(0.0).sqrt();
    let (tp, tm) = (-rn + disc, -rn - disc);
    let p = if tp - tm > 0.0 { -tm / (tp - tm) } else { 1.0 };
    [(p, r[2] + tp * n[2]), (1.0 - p, r[2] + tm * n[2])]
}

fn bloch(rho: &DensityMatrix) -> [f64; 3] {
    let c = rho.get(0, 1);
    [2.0 * c.re, -2.0 * c.im, rho.get(0, 0).re - rho.get(1, 1).re]
}

fn chord_grid() -> impl Iterator<Item = (f64, f64)> {
    (0..=90).flat_map(|i| {
        (0..180).map(move |j| {
            (
                std::f64::consts::PI * i as f64 / 90.0,
                std::f64::consts::PI * j as f64 / 90.0,
            )
        })
    })
}

fn oracle_formation(rho: &DensityMatrix) -> f64 {
    let r = bloch(rho);
    let cost = |t: f64, p: f64| -> f64 {
        chord(r, t, p)
            .iter()
            .map(|(w, z)| w * binary_entropy((1.0 + z.clamp(-1.0, 1.0)) / 2.0))
            .sum()
    };
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for (t, p) in chord_grid() {
        let v = cost(t, p);
        if v < best.0 {
            best = (v, t, p);
        }
    }
    let mut step = 0.05;
    while step > 1e-11 {
        let before = best.0;
        for (dt, dp) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let (t, p) = (best.1 + dt * step, best.2 + dp * step);
            let v = cost(t, p);
            if v < best.0 {
                best = (v, t, p);
            }
        }
        if best.0 >= before {
            step *= 0.5;
        }
    }
    best.0
}

fn oracle_rank(rho: &DensityMatrix) -> f64 {
    let r = bloch(rho);
    let log_rank = |z: f64| {
        let amps = [
            ((1.0 + z) / 2.0).max(0.0).sqrt(),
            ((1.0 - z) / 2.0).max(0.0).sqrt(),
        ];
        (amps.iter().filter(|a| **a > 1e-8).count() as f64).log2()
    };
    chord_grid()
        .map(|(t, p)| {
            chord(r, t, p)
                .iter()
                .filter(|(w, _)| *w > 1e-12)
                .map(|(_, z)| log_rank(*z))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let roof = RoofOptions::default();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let rho = random_state(2, &mut rng);
        let est = c_f(&rho, &roof);
        ensure(est.exact, || "qubit C_f not exact".into())?;
        worst = worst.max((est.value - oracle_formation(&rho)).abs());
    }
    ensure(worst <= 1e-5, || format!("C_f oracle gap {worst:e}"))?;
    let mut diagonal = 0;
    for trial in 0..100 {
        let rho = if trial % 2 == 0 {
            diagonal += 1;
            random::incoherent_state(2, &mut rng)
        } else {
            random_state(2, &mut rng)
        };
        let est = c_0(&rho, &roof);
        let expected = if rho.is_diagonal(1e-10) { 0.0 } else { 1.0 };
        ensure(
            est.exact && est.value == expected && oracle_rank(&rho) == expected,
            || format!("C_0 = {} for {:?}", est.value, rho.matrix()),
        )?;
    }
    Ok(format!(
        "100 qubits: |C_f - oracle| <= {worst:.1e} (1e-5); C_0 dichotomy on 100 qubits ({diagonal} diagonal)"
    ))
}

fn criterion_9() -> Check {
    let mut report = Vec::new();
    let check = |name: &str, value: f64, expected: f64, gap: f64, iters: usize, status| {
        ensure(
            status == SolveStatus::Optimal
                && (value - expected).abs() <= 1e-7
                && gap.abs() <= 1e-8 * expected.abs().max(1.0)
                && iters <= 50,
            || format!("{name}: value {value}, gap {gap:e}, {iters} iterations, {status:?}"),
        )
        .map(|_| format!("{name} {iters} it"))
    };

    // minimize t s.t. t I - diag(1, 2) ⪰ 0
    let mut p = SdpProblem::new(1);
    p.set_objective(0, 1.0);
    let mut b = LmiBlock::new(2);
    b.add_constant(0, 0, -1.0);
    b.add_constant(1, 1, -2.0);
    b.add_coefficient(0, 0, 0, 1.0);
    b.add_coefficient(0, 1, 1, 1.0);
    p.add_block(b);
    let s = solve(&p, &sdp()).map_err(|e| e.to_string())?;
    report.push(check(
        "eigenvalue bound",
        s.optimal_value,
        2.0,
        s.duality_gap,
        s.iterations,
        s.status,
    )?);

    // minimize Tr σ s.t. σ ⪰ diag(0.3, 0.7), σ = [[s0, s2], [s2, s1]]
    let mut p = SdpProblem::new(3);
    p.set_objective(0, 1.0);
    p.set_objective(1, 1.0);
    let mut b = LmiBlock::new(2);
    b.add_constant(0, 0, -0.3);
    b.add_constant(1, 1, -0.7);
    b.add_coefficient(0, 0, 0, 1.0);
    b.add_coefficient(1, 1, 1, 1.0);
    b.add_coefficient(2, 0, 1, 1.0);
    p.add_block(b);
    let s = solve(&p, &sdp()).map_err(|e| e.to_string())?;
    report.push(check(
        "trace bound",
        s.optimal_value,
        1.0,
        s.duality_gap,
        s.iterations,
        s.status,
    )?);

    // Guessing program on uniform binary X independent of E.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let e = random::density_matrix(2, &mut rng);
    let cq = ClassicalQuantumState::new(vec![0.5, 0.5], vec![e.clone(), e]).unwrap();
    let h = coherence_core::entropies::h_min_cond(&cq, &sdp()).map_err(|e| e.to_string())?;
    let s = h.solve;
    report.push(check(
        "product cq guessing",
        s.optimal_value,
        0.5,
        s.duality_gap,
        s.iterations,
        s.status,
    )?);
    ensure((h.value - 1.0).abs() <= 1e-7, || {
        format!("H_min = {}", h.value)
    })?;
    Ok(format!(
        "{} (gap <= 1e-8, <= 50 iterations)",
        report.join(", ")
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("plus-mix sweep endpoints", criterion_1),
        ("sweep monotonicity and ordering", criterion_2),
        ("route equivalence", criterion_3),
        ("min/max entropy duality", criterion_4),
        ("qubit guessing and grid oracles", criterion_5),
        ("faithfulness and convexity", criterion_6),
        ("divergence ordering", criterion_7),
        ("qubit convex-roof oracles", criterion_8),
        ("SDP analytic instances", criterion_9),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} [{secs:.1} s]", k + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {}: {name}: {detail} [{secs:.1} s]", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
