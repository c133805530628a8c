//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use inexact_gd::experiments::{table_nesterov_skokov, table_quadratic, table_rosenbrock, CellRow, TableResult};
use inexact_gd::spec::{NoiseKind, Overrides, SolverKind, StopKind};
use inexact_gd_core::problems::{
    LogRegData, LogisticRegression, NesterovSkokov, QuadraticDiag, Rosenbrock, Simple3D,
};
use inexact_gd_core::theory::{
    budget_adaptive, budget_const, budget_no_pl, dist_bound_adaptive, dist_bound_const,
    dist_bounds_no_mu,
};
use inexact_gd_core::{
    gradient_check, run_const_step_gd, sample_unit_sphere, vector, ConstStepConfig, InexactOracle,
    NoiseModel, Objective, RngStream, StopReason, StopRule, TheoryInputs,
};
use nalgebra::DMatrix;

const MU_GRID: [f64; 4] = [0.01, 0.1, 0.9, 0.99];
const DELTA_GRID: [f64; 3] = [1e-7, 1e-4, 1e-1];
const SEEDS: u64 = 5;
const X0_DIST: f64 = 948.7;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn quadratic_grid(solver: SolverKind, stop: StopKind) -> Result<Vec<CellRow>, String> {
    let mut rows = Vec::new();
    for seed in 0..SEEDS {
        let o = Overrides {
            solver: Some(solver),
            stop: Some(stop),
            noise: Some(NoiseKind::Random),
            n: Some(100),
            k: Some(10),
            l: Some(1.0),
            l0: Some(1.0),
            seed: Some(seed),
            trials: Some(1),
            mu_grid: Some(MU_GRID.to_vec()),
            delta_grid: Some(DELTA_GRID.to_vec()),
            ..Default::default()
        };
        let t: TableResult = table_quadratic(&o).map_err(|e| e.to_string())?;
        rows.extend(t.rows);
    }
    Ok(rows)
}

fn label(r: &CellRow) -> String {
    format!("μ={} Δ={:e} seed-trial {}", r.mu.unwrap_or(f64::NAN), r.delta, r.trial)
}

fn criterion_1(rows: &[CellRow]) -> Outcome {
    let mut worst_ratio = 0.0f64;
    let mut worst_n = 0.0f64;
    for r in rows {
        ensure(r.stop_reason == "rule-triggered", || format!("{} did not stop by rule", label(r)))?;
        let mu = r.mu.unwrap();
        let bound = 7.0 * r.delta * r.delta / mu;
        let gap = r.f_gap.unwrap();
        ensure(gap <= bound, || format!("{}: gap {gap:e} > 7Δ²/μ = {bound:e}", label(r)))?;
        let n_star = r.n_star_const.ok_or_else(|| format!("{}: no N*", label(r)))?;
        ensure((r.iterations as u64) < n_star, || format!("{}: N = {} ≥ N* = {n_star}", label(r), r.iterations))?;
        worst_ratio = worst_ratio.max(gap / bound);
        worst_n = worst_n.max(r.iterations as f64 / n_star as f64);
    }
    Ok(format!("{} runs, max gap/(7Δ²/μ) = {worst_ratio:.3}, max N/N* = {worst_n:.3}", rows.len()))
}

fn criterion_2(rows: &[CellRow]) -> Outcome {
    let (l, l0) = (1.0f64, 1.0f64);
    let mut worst_l = 0.0f64;
    let mut worst_calls = 0.0f64;
    for r in rows {
        ensure(r.stop_reason == "rule-triggered", || format!("{} did not stop by rule", label(r)))?;
        let mu = r.mu.unwrap();
        let bound = 5.0 * r.delta * r.delta / mu;
        let gap = r.f_gap.unwrap();
        ensure(gap <= bound, || format!("{}: gap {gap:e} > 5Δ²/μ = {bound:e}", label(r)))?;
        let lmax = r.max_accepted_l.unwrap_or(0.0);
        ensure(lmax <= 2.0 * l + 1e-9, || format!("{}: accepted L_k = {lmax}", label(r)))?;
        let cap = 2.0 * r.iterations as f64 + (2.0 * l / l0).log2();
        let calls = r.candidate_trials as f64;
        ensure(calls <= cap, || format!("{}: I(N) = {calls} > 2N + log₂(2L/L₀) = {cap}", label(r)))?;
        worst_l = worst_l.max(lmax);
        worst_calls = worst_calls.max(calls / cap.max(1.0));
    }
    Ok(format!("{} runs, max L_k = {worst_l}, max I(N)/cap = {worst_calls:.3}", rows.len()))
}

fn criterion_3() -> Outcome {
    let (mu, l, delta) = (0.1, 1.0, 0.01);
    let q = QuadraticDiag::new(vec![mu, l]).map_err(|e| e.to_string())?;
    let mut o = InexactOracle::new(q.clone(), delta, 0.0, NoiseModel::FirstComponentBias, RngStream::new(0, 0))
        .map_err(|e| e.to_string())?;
    let cfg = ConstStepConfig::new(l, vec![1.0, 1.0])
        .with_stop(StopRule::none(10_000))
        .with_keep_iterates(false);
    let run = run_const_step_gd(&mut o, &cfg).map_err(|e| e.to_string())?;
    let x1 = run.x_hat[0];
    let target = delta / mu;
    ensure((0.99 * target..=1.01 * target).contains(&x1), || format!("x⁽¹⁾ = {x1}, Δ/μ = {target}"))?;
    let gap = q.value(&run.x_hat);
    let floor = 0.99 * delta * delta / (2.0 * mu);
    ensure(gap >= floor, || format!("gap {gap:e} < 0.99·Δ²/(2μ) = {floor:e}"))?;
    Ok(format!("x⁽¹⁾/(Δ/μ) = {:.6}, gap/(Δ²/(2μ)) = {:.6}", x1 / target, gap / (delta * delta / (2.0 * mu))))
}

fn criterion_4() -> Outcome {
    let s = Simple3D::new(1.0, 0.1).map_err(|e| e.to_string())?;
    let step_l = s.lipschitz().unwrap();
    let delta = 0.01;
    let budget = 100_000 + (1e3 / (delta / step_l)).ceil() as usize;
    let noise = NoiseModel::constant_last_axis(3).map_err(|e| e.to_string())?;
    let oracle = |seed| InexactOracle::new(s, delta, 0.0, noise.clone(), RngStream::new(seed, 0));

    let mut o = oracle(0).map_err(|e| e.to_string())?;
    let cfg = ConstStepConfig::new(step_l, vec![0.0; 3])
        .with_stop(StopRule::none(budget))
        .with_keep_iterates(false);
    let run = run_const_step_gd(&mut o, &cfg).map_err(|e| e.to_string())?;
    // x₀ = 0, so the distance from x₀ is ‖x_k‖.
    let escape = run.records.iter().find(|r| r.dist_from_x0 > 1e3).map(|r| r.k);
    let k = escape.ok_or_else(|| format!("‖x_k‖ ≤ 10³ for all {budget} iterations"))?;

    let mut o = oracle(1).map_err(|e| e.to_string())?;
    let cfg = ConstStepConfig::new(step_l, vec![0.0; 3]).with_stop(StopRule::const_rule());
    let stopped = run_const_step_gd(&mut o, &cfg).map_err(|e| e.to_string())?;
    ensure(
        stopped.stop_reason == StopReason::RuleTriggered && stopped.iterations() == 0,
        || format!("const-rule run stopped at N = {}", stopped.iterations()),
    )?;
    Ok(format!("‖x_k‖ > 10³ at k = {k} (budget {budget}); const-rule N = 0"))
}

fn criterion_5(rows: &[CellRow]) -> Outcome {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut count = 0;
    for r in rows.iter().filter(|r| r.mu.unwrap() >= 0.1 && r.stop_reason == "rule-triggered") {
        let d0 = r.dist_x0_to_solution.unwrap();
        ensure((d0 - X0_DIST).abs() <= 1e-9 * X0_DIST, || format!("{}: ‖x₀−x*‖ = {d0}", label(r)))?;
        let ratio = r.dist_from_x0 / d0;
        ensure((0.99..=1.001).contains(&ratio), || format!("{} {}: ‖x_N−x₀‖/‖x₀−x*‖ = {ratio}", r.solver, label(r)))?;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        count += 1;
    }
    ensure(count > 0, || "no qualifying runs".into())?;
    Ok(format!("{count} runs, ‖x_N−x₀‖/‖x₀−x*‖ ∈ [{lo:.6}, {hi:.10}]"))
}

fn criterion_6() -> Outcome {
    let noises = vec![NoiseKind::Random, NoiseKind::Antigradient, NoiseKind::Constant];
    let deltas = vec![1e-4, 1e-3, 1e-2];
    let o = Overrides {
        noise_list: Some(noises.clone()),
        delta_grid: Some(deltas.clone()),
        ..Default::default()
    };
    let t = table_rosenbrock(&o).map_err(|e| e.to_string())?;
    let mut worst_dist = 0.0f64;
    let mut worst_gap = 0.0f64;
    for r in &t.rows {
        ensure(r.stop_reason == "rule-triggered", || format!("{} Δ={:e} did not stop", r.noise, r.delta))?;
        ensure(r.dist_from_x0 <= 1.0, || format!("{} Δ={:e}: ‖x_N−x₀‖ = {}", r.noise, r.delta, r.dist_from_x0))?;
        worst_dist = worst_dist.max(r.dist_from_x0);
        if r.delta == 1e-2 {
            let gap = r.f_gap.unwrap();
            ensure(gap <= 2e-3, || format!("{} Δ=1e-2: gap {gap:e}", r.noise))?;
            worst_gap = worst_gap.max(gap);
        }
    }
    for noise in &noises {
        let ns: Vec<usize> = deltas
            .iter()
            .map(|&d| t.rows.iter().find(|r| r.noise == noise.to_string() && r.delta == d).unwrap().iterations)
            .collect();
        ensure(ns.windows(2).all(|w| w[1] <= w[0]), || format!("{noise}: N over Δ = {ns:?}"))?;
    }
    Ok(format!("max ‖x_N−x₀‖ = {worst_dist:.4}, max gap at Δ=1e-2 = {worst_gap:.3e}"))
}

fn criterion_7() -> Outcome {
    let o = Overrides {
        noise: Some(NoiseKind::Random),
        n_grid: Some(vec![3, 5, 7]),
        delta_grid: Some(vec![1e-4, 1e-3, 1e-2]),
        ..Default::default()
    };
    let t = table_nesterov_skokov(&o).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for r in &t.rows {
        ensure(r.dist_from_x0 <= 4.0, || format!("n={} Δ={:e}: ‖x_N−x₀‖ = {}", r.n, r.delta, r.dist_from_x0))?;
        worst = worst.max(r.dist_from_x0);
    }
    let cell = t
        .rows
        .iter()
        .find(|r| r.n == 7 && r.delta == 1e-4)
        .ok_or("missing n=7, Δ=1e-4 cell")?;
    let gap = cell.f_gap.unwrap();
    ensure((0.5..=1.5).contains(&gap), || format!("n=7 Δ=1e-4: gap {gap}"))?;
    ensure(cell.grad_ratio <= 3.0, || format!("n=7 Δ=1e-4: ‖∇f‖/Δ = {}", cell.grad_ratio))?;
    Ok(format!("n=7 Δ=1e-4: gap = {gap:.4}, ‖∇f‖/Δ = {:.3}; max ‖x_N−x₀‖ = {worst:.4}", cell.grad_ratio))
}

fn criterion_8(const_rows: &[CellRow], adaptive_rows: &[CellRow]) -> Outcome {
    let mut count = 0;
    for r in const_rows.iter().chain(adaptive_rows) {
        match r.certificate_ok {
            Some(true) => count += 1,
            Some(false) => {
                return Err(format!(
                    "{} {}: worst violation {:e}",
                    r.solver,
                    label(r),
                    r.worst_violation.unwrap_or(f64::NAN)
                ))
            }
            None => return Err(format!("{} {}: no certificate", r.solver, label(r))),
        }
    }
    Ok(format!("{count} runs certified"))
}

fn random_point(rng: &mut RngStream, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.uniform(-scale, scale)).collect()
}

fn criterion_9() -> Outcome {
    let mut rng = RngStream::new(99, 0);
    let quad = QuadraticDiag::random(100, 10, 0.1, 1.0, &mut rng).map_err(|e| e.to_string())?;
    let data = LogRegData::generate(30, 80, 5, &mut rng).map_err(|e| e.to_string())?;
    let problems: Vec<(&str, Box<dyn Objective>, f64)> = vec![
        ("quadratic", Box::new(quad.clone()), 10.0),
        ("simple3d", Box::new(Simple3D::new(1.0, 0.1).unwrap()), 10.0),
        ("logreg", Box::new(LogisticRegression::new(data)), 2.0),
        ("rosenbrock", Box::new(Rosenbrock), 2.0),
        ("nesterov-skokov", Box::new(NesterovSkokov::new(7).unwrap()), 1.5),
    ];
    let mut worst_fd = 0.0f64;
    for (name, p, scale) in &problems {
        for _ in 0..20 {
            let x = random_point(&mut rng, p.dim(), *scale);
            let e = gradient_check(p.as_ref(), &x).rel_error;
            ensure(e <= 1e-6, || format!("{name}: finite-difference rel. error {e:e}"))?;
            worst_fd = worst_fd.max(e);
        }
    }

    let mut worst_sphere = 0.0f64;
    for dim in [1, 2, 3, 10, 100, 1000] {
        for _ in 0..1000 {
            let u = sample_unit_sphere(dim, &mut rng).map_err(|e| e.to_string())?;
            worst_sphere = worst_sphere.max((vector::norm(&u) - 1.0).abs());
        }
    }
    ensure(worst_sphere <= 1e-12, || format!("sphere sample norm off by {worst_sphere:e}"))?;

    let delta = 0.05;
    let mut worst_oracle = 0.0f64;
    for model in [NoiseModel::RandomSphere, NoiseModel::Antigradient, NoiseModel::FirstComponentBias, NoiseModel::constant(&[1.0; 100]).unwrap()] {
        let name = model.name();
        let mut o = InexactOracle::new(quad.clone(), delta, 0.0, model, RngStream::new(7, 1)).map_err(|e| e.to_string())?;
        for _ in 0..10_000 {
            let x = random_point(&mut rng, 100, 10.0);
            let s = o.query_gradient(&x).map_err(|e| e.to_string())?;
            let d = vector::dist(&s.exact, &s.inexact);
            ensure(d <= delta, || format!("{name}: ‖∇f − ∇̃f‖ = {d:e} > Δ"))?;
            worst_oracle = worst_oracle.max(d / delta);
        }
    }

    let mut worst_minor = 0.0f64;
    for n in 2..=8usize {
        let ns = NesterovSkokov::new(n).unwrap();
        for _ in 0..100 {
            let x = random_point(&mut rng, n, 1.0);
            let (a, b) = ns.jjt_tridiagonal(&x);
            let m = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
                0 => a[i],
                1 => b[i.min(j)],
                _ => 0.0,
            });
            for (k, fk) in ns.minor_sequence(&x).iter().enumerate() {
                let det = m.view((0, 0), (k + 1, k + 1)).determinant();
                let e = ((fk - det) / det).abs();
                ensure(e <= 1e-8, || format!("n={n} minor {}: recursion {fk:e} vs det {det:e}", k + 1))?;
                worst_minor = worst_minor.max(e);
            }
        }
    }
    Ok(format!(
        "fd {worst_fd:.1e}, sphere {worst_sphere:.1e}, ‖∇f−∇̃f‖/Δ ≤ {worst_oracle:.15}, minors {worst_minor:.1e}"
    ))
}

const BOUNDS_REFERENCE: &str = include_str!("../../core/tests/data/bounds_reference.csv");

fn criterion_10() -> Outcome {
    let rel = |got: f64, want: f64| if want == 0.0 { got.abs() } else { ((got - want) / want).abs() };
    let mut worst = 0.0f64;
    let mut rows = 0;
    for (i, line) in BOUNDS_REFERENCE.lines().skip(1).filter(|l| !l.trim().is_empty()).enumerate() {
        let c: Vec<&str> = line.split(',').collect();
        let f = |j: usize| c[j].parse::<f64>().unwrap();
        let inp = TheoryInputs::new(f(0), f(2), f(3)).with_mu(f(1)).with_l_min(f(4));
        let err = |e: inexact_gd_core::TheoryError| format!("row {i}: {e}");
        ensure(budget_const(&inp).map_err(err)?.to_string() == c[6], || format!("row {i}: budget_const"))?;
        ensure(budget_adaptive(&inp).map_err(err)?.to_string() == c[7], || format!("row {i}: budget_adaptive"))?;
        let (da, db) = dist_bound_adaptive(&inp).map_err(err)?;
        let (na, nb) = dist_bounds_no_mu(&inp, f(5)).map_err(err)?;
        let n_cap = budget_no_pl(&inp).map_err(err)?;
        let (ia, ib) = dist_bounds_no_mu(&inp, n_cap).map_err(err)?;
        let checks = [
            ("dist_bound_const", dist_bound_const(&inp).map_err(err)?, f(8)),
            ("dist_bound_adaptive", da, f(9)),
            ("dist_bound_adaptive (budget)", db, f(10)),
            ("dist_bounds_no_mu (a)", na, f(11)),
            ("dist_bounds_no_mu (b)", nb, f(12)),
            ("budget_no_pl", n_cap, f(13)),
            ("(b) = (a) at budget_no_pl", ib, ia),
        ];
        for (name, got, want) in checks {
            let e = rel(got, want);
            ensure(e <= 1e-12, || format!("row {i} {name}: {got:e} vs {want:e} (rel {e:e})"))?;
            worst = worst.max(e);
        }
        rows += 1;
    }
    ensure(rows == 100, || format!("expected 100 reference rows, found {rows}"))?;
    Ok(format!("{rows} rows, worst rel. error {worst:.1e}"))
}

fn report(id: u32, title: &str, took: Duration, outcome: Outcome) -> bool {
    let secs = took.as_secs_f64();
    match outcome {
        Ok(detail) => {
            println!("[PASS] {id:>2}. {title} ({secs:.2} s): {detail}");
            true
        }
        Err(why) => {
            println!("[FAIL] {id:>2}. {title} ({secs:.2} s): {why}");
            false
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn main() -> ExitCode {
    let mut ok = true;

    let (const_rows, const_time) = timed(|| quadratic_grid(SolverKind::Const, StopKind::ConstRule));
    let (adaptive_rows, adaptive_time) =
        timed(|| quadratic_grid(SolverKind::Adaptive, StopKind::AdaptiveRule));

    // Criteria 1 and 2 are charged for the grid runs they consume.
    let (c1, t) = timed(|| const_rows.as_deref().map_err(Clone::clone).and_then(criterion_1));
    ok &= report(1, "stopping-rule quality, constant step", const_time + t, c1);
    let (c2, t) = timed(|| adaptive_rows.as_deref().map_err(Clone::clone).and_then(criterion_2));
    ok &= report(2, "stopping-rule quality, adaptive step", adaptive_time + t, c2);

    let (c3, t) = timed(criterion_3);
    ok &= report(3, "lower-bound floor under biased noise", t, c3);
    let (c4, t) = timed(criterion_4);
    ok &= report(4, "divergence without the rule, early stop with it", t, c4);

    let (c5, t) = timed(|| match (&const_rows, &adaptive_rows) {
        (Ok(c), Ok(a)) => criterion_5(&[c.as_slice(), a.as_slice()].concat()),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    });
    ok &= report(5, "distance comparable to ‖x₀ − x*‖", t, c5);

    let (c6, t) = timed(criterion_6);
    ok &= report(6, "Rosenbrock table properties", t, c6);
    let (c7, t) = timed(criterion_7);
    ok &= report(7, "Nesterov–Skokov plateau and drift", t, c7);

    let (c8, t) = timed(|| match (&const_rows, &adaptive_rows) {
        (Ok(c), Ok(a)) => criterion_8(c, a),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    });
    ok &= report(8, "certificate replay on criteria 1 and 2 runs", t, c8);

    let (c9, t) = timed(criterion_9);
    ok &= report(9, "oracle and gradient properties", t, c9);
    let (c10, t) = timed(criterion_10);
    ok &= report(10, "bound formulas against high-precision reference", t, c10);

    if ok {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
