//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runtime budgets are part of each criterion.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slprime_core::analysis::{
    growth_check, order_estimate, partial_sum_primes, partial_sum_spectrum, GROWTH_FD_TOL,
};
use slprime_core::inverse::{objective, search, SearchConfig};
use slprime_core::nonlinear::{nonlinear_spectrum, NonlinearProblem};
use slprime_core::primes::{asymptotic_rows, first_primes};
use slprime_core::spectrum::compute_spectrum;
use slprime_core::{
    BoundaryCondition, CoefficientSet, Complex, Interval, PiecewiseConstant, SLProblem,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn steps(bp: &[f64], vals: &[f64]) -> PiecewiseConstant<f64> {
    PiecewiseConstant::new(bp.to_vec(), vals.to_vec()).unwrap()
}

fn problem(
    bp: &[f64],
    s: &[f64],
    q: &[f64],
    r: &[f64],
    bc: BoundaryCondition<f64>,
) -> SLProblem<f64> {
    let iv = Interval::new(bp[0], *bp.last().unwrap()).unwrap();
    let c = CoefficientSet::new(steps(bp, s), steps(bp, q), steps(bp, r)).unwrap();
    SLProblem::new(iv, c, bc).unwrap()
}

fn dirichlet_constant(q: f64, r: f64) -> SLProblem<f64> {
    SLProblem::constant(0.0, 1.0, 1.0, q, r, BoundaryCondition::dirichlet()).unwrap()
}

fn closed_form_spectra() -> Outcome {
    let mut worst: f64 = 0.0;
    let cases: [(f64, f64, f64); 4] = [
        (0.0, 1.0, 1.0),
        (1.0, 1.0, 1.0),
        (50.0, 1.0, 1.0),
        (0.0, 4.0, 0.25),
    ];
    for (c, r, scale) in cases {
        let s = compute_spectrum(&dirichlet_constant(c, r), 50).map_err(|e| e.to_string())?;
        check(s.len() == 50, || format!("only {} eigenvalues", s.len()))?;
        for e in &s.eigenvalues {
            let n = e.index as f64;
            let exact = n * n * PI * PI * scale + c;
            let err = rel(e.value, exact);
            worst = worst.max(err);
            check(err <= 1e-8, || {
                format!("q={c} r={r} n={}: {} vs {exact}", e.index, e.value)
            })?;
        }
    }
    Ok(format!("max rel err {worst:.1e} over unit, q=1, q=50, r=4"))
}

fn finite_atkinson() -> Outcome {
    let bc = BoundaryCondition::new(0.0, PI / 2.0).unwrap();
    let p = problem(&[0.0, 1.0, 2.0], &[1.0, 0.0], &[0.0, 0.0], &[0.0, 1.0], bc);
    let s = compute_spectrum(&p, 3).map_err(|e| e.to_string())?;
    check(s.len() == 1, || format!("{} eigenvalues", s.len()))?;
    check(rel(s.eigenvalues[0].value, 1.0) < 1e-10, || {
        format!("λ₁ = {}", s.eigenvalues[0].value)
    })?;
    let t = s.truncation.as_ref().ok_or("no truncation recorded")?;
    check(t.at_index == 2, || format!("truncated at {}", t.at_index))?;
    Ok(format!("spectrum {{{}}}, {}", s.eigenvalues[0].value, t))
}

fn weyl_law() -> Outcome {
    let dir = BoundaryCondition::dirichlet();
    let cases = [
        ("r=4 on [0,1]", dirichlet_constant(0.0, 4.0)),
        (
            "two matched layers",
            problem(&[0.0, 0.5, 1.0], &[1.0, 2.0], &[0.0, 0.0], &[1.0, 2.0], dir),
        ),
        (
            "three matched layers, q≠0",
            problem(
                &[0.0, 1.0, 1.5, 2.0],
                &[0.5, 3.0, 1.0],
                &[20.0, -10.0, 5.0],
                &[0.5, 3.0, 1.0],
                dir,
            ),
        ),
        (
            "step in r only",
            problem(&[0.0, 0.3, 1.0], &[1.0, 1.0], &[0.0, 0.0], &[1.0, 9.0], dir),
        ),
    ];
    let mut cs = Vec::new();
    let mut notes = Vec::new();
    for (name, p) in &cases {
        let c = p.weyl_constant();
        let s = compute_spectrum(p, 200).map_err(|e| e.to_string())?;
        let mut ratios: Vec<f64> = s.eigenvalues[99..200]
            .iter()
            .map(|e| e.value / (e.index * e.index) as f64)
            .collect();
        ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = ratios[ratios.len() / 2];
        let reference = PI * PI / (c * c);
        let dev = rel(median, reference);
        check(dev <= 0.01, || {
            format!("{name}: median {median} vs {reference} ({dev:.2e})")
        })?;
        cs.push(c);
        notes.push(format!("C={c:.3} dev={dev:.1e}"));
    }
    cs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    check(cs.len() >= 3, || {
        "fewer than 3 distinct Weyl constants".into()
    })?;
    Ok(notes.join(", "))
}

fn incompatibility() -> Outcome {
    let unit = SLProblem::<f64>::unit_dirichlet();
    let s = compute_spectrum(&unit, 10_000).map_err(|e| e.to_string())?;
    let primes = first_primes(10_000).map_err(|e| e.to_string())?;
    let ratio = |n: usize| primes.nth(n).unwrap() as f64 / s.get(n).unwrap();
    let r = [ratio(100), ratio(1000), ratio(10_000)];
    let detail = format!(
        "p_n/λ_n at 1e2,1e3,1e4 = {:.4e}, {:.4e}, {:.4e}",
        r[0], r[1], r[2]
    );
    check(r[1] < r[0] && r[2] < r[1], || {
        format!("not decreasing: {detail}")
    })?;
    check(r[2] < 1e-4, || {
        format!("{detail}; final ratio not below 1e-4")
    })?;
    Ok(detail)
}

fn nonlinear() -> Outcome {
    let rows =
        nonlinear_spectrum(&NonlinearProblem::<f64>::free(), 10_000).map_err(|e| e.to_string())?;
    check(rows.len() == 10_000, || format!("{} rows", rows.len()))?;
    for n in [1, 2] {
        check(rows[n - 1].lambda.is_none(), || format!("λ_{n} present"))?;
    }
    let mut worst: f64 = 0.0;
    for n in [3usize, 10, 100, 10_000] {
        let l = rows[n - 1].lambda.ok_or_else(|| format!("λ_{n} absent"))?;
        let err = rel(l / l.ln(), n as f64);
        worst = worst.max(err);
        check(err <= 1e-9, || format!("n={n}: λ/log λ = {}", l / l.ln()))?;
    }
    let off = |n: usize| {
        let x = n as f64;
        (rows[n - 1].lambda.unwrap() / (x * x.ln()) - 1.0).abs()
    };
    let (a, b) = (off(1000), off(10_000));
    check(b < a, || {
        format!("|λ/(n log n) - 1|: {a} at 1e3, {b} at 1e4")
    })?;
    Ok(format!(
        "max rel err {worst:.1e}; |λ_n/(n log n) - 1| {a:.4} → {b:.4}"
    ))
}

fn prime_asymptotics() -> Outcome {
    let table = first_primes(1_000_000).map_err(|e| e.to_string())?;
    let decades = asymptotic_rows(&table, &[1000, 10_000, 100_000, 1_000_000]);
    let ratios: Vec<f64> = decades
        .iter()
        .map(|r| r.p as f64 / r.n_log_n.unwrap())
        .collect();
    check(
        ratios.windows(2).all(|w| w[1] < w[0]) && ratios.iter().all(|&x| x > 1.0),
        || format!("p_n/(n log n) = {ratios:?}"),
    )?;
    let sample: Vec<u64> = (0..=60)
        .map(|k| (1e3 * 10f64.powf(k as f64 / 20.0)).round() as u64)
        .collect();
    let mut worst: f64 = 0.0;
    for r in asymptotic_rows(&table, &sample) {
        let (ec, ep) = (r.rel_err_cesaro().unwrap(), r.rel_err_pnt().unwrap());
        worst = worst.max(ec);
        check(ec <= 0.05 && ec < ep, || {
            format!("n={}: cesaro {ec}, n log n {ep}", r.n)
        })?;
    }
    Ok(format!(
        "p_n/(n log n) {:.4} → {:.4}; max Cesàro err {worst:.2e}",
        ratios[0], ratios[3]
    ))
}

fn order_half() -> Outcome {
    let radii = [1e2, 1e3, 1e4, 1e5, 1e6];
    let mut notes = Vec::new();
    for (name, p) in [
        ("unit", SLProblem::<f64>::unit_dirichlet()),
        ("q=50", dirichlet_constant(50.0, 1.0)),
    ] {
        let est = order_estimate(&p, &radii, 16).map_err(|e| e.to_string())?;
        check((0.4..=0.6).contains(&est.slope), || {
            format!("{name}: slope {}", est.slope)
        })?;
        check(!est.low_confidence, || format!("{name}: low confidence"))?;
        notes.push(format!("{name} slope {:.4}", est.slope));
    }
    Ok(notes.join(", "))
}

fn random_step(
    rng: &mut ChaCha8Rng,
    a: f64,
    b: f64,
    lo: f64,
    hi: f64,
    zero_chance: f64,
) -> PiecewiseConstant<f64> {
    let bp = random_mesh(rng, a, b);
    let vals = (1..bp.len())
        .map(|_| {
            if rng.gen_bool(zero_chance) {
                0.0
            } else {
                rng.gen_range(lo..hi)
            }
        })
        .collect();
    PiecewiseConstant::new(bp, vals).unwrap()
}

fn random_mesh(rng: &mut ChaCha8Rng, a: f64, b: f64) -> Vec<f64> {
    let k = rng.gen_range(1..=5);
    let mut inner: Vec<f64> = (0..k).map(|_| rng.gen_range(a..b)).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    inner.dedup();
    let mut bp = vec![a];
    bp.extend(inner.into_iter().filter(|&x| x > a && x < b));
    bp.push(b);
    bp
}

fn growth_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst = f64::INFINITY;
    let mut checks = 0;
    for k in 0..20 {
        let a = rng.gen_range(-1.0..1.0);
        let b = a + rng.gen_range(0.5..3.0);
        let iv = Interval::new(a, b).unwrap();
        let s = random_step(&mut rng, a, b, 0.1, 3.0, 0.15);
        let q = random_step(&mut rng, a, b, -50.0, 50.0, 0.0);
        let r = random_step(&mut rng, a, b, 0.1, 4.0, 0.15);
        let bc = BoundaryCondition::new(rng.gen_range(0.0..PI), rng.gen_range(0.01..PI)).unwrap();
        let p = SLProblem::new(iv, CoefficientSet::new(s, q, r).unwrap(), bc).unwrap();
        for j in 0..6 {
            let m = 10f64.powf(rng.gen_range(0.0..6.0));
            let lambda = match j % 4 {
                0 => Complex::new(m, 0.0),
                1 => Complex::new(0.0, m),
                2 => Complex::new(-m, 0.0),
                _ => Complex::new(0.0, -m),
            };
            let rep = growth_check(&p, lambda, 400).map_err(|e| e.to_string())?;
            worst = worst.min(rep.min_relative_slack);
            checks += 1;
            check(rep.min_relative_slack >= -GROWTH_FD_TOL, || {
                format!(
                    "problem {k}, λ = {lambda}: min slack/bound {}",
                    rep.min_relative_slack
                )
            })?;
        }
    }
    Ok(format!("{checks} checks, min slack/bound {worst:.3e}"))
}

fn series_dichotomy() -> Outcome {
    let primes = partial_sum_primes(0.25, 1_000_000).map_err(|e| e.to_string())?;
    let at = |rows: &[slprime_core::analysis::SeriesCheckpoint], n: usize| {
        rows.iter().find(|c| c.n == n).map(|c| c.sum).unwrap()
    };
    let growth = at(&primes, 1_000_000) / at(&primes, 10_000);
    check(growth >= 2.0, || format!("S(1e6)/S(1e4) = {growth}"))?;
    let model = partial_sum_spectrum(PI * PI, 0.25, 1_000_000).map_err(|e| e.to_string())?;
    let tail = at(&model, 1_000_000) - at(&model, 1000);
    let bound = PI.powf(-1.5) * 10f64.powf(-1.5) / 0.5;
    check(tail <= bound, || {
        format!("model S(1e6) - S(1e3) = {tail} > {bound}")
    })?;
    Ok(format!(
        "prime S(1e6)/S(1e4) = {growth:.4}; model tail {tail:.5} ≤ {bound:.5}"
    ))
}

fn inverse_search() -> Outcome {
    let one = SearchConfig {
        pieces: 1,
        bound: 100.0,
        targets: 1,
        ..Default::default()
    };
    let r1 = search::<f64>(&one).map_err(|e| e.to_string())?;
    check(r1.best_objective < 1e-8, || {
        format!("m=1 N=1 objective {}", r1.best_objective)
    })?;

    let cfg = SearchConfig {
        pieces: 16,
        bound: 200.0,
        targets: 8,
        restarts: 4,
        seed: 42,
        ..Default::default()
    };
    let a = search::<f64>(&cfg).map_err(|e| e.to_string())?;
    let ratio = a.best_objective / a.baseline_objective;
    check(ratio <= 0.5, || format!("best/baseline = {ratio}"))?;
    for (k, t) in a.traces.iter().enumerate() {
        check(
            t.windows(2).all(|w| w[1].objective <= w[0].objective),
            || format!("restart {k} trace increases"),
        )?;
    }
    let again = objective(&a.best_q, cfg.targets).map_err(|e| e.to_string())?;
    check(rel(again, a.best_objective) <= 1e-12, || {
        format!("recomputed objective {again}")
    })?;
    let b = search::<f64>(&cfg).map_err(|e| e.to_string())?;
    check(a == b, || "rerun differs".into())?;
    Ok(format!(
        "m=1 N=1 J={:.1e}; m=16 N=8 J={:.4} baseline {:.4} (ratio {ratio:.3})",
        r1.best_objective, a.best_objective, a.baseline_objective
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "closed-form spectra",
            Duration::from_secs(5),
            closed_form_spectra,
        ),
        (
            "finite Atkinson spectrum",
            Duration::from_secs(1),
            finite_atkinson,
        ),
        ("Weyl law", Duration::from_secs(30), weyl_law),
        (
            "incompatibility p_n/λ_n",
            Duration::from_secs(60),
            incompatibility,
        ),
        ("nonlinear spectrum", Duration::from_secs(5), nonlinear),
        (
            "prime asymptotics",
            Duration::from_secs(30),
            prime_asymptotics,
        ),
        ("order of growth", Duration::from_secs(30), order_half),
        ("growth bound", Duration::from_secs(30), growth_bound),
        (
            "series dichotomy",
            Duration::from_secs(60),
            series_dichotomy,
        ),
        ("inverse search", Duration::from_secs(600), inverse_search),
    ];
    let mut failed = 0;
    for (k, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = f();
        let took = start.elapsed();
        if outcome.is_ok() && took > *budget {
            outcome = Err(format!("took {took:.2?}, budget {budget:?}"));
        }
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{took:.2?}]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{took:.2?}]", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
