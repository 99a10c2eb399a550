//! Acceptance suite: one test per criterion, each printing a single
//! `[PASS]` / `[FAIL]` line. Run with `--nocapture` to see the lines.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;
use spinboson::combinatorics::{
    bkar_sides, connecting_terms, count_compatible_pairs, enumerate_forest_selections, enumerate_matchings, labeled_trees,
    partition_join, trees_by_edge_subsets, PerfectMatching,
};
use spinboson::integrator::{brute_force_coefficient, coefficient, Budget, Method, Mode};
use spinboson::jump::{estimate_moment_mc, estimate_z};
use spinboson::quad::{integrate, QuadOptions};
use spinboson::series::{k_constant, lambda_radius, radius_bound};
use spinboson::{Kernel, KernelSpec};

fn unit() -> Kernel {
    Kernel::new(KernelSpec::indicator(1.0)).unwrap()
}

/// Closed-form kernel of the unit indicator form factor.
fn h_exact(s: f64) -> f64 {
    let s = s.abs();
    if s < 1e-4 {
        return 2.0 * PI * (1.0 - 2.0 * s / 3.0 + s * s / 4.0);
    }
    4.0 * PI * (1.0 - (-s).exp() * (1.0 + s)) / (s * s)
}

fn report(id: u32, name: &str, pass: bool, start: Instant, budget: Duration, detail: String) {
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let verdict = if pass && in_time { "PASS" } else { "FAIL" };
    println!(
        "[{verdict}] criterion {id} ({name}): {detail}; {:.1} s of {} s budget",
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    assert!(pass, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded its runtime budget");
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_spinboson"))
        .args(args)
        .env_remove("SPINBOSON_KERNEL")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8"))
}

#[test]
fn criterion_1_kernel_constants() {
    let start = Instant::now();
    let k = unit();
    let e_inf = (k.norm_inf() - 2.0 * PI).abs() / (2.0 * PI);
    let e_l1 = (k.norm_l1() - 8.0 * PI).abs() / (8.0 * PI);
    report(
        1,
        "kernel constants",
        e_inf < 1e-6 && e_l1 < 1e-6,
        start,
        Duration::from_secs(1),
        format!("norm_inf={:.12} (rel err {e_inf:.1e}), norm_l1={:.12} (rel err {e_l1:.1e})", k.norm_inf(), k.norm_l1()),
    );
}

#[test]
fn criterion_2_radius_certificates() {
    let start = Instant::now();
    let expected = 1.0 / (256.0 * PI * 0.5f64.exp());
    let r = radius_bound(&unit()).value();
    let lr = lambda_radius(radius_bound(&unit())).value();
    let (code, out) = cli(&["radius"]);
    let json: Value = serde_json::from_str(&out).unwrap();
    let cli_r = json["R_min"].as_f64().unwrap();
    // leading significant digits
    let digits = |x: f64, n: i32| {
        let e = x.abs().log10().floor() as i32;
        (x / 10f64.powi(e - n + 1)).trunc() as i64
    };
    let r_ok = (r - expected).abs() < 1e-12 * expected && (r * 1e4 * 100.0).round() / 100.0 == 7.54 && cli_r == r && code == 0;
    let lr_ok = digits(lr, 2) == 34 && (lr - 4.0 * PI * expected.sqrt()).abs() < 1e-12;
    report(
        2,
        "radius certificates",
        r_ok && lr_ok,
        start,
        Duration::from_secs(1),
        format!(
            "R_min={r:.6e} (3 s.f. {:.2}e-4), lambda radius={lr:.5} (leading digits 0.{}), K*R_min={:.15}",
            (r * 1e4 * 100.0).round() / 100.0,
            digits(lr, 2),
            k_constant(&unit(), 0.5).unwrap() * r
        ),
    );
}

#[test]
fn criterion_3_moment_suite() {
    use rand::{Rng, SeedableRng};
    let start = Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut passed = 0;
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let q = rng.random_range(1..=6);
        let mut times: Vec<f64> = (0..q).map(|_| rng.random_range(0.05..3.0)).collect();
        times.sort_by(f64::total_cmp);
        let closed = if q % 2 == 1 {
            0.0
        } else {
            (-2.0 * times.chunks(2).map(|c| c[1] - c[0]).sum::<f64>()).exp()
        };
        let est = estimate_moment_mc(&times, 1_000_000, 100 + i).unwrap();
        let z = (est.value - closed).abs() / est.std_error;
        worst = worst.max(z);
        if z <= 3.0 {
            passed += 1;
        }
    }
    report(
        3,
        "moment suite",
        passed >= 18,
        start,
        Duration::from_secs(120),
        format!("{passed}/20 tuples within 3 standard errors, worst |z|={worst:.2}"),
    );
}

#[test]
fn criterion_4_forest_identity() {
    use rand::{Rng, SeedableRng};
    let start = Instant::now();
    let base = PerfectMatching::base(2);
    let disjoint = bkar_sides(&base, &[0.0, 1.0, 2.0, 3.0]).unwrap();
    let overlapping = bkar_sides(&base, &[0.0, 2.0, 1.0, 3.0]).unwrap();
    let analytic = disjoint == (1.0, 1.0) && overlapping == (0.0, 0.0);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    for p in [2, 3] {
        let matchings = enumerate_matchings(p, 4).unwrap();
        for _ in 0..100 {
            let m = &matchings[rng.random_range(0..matchings.len())];
            let t: Vec<f64> = (0..p)
                .flat_map(|_| {
                    let s: f64 = rng.random_range(0.0..2.0);
                    [s, s + rng.random_range(0.05..1.5)]
                })
                .collect();
            let (lhs, rhs) = bkar_sides(m, &t).unwrap();
            worst = worst.max((lhs - rhs).abs());
        }
    }
    report(
        4,
        "forest identity",
        analytic && worst < 1e-8,
        start,
        Duration::from_secs(30),
        format!("analytic p=2 cases exact: {analytic}; max residual over 200 random configurations {worst:.1e}"),
    );
}

#[test]
fn criterion_5_combinatorial_census() {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut pass = true;
    for (p, expected) in [(1usize, 1usize), (2, 3), (3, 15), (4, 105)] {
        let formula = (1..=2 * p).product::<usize>() / (2usize.pow(p as u32) * (1..=p).product::<usize>());
        let matchings = enumerate_matchings(p, 4).unwrap();
        let even = matchings.iter().all(|m| partition_join(m).supports().iter().all(|s| s.len() % 2 == 0));
        let connecting = connecting_terms(p, 4).unwrap().len();
        let filtered: usize = matchings
            .iter()
            .map(|m| {
                let blocks = partition_join(m).len();
                enumerate_forest_selections(m, false).unwrap().iter().filter(|f| f.len() + 1 == blocks).count()
            })
            .sum();
        let per_tree = labeled_trees(p).iter().map(|t| count_compatible_pairs(t, p, 4).unwrap()).max().unwrap();
        let ok = matchings.len() == expected && formula == expected && even && connecting == filtered && per_tree < 4u64.pow(p as u32);
        pass &= ok;
        notes.push(format!("p={p}: {} matchings, {connecting} connecting, per-tree max {per_tree}", matchings.len()));
    }
    for p in 1..=6usize {
        let mut tally = std::collections::HashMap::<Vec<usize>, u64>::new();
        for t in trees_by_edge_subsets(p) {
            let mut d = vec![0usize; p];
            for (a, b) in t {
                d[a] += 1;
                d[b] += 1;
            }
            *tally.entry(d).or_default() += 1;
        }
        for (d, n) in tally {
            let expected = if p == 1 {
                1
            } else {
                let f = |k: usize| (1..=k as u64).product::<u64>();
                d.iter().fold(f(p - 2), |acc, &x| acc / f(x - 1))
            };
            pass &= n == expected;
        }
    }
    notes.push("Cayley degree counts p<=6 verified".into());
    report(5, "combinatorial census", pass, start, Duration::from_secs(60), notes.join("; "));
}

#[test]
fn criterion_6_resummation_identity() {
    let start = Instant::now();
    let k = unit();
    let mut pass = true;
    let mut notes = Vec::new();
    for (i, horizon) in [2.0f64, 5.0].into_iter().enumerate() {
        let seed = 600 + 10 * i as u64;
        let budget = Budget {
            samples: 1_000_000,
            seed,
            rel_tol: 1e-8,
            ..Budget::default()
        };
        let mode = Mode::finite(horizon);
        let c1 = coefficient(1, 2, &k, mode, Method::Quadrature, &budget).unwrap();
        let c2 = coefficient(2, 2, &k, mode, Method::MonteCarlo, &budget).unwrap();
        let z1 = brute_force_coefficient(1, horizon, &k, 1_000_000, seed + 1).unwrap();
        let z2 = brute_force_coefficient(2, horizon, &k, 1_000_000, seed + 2).unwrap();
        let oracle = integrate(|s| (horizon - s) * (-2.0 * s).exp() * h_exact(s), 0.0, horizon, &[], QuadOptions::rel(1e-12)).value;
        let cross = (c1.value - oracle).abs() / oracle;
        let zs1 = (z1.value - c1.value) / z1.statistical_error.hypot(c1.total_error());
        let predicted = c2.value / 2.0 + c1.value * c1.value / 2.0;
        let zs2 = (z2.value - predicted) / z2.statistical_error.hypot(c2.statistical_error / 2.0);
        pass &= cross < 1e-4 && zs1.abs() <= 3.0 && zs2.abs() <= 3.0;
        notes.push(format!("T={horizon}: order 1 z={zs1:.2}, order 2 z={zs2:.2}, quadrature cross-check {cross:.1e}"));
    }
    report(6, "resummation identity", pass, start, Duration::from_secs(600), notes.join("; "));
}

#[test]
fn criterion_7_series_vs_simulation() {
    let start = Instant::now();
    let k = unit();
    let r = radius_bound(&k).value();
    let alpha = r / 2.0;
    let horizon = 30.0;
    let z = estimate_z(alpha, horizon, &k, 1_000_000, 7).unwrap();
    let log_z = z.value.ln();
    let sigma_log = z.std_error / z.value;
    let budget = Budget {
        samples: 1_000_000,
        seed: 70,
        rel_tol: 1e-8,
        ..Budget::default()
    };
    let mode = Mode::finite(horizon);
    let c1 = coefficient(1, 4, &k, mode, Method::Quadrature, &budget).unwrap();
    let c2 = coefficient(2, 4, &k, mode, Method::MonteCarlo, &budget).unwrap();
    let c3 = coefficient(3, 4, &k, mode, Method::MonteCarlo, &budget).unwrap();
    let series = alpha * c1.value + alpha.powi(2) * c2.value / 2.0 + alpha.powi(3) * c3.value / 6.0;
    let sigma_series = (alpha * c1.total_error())
        .hypot(alpha.powi(2) * c2.statistical_error / 2.0)
        .hypot(alpha.powi(3) * c3.statistical_error / 6.0);
    let sigma = sigma_log.hypot(sigma_series);
    // |𝒞_p(T)| / p! ≤ T K^p / p, with K α = 1/2
    let x = k_constant(&k, 0.5).unwrap() * alpha;
    let tail = horizon * ((-(-x).ln_1p()) - x - x * x / 2.0 - x.powi(3) / 3.0);
    let diff = (log_z - series).abs();
    report(
        7,
        "series vs simulation",
        diff <= 3.0 * sigma + tail,
        start,
        Duration::from_secs(900),
        format!("log Z={log_z:.8}, series={series:.8}, |diff|={diff:.2e}, sigma={sigma:.2e} (|diff|/sigma={:.2}), tail={tail:.3e}", diff / sigma),
    );
}

#[test]
fn criterion_8_integrator_self_consistency() {
    let start = Instant::now();
    let k = unit();
    let quad = Budget {
        rel_tol: 1e-8,
        max_intervals: 2000,
        ..Budget::default()
    };
    let mc = Budget {
        samples: 1_000_000,
        seed: 88,
        ..Budget::default()
    };
    let mut pass = true;
    let mut notes = Vec::new();
    for p in [1usize, 2] {
        let q = coefficient(p, 4, &k, Mode::pinned(), Method::Quadrature, &quad).unwrap();
        let m = coefficient(p, 4, &k, Mode::pinned(), Method::MonteCarlo, &mc).unwrap();
        let ok = (q.value - m.value).abs() <= 3.0 * m.statistical_error + 1e-6 * q.value.abs();
        pass &= ok && q.converged;
        notes.push(format!("c{p}: quad {:.8}, mc {:.6}±{:.1e}", q.value, m.value, m.statistical_error));
    }
    let c1_closed = 4.0 * PI * (1.0 - 2.0 * 1.5f64.ln());
    let c1 = coefficient(1, 4, &k, Mode::pinned(), Method::Quadrature, &quad).unwrap().value;
    pass &= (c1 - c1_closed).abs() <= 1e-6 * c1_closed;
    let pinned: Vec<f64> = [0, 1, 2, 3]
        .iter()
        .map(|&point| coefficient(2, 4, &k, Mode::Pinned { point }, Method::Quadrature, &quad).unwrap().value)
        .collect();
    let spread = pinned.iter().map(|v| (v - pinned[0]).abs() / pinned[0].abs()).fold(0.0, f64::max);
    pass &= spread <= 1e-6;
    notes.push(format!("c1 closed form {c1_closed:.8}; c2 over pinned points 0..3 max relative spread {spread:.1e}"));
    report(8, "integrator self-consistency", pass, start, Duration::from_secs(600), notes.join("; "));
}

#[test]
fn criterion_9_determinism() {
    let start = Instant::now();
    let alpha = "0.000377";
    let runs: Vec<Vec<&str>> = vec![
        vec!["simulate", "--alpha", alpha, "--horizon", "10", "--samples", "20000", "--seed", "3"],
        vec!["coefficient", "--p", "2", "--method", "mc", "--budget", "20000", "--seed", "4"],
        vec!["coefficient", "--p", "3", "--finite-t", "5", "--method", "mc", "--budget", "5000", "--seed", "4", "--per-term"],
        vec!["energy", "--alpha", alpha, "--pmax", "3", "--method", "mc", "--budget", "5000", "--seed", "5"],
        vec!["verify", "moments", "--samples", "20000", "--seed", "6", "--tuples", "5"],
        vec!["verify", "bkar", "--p", "3", "--trials", "20", "--seed", "7"],
        vec!["verify", "resummation", "--samples", "20000", "--seed", "8", "--horizon", "2"],
    ];
    let mut identical = 0;
    let mut failures = Vec::new();
    for args in &runs {
        let mut one = vec!["--workers", "1"];
        one.extend(args);
        let mut eight = vec!["--workers", "8"];
        eight.extend(args);
        let (c1, o1) = cli(&one);
        let (c8, o8) = cli(&eight);
        if c1 == c8 && o1 == o8 && !o1.is_empty() {
            identical += 1;
        } else {
            failures.push(args.join(" "));
        }
    }
    report(
        9,
        "determinism",
        failures.is_empty(),
        start,
        Duration::from_secs(600),
        format!("{identical}/{} stochastic subcommands byte-identical with --workers 1 and 8 {failures:?}", runs.len()),
    );
}
