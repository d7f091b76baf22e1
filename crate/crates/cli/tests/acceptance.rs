//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are still evaluated exactly as
//! stated and reported as FAIL; they do not change the exit status. Any
//! other failure does.

use std::process::{Command, ExitCode};
use std::time::Instant;

use ptail::curve_csv::{write_curve, CurveHeader};
use ptail::suites::{self, tail_grid, Suite, SuiteConfig};
use ptail_core::bounds::{log_tail_bounds, short_phi_log_sandwich, short_phi_sandwich, thm1_bounds, thm2_bounds};
use ptail_core::compare::sample_curve;
use ptail_core::divergence::{discretize, kl_divergence, Side, TailQuery};
use ptail_core::exact::{exact_tail, poisson_log_cdf, poisson_log_sf};
use ptail_core::szasz::{
    boundary_rate, fit_exponential_rate, remark5_bound, Affine, FunctionDescriptor, SzaszProblem, Window,
};

/// Criterion 11 asks for exact / (e^{-nH}/sqrt(2 pi n beta)) in [0.8, 1.25] at
/// x = 1, b = 2, n = 1e4. The exact tail behaves like
/// beta/(beta - x) e^{-nH}/sqrt(2 pi n beta), so the ratio tends to 2 there.
const KNOWN_UNATTAINABLE: &[u32] = &[11];

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn log_exact(q: &TailQuery) -> f64 {
    let k = discretize(q).grid_index;
    match q.side {
        Side::Right => poisson_log_sf(q.mean(), k).unwrap(),
        Side::Left => poisson_log_cdf(q.mean(), k).unwrap(),
    }
}

fn criteria_1_and_8() -> (Outcome, Outcome) {
    let start = Instant::now();
    let grid = tail_grid(50);
    let (mut violations, mut phi_points, mut phi_violations) = (0u64, 0u64, 0u64);
    for q in &grid {
        let exact = exact_tail(q).unwrap();
        let le = log_exact(q);
        let logs = log_tail_bounds(q).expect("grid satisfies the hypotheses");
        let log_ok = logs.lower <= logs.lower_sharp && logs.lower_sharp <= le && le <= logs.upper;
        let t = if q.side == Side::Right { thm1_bounds(q) } else { thm2_bounds(q) };
        // subnormal values carry too few digits for a direct comparison
        let ok = exact < 1e-250
            || (t.lower.value <= t.lower_sharp.value && t.lower_sharp.value <= exact && exact <= t.upper.value);
        if !(log_ok && ok) {
            violations += 1;
        }
        if q.side == Side::Left {
            let pair = short_phi_sandwich(q.n, q.x, q.threshold);
            if pair.lower.valid {
                phi_points += 1;
                let strict = if exact > 1e-250 {
                    pair.lower.value < exact && exact < pair.upper.value
                } else {
                    let (lo, hi) = short_phi_log_sandwich(q.n, q.x, q.threshold).unwrap();
                    lo < le && le < hi
                };
                if !strict {
                    phi_violations += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let c1 = Outcome {
        id: 1,
        name: "sandwich soundness",
        pass: grid.len() >= 10_000 && violations == 0 && secs < 60.0,
        detail: format!("{} tuples, {violations} violations, {secs:.2} s", grid.len()),
    };
    let c8 = Outcome {
        id: 8,
        name: "Short normal sandwich strictness",
        pass: phi_points > 0 && phi_violations == 0,
        detail: format!("{phi_points} left-tail points, {phi_violations} violations"),
    };
    (c1, c8)
}

fn from_suite(id: u32, name: &'static str, suite: Suite, config: SuiteConfig, extra: impl Fn(&suites::SuiteReport) -> bool) -> Outcome {
    let r = suites::run(suite, &config).unwrap();
    let metrics: Vec<String> = r.metrics.iter().map(|(k, v)| format!("{k}={v:e}")).collect();
    Outcome {
        id,
        name,
        pass: r.passed() && extra(&r),
        detail: format!("{} checked, {} violations, {}", r.checked, r.violations, metrics.join(" ")),
    }
}

fn criterion_7() -> Outcome {
    let sweep = suites::run(Suite::Crossovers, &SuiteConfig { kmax: Some(200), points: Some(500), ..Default::default() }).unwrap();
    let (set, rows) = sample_curve(3, 3.0, 500).unwrap();
    let mut a = Vec::new();
    write_curve(&mut a, &CurveHeader::from(&set), &rows, 15).unwrap();
    let (set2, rows2) = sample_curve(3, 3.0, 500).unwrap();
    let mut b = Vec::new();
    write_curve(&mut b, &CurveHeader::from(&set2), &rows2, 15).unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_ptail"))
            .args(["compare", "--n", "3", "--b", "3", "--samples", "500"])
            .env_remove("PTAIL_PRECISION")
            .output()
            .unwrap()
            .stdout
    };
    let (c, d) = (run(), run());
    let deterministic = a == b && c == d && a == c;
    Outcome {
        id: 7,
        name: "comparison landmarks and curve",
        pass: sweep.passed() && sweep.checked == 192 && deterministic,
        detail: format!(
            "{} (n, b) pairs, {} violations, max |Q(z_hat) - 1| = {:e}, default dataset deterministic: {deterministic}",
            sweep.checked,
            sweep.violations,
            sweep.metric("max_z_residual").unwrap()
        ),
    }
}

fn criterion_9() -> Outcome {
    let window = Window::new(0.5, 1.5).unwrap();
    let f = FunctionDescriptor::Patch { base: Affine::new(2.0, 1.0), offset: 1.0, window };
    let p = SzaszProblem::natural(f, 1.0).unwrap();
    let (err, _) = p.actual_error(10).unwrap();
    let bound = remark5_bound(&p, 10, 1.0).unwrap();
    let sweep = suites::run(Suite::Szasz, &SuiteConfig::default()).unwrap();
    let close = (err - 0.150_544_435_813_694_6).abs() <= 1e-4 && (bound - 0.195_679_263_504_917_3).abs() <= 1e-4;
    Outcome {
        id: 9,
        name: "pointwise bound on the worked problem",
        pass: close && sweep.passed() && sweep.checked >= 200,
        detail: format!(
            "actual {err:.6}, bound {bound:.6}; sweep {} problems, {} violations",
            sweep.checked, sweep.violations
        ),
    }
}

fn criterion_10() -> Outcome {
    let window = Window::new(0.5, 1.5).unwrap();
    let f = FunctionDescriptor::Patch { base: Affine::new(2.0, 1.0), offset: 1.0, window };
    let p = SzaszProblem::natural(f, 1.0).unwrap();
    let points: Vec<(u64, f64)> = (10..=80).map(|n| (n, p.actual_error(n).unwrap().0)).collect();
    let rate = fit_exponential_rate(&points).unwrap();
    let h = kl_divergence(0.5, 1.0).unwrap().min(kl_divergence(1.5, 1.0).unwrap());
    let boundary = boundary_rate(1.0, 1.0, 10_000).unwrap().ratio();
    Outcome {
        id: 10,
        name: "exponential interior rate, polynomial boundary rate",
        pass: rate >= 0.75 * h && (boundary - 1.0).abs() <= 0.1,
        detail: format!("fitted c = {rate:.5} vs 0.75 min H = {:.5}; boundary ratio at n = 1e4: {boundary:.6}", 0.75 * h),
    }
}

fn criterion_11() -> Outcome {
    let (n, x, b) = (10_000u64, 1.0, 2.0);
    let q = TailQuery::right(n, x, b);
    let beta = discretize(&q).grid_value;
    let nf = n as f64;
    let log_reference = -nf * kl_divergence(beta, x).unwrap() - (2.0 * std::f64::consts::PI * nf * beta).sqrt().ln();
    let ratio = (log_exact(&q) - log_reference).exp();
    let upper_over_exact = (log_tail_bounds(&q).unwrap().upper - log_exact(&q)).exp();
    Outcome {
        id: 11,
        name: "asymptotic sharpness",
        pass: (0.8..=1.25).contains(&ratio),
        detail: format!(
            "exact / (e^(-nH)/sqrt(2 pi n beta)) = {ratio:.6}, required [0.8, 1.25]; beta/(beta - x) = {:.1}; upper bound / exact = {upper_over_exact:.6}",
            beta / (beta - x)
        ),
    }
}

fn main() -> ExitCode {
    let (c1, c8) = criteria_1_and_8();
    let mut outcomes = vec![
        c1,
        from_suite(2, "shift identity", Suite::Identity8, SuiteConfig { points: Some(1000), ..Default::default() }, |r| {
            r.checked >= 2000
        }),
        from_suite(3, "Poisson-gamma cross-check", Suite::Gamma, SuiteConfig::default(), |_| true),
        from_suite(4, "Stirling containment", Suite::Stirling, SuiteConfig { kmax: Some(1_000_000), ..Default::default() }, |r| {
            r.checked >= 1200
        }),
        from_suite(5, "central tails", Suite::Lemma3, SuiteConfig { kmax: Some(10_000), ..Default::default() }, |r| {
            r.checked == 10_000 && r.metric("k1_deviation_from_2_over_e").unwrap() <= 1e-14
        }),
        from_suite(6, "gamma median bracket", Suite::Median, SuiteConfig { kmax: Some(10_000), ..Default::default() }, |r| {
            r.checked == 10_000
        }),
        criterion_7(),
        c8,
        criterion_9(),
        criterion_10(),
        criterion_11(),
    ];
    outcomes.sort_by_key(|o| o.id);
    let mut unexpected = 0;
    for o in &outcomes {
        let status = if o.pass { "PASS" } else { "FAIL" };
        let known = !o.pass && KNOWN_UNATTAINABLE.contains(&o.id);
        let tag = if known { " (known unattainable)" } else { "" };
        println!("criterion {:>2} {status}{tag}: {}: {}", o.id, o.name, o.detail);
        if !o.pass && !known {
            unexpected += 1;
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("{passed}/{} criteria pass, {unexpected} unexpected failures", outcomes.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
