//! Batch invariant sweeps behind `ptail validate`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptail_core::bounds::{
    blm_bound, klar_sandwich, log_tail_bounds, short_explicit, short_phi_log_sandwich, short_phi_sandwich,
    thm1_bounds, thm2_bounds, KlarProduct,
};
use ptail_core::compare::{crossovers, sample_curve, Region};
use ptail_core::divergence::{discretize, kl_divergence, Side, TailQuery};
use ptail_core::exact::{
    exact_tail, gamma_median, lemma3_check, poisson_cdf, poisson_log_cdf, poisson_log_pmf, poisson_log_sf,
    poisson_pmf, stirling_interval, upper_incomplete_gamma_reg,
};
use ptail_core::szasz::{remark5_bound, theorem3_bound, Affine, FunctionDescriptor, SzaszProblem, Window};

/// Values of `n` in the tail-bound grid.
pub const TAIL_NS: [u64; 15] = [1, 2, 3, 4, 5, 7, 10, 15, 20, 30, 50, 75, 100, 150, 200];
/// Thresholds per side and `(n, x)` in the tail-bound grid.
pub const THRESHOLDS_PER_SIDE: usize = 8;
pub const DEFAULT_SEED: u64 = 0x5eed_f7a1;

/// Tolerances the sweeps enforce.
pub const IDENTITY_TOLERANCE: f64 = 1e-11;
pub const GAMMA_TOLERANCE: f64 = 1e-12;
pub const MEDIAN_RESIDUAL_TOLERANCE: f64 = 1e-13;
pub const CROSSOVER_TOLERANCE: f64 = 1e-9;

// below this the sweeps compare logarithms instead of values
const LOG_COMPARE_BELOW: f64 = 1e-250;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Tails,
    Lemma3,
    Stirling,
    Identity8,
    Gamma,
    Median,
    Crossovers,
    Szasz,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Tails,
        Suite::Lemma3,
        Suite::Stirling,
        Suite::Identity8,
        Suite::Gamma,
        Suite::Median,
        Suite::Crossovers,
        Suite::Szasz,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::Tails => "tails",
            Suite::Lemma3 => "lemma3",
            Suite::Stirling => "stirling",
            Suite::Identity8 => "identity8",
            Suite::Gamma => "gamma",
            Suite::Median => "median",
            Suite::Crossovers => "crossovers",
            Suite::Szasz => "szasz",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|v| v.id() == s).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|v| v.id()).collect();
            format!("unknown suite '{s}' (expected one of {})", names.join(", "))
        })
    }
}

/// Size knobs; `None` picks the suite's default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    /// Largest `k` (lemma3, stirling, median) or largest `n beta` (crossovers).
    pub kmax: Option<u64>,
    /// Random samples (identity8, gamma), `x` grid points (tails) or curve samples (crossovers).
    pub points: Option<usize>,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { kmax: None, points: None, seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checked: u64,
    pub violations: u64,
    pub first_violation: Option<String>,
    pub metrics: Vec<(&'static str, f64)>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

struct Tally {
    suite: Suite,
    checked: u64,
    violations: u64,
    first: Option<String>,
}

impl Tally {
    fn new(suite: Suite) -> Self {
        Self { suite, checked: 0, violations: 0, first: None }
    }

    fn point(&mut self) {
        self.checked += 1;
    }

    fn expect(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        if !ok {
            self.violations += 1;
            if self.first.is_none() {
                self.first = Some(describe());
            }
        }
    }

    fn finish(self, metrics: Vec<(&'static str, f64)>) -> SuiteReport {
        SuiteReport {
            suite: self.suite,
            checked: self.checked,
            violations: self.violations,
            first_violation: self.first,
            metrics,
        }
    }
}

type SuiteResult = Result<SuiteReport, ptail_core::Error>;

pub fn run(suite: Suite, config: &SuiteConfig) -> SuiteResult {
    match suite {
        Suite::Tails => tails(config.points.unwrap_or(50)),
        Suite::Lemma3 => lemma3(config.kmax.unwrap_or(10_000)),
        Suite::Stirling => stirling(config.kmax.unwrap_or(1_000_000)),
        Suite::Identity8 => identity8(config.points.unwrap_or(1000), config.seed),
        Suite::Gamma => gamma(config.points.unwrap_or(1000), config.seed),
        Suite::Median => median(config.kmax.unwrap_or(10_000)),
        Suite::Crossovers => crossover_sweep(config.kmax.unwrap_or(200), config.points.unwrap_or(500)),
        Suite::Szasz => szasz(),
    }
}

/// The `(n, x, threshold, side)` grid used for the tail-bound sweep:
/// `x` on `points` equispaced values in `(0, 20]`, right thresholds in
/// `(x, x + 10]`, left thresholds spanning `[1/n, x]`.
pub fn tail_grid(points: usize) -> Vec<TailQuery> {
    let mut out = Vec::new();
    for n in TAIL_NS {
        let nf = n as f64;
        for i in 1..=points {
            let x = 20.0 * i as f64 / points as f64;
            for j in 1..=THRESHOLDS_PER_SIDE {
                out.push(TailQuery::right(n, x, x + 10.0 * j as f64 / THRESHOLDS_PER_SIDE as f64));
            }
            if x >= 1.0 / nf {
                for j in 0..THRESHOLDS_PER_SIDE {
                    let a = 1.0 / nf + (x - 1.0 / nf) * j as f64 / (THRESHOLDS_PER_SIDE - 1) as f64;
                    out.push(TailQuery::left(n, x, a.min(x)));
                }
            }
        }
    }
    out
}

fn log_exact(q: &TailQuery) -> Result<f64, ptail_core::Error> {
    let k = discretize(q).grid_index;
    match q.side {
        Side::Right => poisson_log_sf(q.mean(), k),
        Side::Left => poisson_log_cdf(q.mean(), k),
    }
}

fn tails(points: usize) -> SuiteResult {
    let mut t = Tally::new(Suite::Tails);
    let mut upper_margin = f64::INFINITY;
    let mut lower_margin = f64::INFINITY;
    let mut phi_margin = f64::INFINITY;
    let mut phi_points = 0.0;
    let mut log_points = 0.0;
    for q in tail_grid(points) {
        t.point();
        let exact = exact_tail(&q)?;
        let Some(logs) = log_tail_bounds(&q) else {
            t.expect(false, || format!("{q:?}: hypotheses rejected on the grid"));
            continue;
        };
        let log_exact = log_exact(&q)?;
        if exact < LOG_COMPARE_BELOW {
            log_points += 1.0;
        }
        let ok = logs.lower <= logs.lower_sharp && logs.lower_sharp <= log_exact && log_exact <= logs.upper;
        t.expect(ok, || format!("{q:?}: ln bounds {logs:?}, ln exact {log_exact}"));
        upper_margin = upper_margin.min(logs.upper - log_exact);
        lower_margin = lower_margin.min(log_exact - logs.lower_sharp);
        if exact >= LOG_COMPARE_BELOW {
            let thm = if q.side == Side::Right { thm1_bounds(&q) } else { thm2_bounds(&q) };
            let ok = thm.lower.value <= thm.lower_sharp.value
                && thm.lower_sharp.value <= exact
                && exact <= thm.upper.value;
            t.expect(ok, || format!("{q:?}: bounds {thm:?}, exact {exact}"));
        }
        let mut comparators = vec![blm_bound(&q)];
        if q.side == Side::Right {
            comparators.push(short_explicit(&q));
            let k = klar_sandwich(q.n, q.x, q.threshold, 5, KlarProduct::Consecutive);
            comparators.extend([k.lower, k.upper]);
        }
        for c in comparators.into_iter().filter(|c| c.valid && exact >= LOG_COMPARE_BELOW) {
            t.expect(c.respects(exact), || format!("{q:?}: {} = {} vs exact {exact}", c.family.id(), c.value));
        }
        if q.side == Side::Left {
            let pair = short_phi_sandwich(q.n, q.x, q.threshold);
            if pair.lower.valid {
                phi_points += 1.0;
                let (lo, hi) = short_phi_log_sandwich(q.n, q.x, q.threshold).expect("valid pair");
                let strict = if exact >= LOG_COMPARE_BELOW {
                    pair.lower.value < exact && exact < pair.upper.value
                } else {
                    lo < log_exact && log_exact < hi
                };
                t.expect(strict, || format!("{q:?}: short-phi ({}, {}) vs exact {exact}", pair.lower.value, pair.upper.value));
                phi_margin = phi_margin.min((log_exact - lo).min(hi - log_exact));
            }
        }
    }
    Ok(t.finish(vec![
        ("min_log_upper_margin", upper_margin),
        ("min_log_lower_margin", lower_margin),
        ("short_phi_points", phi_points),
        ("min_log_short_phi_margin", phi_margin),
        ("log_compared_points", log_points),
    ]))
}

fn lemma3(kmax: u64) -> SuiteResult {
    let mut t = Tally::new(Suite::Lemma3);
    let mut slack = f64::INFINITY;
    for k in 1..=kmax {
        t.point();
        let c = lemma3_check(k)?;
        t.expect(c.holds(), || format!("k={k}: {c:?}"));
        slack = slack.min(c.slack());
    }
    let first = lemma3_check(1)?;
    let two_over_e = 2.0 / std::f64::consts::E;
    let dev = (first.p_leq - two_over_e).abs().max((first.p_geq - (1.0 - (-1.0f64).exp())).abs());
    t.expect(dev <= 1e-14, || format!("k=1: P(N_1 <= 1) = {} vs 2/e", first.p_leq));
    Ok(t.finish(vec![("min_slack", slack), ("k1_deviation_from_2_over_e", dev)]))
}

/// `k = 1..=min(kmax, 1000)` and 200 log-spaced values up to `kmax`.
pub fn stirling_points(kmax: u64) -> Vec<u64> {
    let mut ks: Vec<u64> = (1..=kmax.min(1000)).collect();
    if kmax > 1000 {
        let (lo, hi) = (1000f64.ln(), (kmax as f64).ln());
        for i in 1..=200 {
            ks.push((lo + (hi - lo) * i as f64 / 200.0).exp().round() as u64);
        }
        ks.dedup();
    }
    ks
}

fn stirling(kmax: u64) -> SuiteResult {
    let mut t = Tally::new(Suite::Stirling);
    let mut margin = f64::INFINITY;
    for k in stirling_points(kmax) {
        t.point();
        let p = poisson_pmf(k as f64, k)?;
        let iv = stirling_interval(k)?;
        t.expect(iv.contains(p), || format!("k={k}: {p} outside [{}, {}]", iv.lower, iv.upper));
        margin = margin.min(((p - iv.lower) / p).min((iv.upper - p) / p));
    }
    Ok(t.finish(vec![("min_relative_margin", margin)]))
}

fn shift_deviation(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).exp_m1().abs()
}

fn identity8(points: usize, seed: u64) -> SuiteResult {
    let mut t = Tally::new(Suite::Identity8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst_right, mut worst_left) = (0.0f64, 0.0f64);
    let mut done = 0;
    while done < points {
        let n: u64 = rng.gen_range(1..=200);
        let nf = n as f64;
        let x: f64 = rng.gen_range(0.05..20.0);
        let m = (nf * x).ceil() as u64 + rng.gen_range(0..400);
        let k: u64 = rng.gen_range(0..200);
        let beta = m as f64 / nf;
        // P(N_{nx} = n beta + k) = P(N_{n beta} = n beta + k) (x/beta)^k e^{-n H(beta, x)}
        let lhs = poisson_log_pmf(nf * x, m + k)?;
        if lhs < -700.0 {
            continue;
        }
        let rhs = poisson_log_pmf(m as f64, m + k)? + k as f64 * (x / beta).ln() - nf * kl_divergence(beta, x)?;
        let dev = shift_deviation(lhs, rhs);
        t.point();
        t.expect(dev < IDENTITY_TOLERANCE, || format!("right n={n} x={x} beta={beta} k={k}: {dev:e}"));
        worst_right = worst_right.max(dev);
        done += 1;
    }
    done = 0;
    while done < points {
        let n: u64 = rng.gen_range(1..=200);
        let nf = n as f64;
        let x: f64 = rng.gen_range(0.05..20.0);
        let top = (nf * x).floor() as u64;
        if top < 1 {
            continue;
        }
        let m = rng.gen_range(1..=top);
        let k = rng.gen_range(0..=m);
        let alpha = m as f64 / nf;
        // P(N_{nx} = n alpha - k) = P(N_{n alpha} = n alpha - k) (alpha/x)^k e^{-n H(alpha, x)}
        let lhs = poisson_log_pmf(nf * x, m - k)?;
        if lhs < -700.0 {
            continue;
        }
        let rhs = poisson_log_pmf(m as f64, m - k)? + k as f64 * (alpha / x).ln() - nf * kl_divergence(alpha, x)?;
        let dev = shift_deviation(lhs, rhs);
        t.point();
        t.expect(dev < IDENTITY_TOLERANCE, || format!("left n={n} x={x} alpha={alpha} k={k}: {dev:e}"));
        worst_left = worst_left.max(dev);
        done += 1;
    }
    Ok(t.finish(vec![("max_relative_deviation_right", worst_right), ("max_relative_deviation_left", worst_left)]))
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn gamma(points: usize, seed: u64) -> SuiteResult {
    let mut t = Tally::new(Suite::Gamma);
    let mut worst = 0.0f64;
    let mut check = |t: &mut Tally, lambda: f64, k: u64| -> Result<(), ptail_core::Error> {
        let c = poisson_cdf(lambda, k)?;
        let g = upper_incomplete_gamma_reg(k, lambda)?;
        if c < 1e-290 && g < 1e-290 {
            return Ok(());
        }
        t.point();
        let dev = relative(c, g);
        t.expect(dev <= GAMMA_TOLERANCE, || format!("lambda={lambda} k={k}: cdf {c} vs gamma {g}"));
        worst = worst.max(dev);
        Ok(())
    };
    let lambdas = [0.1, 0.5, 1.0, 2.5, 7.0, 10.0, 33.3, 100.0, 317.0, 1000.0, 2500.0, 10_000.0];
    let ks = [0u64, 1, 2, 3, 5, 8, 13, 30, 99, 100, 101, 250, 999, 1000, 3000, 9000, 10_000];
    for &l in &lambdas {
        for &k in &ks {
            check(&mut t, l, k)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9a77a);
    for _ in 0..points {
        let lambda = 10f64.powf(rng.gen_range(-1.0..4.0));
        let spread = 6.0 * lambda.sqrt() + 5.0;
        let k = (lambda + rng.gen_range(-spread..spread)).clamp(0.0, 10_000.0) as u64;
        check(&mut t, lambda, k)?;
    }
    Ok(t.finish(vec![("max_relative_deviation", worst)]))
}

fn median(kmax: u64) -> SuiteResult {
    let mut t = Tally::new(Suite::Median);
    let mut worst = 0.0f64;
    for k in 1..=kmax {
        t.point();
        let m = gamma_median(k)?;
        let kf = k as f64;
        let ok = m.lambda_k > kf && m.lambda_k < kf + 1.0 && m.residual.abs() <= MEDIAN_RESIDUAL_TOLERANCE;
        t.expect(ok, || format!("k={k}: {m:?}"));
        worst = worst.max(m.residual.abs());
    }
    Ok(t.finish(vec![("max_abs_residual", worst)]))
}

/// One `b` per lattice value `n beta = m`, using `n = 3`.
pub fn crossover_parameters(max_index: u64) -> impl Iterator<Item = (u64, f64)> {
    (9..=max_index).map(|m| (3, (m as f64 - 0.5) / 3.0))
}

fn crossover_sweep(max_index: u64, samples: usize) -> SuiteResult {
    let mut t = Tally::new(Suite::Crossovers);
    let mut worst = 0.0f64;
    for (n, b) in crossover_parameters(max_index) {
        t.point();
        let set = crossovers(n, b)?;
        t.expect(set.ordering_holds(), || format!("n={n} b={b}: ordering fails {set:?}"));
        let residual = set.z_residual.unwrap_or(f64::INFINITY);
        t.expect(residual <= CROSSOVER_TOLERANCE, || format!("n={n} b={b}: |Q(z_hat) - 1| = {residual:e}"));
        worst = worst.max(residual);
        let (_, rows) = sample_curve(n, b, samples)?;
        let below_ok = rows.iter().filter(|r| r.region == Region::BelowY).all(|r| r.q < 1.0);
        t.expect(below_ok, || format!("n={n} b={b}: Q >= 1 below y_hat"));
        let changes: Vec<usize> =
            (0..rows.len() - 1).filter(|&i| (rows[i].q < 1.0) != (rows[i + 1].q < 1.0)).collect();
        let single = changes.len() == 1 && {
            let i = changes[0];
            rows[i].x <= set.z_hat && set.z_hat <= rows[i + 1].x
        };
        t.expect(single, || format!("n={n} b={b}: sign changes at {changes:?}"));
    }
    Ok(t.finish(vec![("max_z_residual", worst)]))
}

/// Patched-affine problems: `f = l + offset` outside the window.
pub fn szasz_problems() -> Vec<(SzaszProblem, f64)> {
    let mut out = Vec::new();
    for (lo, hi) in [(0.5, 1.5), (0.2, 3.0), (1.0, 1.3), (2.0, 6.0)] {
        for frac in [0.2, 0.5, 0.8] {
            let x = lo + frac * (hi - lo);
            for (slope, intercept, offset) in [(2.0, 1.0, 1.0), (-1.0, 0.5, -3.0), (0.0, 0.0, 0.25)] {
                let window = Window::new(lo, hi).expect("valid window");
                let f = FunctionDescriptor::Patch { base: Affine::new(slope, intercept), offset, window };
                out.push((SzaszProblem::natural(f, x).expect("x inside the window"), f64::abs(offset)));
            }
        }
    }
    out
}

pub const SZASZ_NS: [u64; 6] = [5, 10, 20, 40, 80, 150];
pub const SZASZ_PS: [f64; 3] = [1.5, 2.0, 4.0];

fn szasz() -> SuiteResult {
    let mut t = Tally::new(Suite::Szasz);
    let mut tightest = f64::INFINITY;
    for (p, sup) in szasz_problems() {
        for n in SZASZ_NS {
            if (n as f64 * p.window.lo).floor() < 1.0 {
                continue;
            }
            t.point();
            let (err, _) = p.actual_error(n)?;
            let r5 = remark5_bound(&p, n, sup)?;
            t.expect(err <= r5 * (1.0 + 1e-12), || format!("{p:?} n={n}: error {err} > remark bound {r5}"));
            for q in SZASZ_PS {
                let b = theorem3_bound(&p, n, q)?;
                t.expect(err <= b.bound * (1.0 + 1e-12), || format!("{p:?} n={n} p={q}: error {err} > {}", b.bound));
            }
            if r5 > 0.0 {
                tightest = tightest.min(r5 / err.max(f64::MIN_POSITIVE));
            }
        }
    }
    Ok(t.finish(vec![("min_bound_over_error", tightest)]))
}
