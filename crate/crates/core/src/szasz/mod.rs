//! The Szász-Mirakyan operator `S_n f(x) = E f(N_{nx}/n)` and exponential
//! pointwise-convergence bounds for functions that are affine near `x`.
//!
//! Series truncation is controlled by the crate's own tail bounds: the right
//! cutoff uses the right-tail bound times the target's growth envelope, the
//! left cutoff the left-tail bound.

mod target;

pub use target::{Affine, Envelope, FunctionDescriptor, PiecewiseAffine, Polynomial, Target, Window, MAX_POLY_DEGREE};

use core::f64::consts::{LN_2, PI};

use crate::bounds::{left_prefactor, left_upper_at, right_prefactor, right_upper_at};
use crate::divergence::{divergence, snapped_ceil, snapped_floor};
use crate::exact::pmf;
use crate::{Error, NeumaierSum, Result};
use target::{Deviation, PowerOfDeviation};

/// Default absolute tolerance for the truncated operator series.
pub const DEFAULT_TOLERANCE: f64 = 1e-13;

/// Widest right-hand search range, in lattice points past the mean.
const MAX_SEARCH: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorValue {
    pub value: f64,
    /// First lattice index included in the sum.
    pub first_index: u64,
    /// Terms `k < truncation_index` are summed.
    pub truncation_index: u64,
    /// Rigorous bound on the mass of all omitted terms.
    pub truncation_remainder_bound: f64,
}

/// `sum_{k >= cut} |f(k/n)| P(N = k) <= E(K2/n) [R_n e^{-nH}](cut/n) + E(K2/n) pmf(K2)/(1 - rho)`
/// with `K2 = cut + 40 sqrt(nx)`; `rho` majorizes consecutive term ratios past `K2`.
fn right_remainder(env: &Envelope, n: u64, x: f64, cut: u64) -> f64 {
    if env.scale == 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    let mean = nf * x;
    let span = libm::ceil(40.0 * libm::sqrt(mean)).max(1.0) as u64;
    let far = cut + span;
    let e = env.at(far as f64 / nf);
    let window = e * right_upper_at(n, x, cut as f64 / nf);
    let rho = mean / (far as f64 + 1.0) * libm::pow(1.0 + 1.0 / (nf + far as f64), env.degree);
    if !(rho < 1.0) {
        return f64::INFINITY;
    }
    window + e * pmf(mean, far) / (1.0 - rho)
}

/// `sum_{k < first} |f(k/n)| P(N = k) <= E(first/n) [L_n e^{-nH}]((first-1)/n)`.
fn left_remainder(env: &Envelope, n: u64, x: f64, first: u64) -> f64 {
    if first == 0 || env.scale == 0.0 {
        return 0.0;
    }
    if first < 2 {
        return f64::INFINITY;
    }
    let nf = n as f64;
    env.at(first as f64 / nf) * left_upper_at(n, x, (first - 1) as f64 / nf)
}

fn partial_sum<T: Target + ?Sized>(f: &T, n: u64, x: f64, first: u64, end: u64) -> f64 {
    let nf = n as f64;
    let mean = nf * x;
    let acc: NeumaierSum = (first..end)
        .map(|k| {
            let w = pmf(mean, k);
            if w == 0.0 {
                0.0
            } else {
                f.eval(k as f64 / nf) * w
            }
        })
        .collect();
    acc.total()
}

/// `S_n f(x)` truncated to `first_index..truncation_index`, with the omitted
/// mass bounded by `tolerance`.
pub fn szasz_apply<T: Target + ?Sized>(f: &T, n: u64, x: f64, tolerance: f64) -> Result<OperatorValue> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1"));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain("x must be finite and non-negative"));
    }
    if !(tolerance > 0.0) {
        return Err(Error::Domain("tolerance must be positive"));
    }
    if x == 0.0 {
        return Ok(OperatorValue { value: f.eval(0.0), first_index: 0, truncation_index: 1, truncation_remainder_bound: 0.0 });
    }
    let env = f.envelope();
    let mean = n as f64 * x;
    let half = tolerance / 2.0;

    let start = libm::floor(mean) as u64 + 1;
    let mut cut = start;
    let mut right = right_remainder(&env, n, x, cut);
    while !(right < half) {
        cut += 1;
        if cut - start > MAX_SEARCH {
            return Err(Error::Divergence("operator series cannot be truncated at this tolerance"));
        }
        right = right_remainder(&env, n, x, cut);
    }

    let mut first = libm::floor(mean) as u64;
    let mut left = left_remainder(&env, n, x, first);
    while first > 0 && !(left < half) {
        first -= 1;
        left = if first < 2 { 0.0 } else { left_remainder(&env, n, x, first) };
        if first < 2 {
            first = 0;
        }
    }

    Ok(OperatorValue {
        value: partial_sum(f, n, x, first, cut),
        first_index: first,
        truncation_index: cut,
        truncation_remainder_bound: left + right,
    })
}

/// Sum over an explicit index range, for truncation cross-checks.
pub fn szasz_partial<T: Target + ?Sized>(f: &T, n: u64, x: f64, first: u64, end: u64) -> f64 {
    partial_sum(f, n, x, first, end)
}

/// A target that agrees with an affine reference on an open window, evaluated
/// at an interior point.
#[derive(Debug, Clone, PartialEq)]
pub struct SzaszProblem {
    pub target: FunctionDescriptor,
    pub affine_ref: Affine,
    pub window: Window,
    pub x: f64,
    pub tolerance: f64,
}

impl SzaszProblem {
    /// Checks `x` in the window and `f = l` on 257 sample points of it.
    pub fn new(target: FunctionDescriptor, affine_ref: Affine, window: Window, x: f64) -> Result<Self> {
        if !window.contains(x) {
            return Err(Error::Domain("x must lie inside the window (a, b)"));
        }
        let hi = if window.is_bounded() { window.hi } else { window.lo + 100.0 };
        for i in 1..=257 {
            let t = window.lo + (hi - window.lo) * i as f64 / 258.0;
            let (f, l) = (target.eval(t), affine_ref.eval(t));
            if (f - l).abs() > 1e-12 * (1.0 + l.abs()) {
                return Err(Error::NotLocallyAffine { at: t });
            }
        }
        Ok(Self { target, affine_ref, window, x, tolerance: DEFAULT_TOLERANCE })
    }

    /// Builds the problem from the descriptor's own affine window.
    pub fn natural(target: FunctionDescriptor, x: f64) -> Result<Self> {
        let (l, w) = target
            .natural_reference()
            .ok_or(Error::Unsupported("descriptor has no built-in affine window"))?;
        Self::new(target, l, w, x)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// `|S_n f(x) - f(x)|` and the operator value `S_n f(x)`.
    ///
    /// The error is evaluated as `|S_n (f - l)(x)|`, which is the same
    /// quantity because `S_n` reproduces affine functions and `f(x) = l(x)`,
    /// but does not lose the small difference to cancellation.
    pub fn actual_error(&self, n: u64) -> Result<(f64, OperatorValue)> {
        let v = szasz_apply(&self.target, n, self.x, self.tolerance)?;
        let deviation = Deviation { target: &self.target, reference: self.affine_ref };
        let e = szasz_apply(&deviation, n, self.x, self.tolerance)?;
        Ok((e.value.abs(), v))
    }

    fn lattice(&self, n: u64) -> Result<(f64, Option<f64>)> {
        let nf = n as f64;
        let lo_index = snapped_floor(nf * self.window.lo);
        if lo_index < 1.0 {
            return Err(Error::Domain("requires a >= 1/n"));
        }
        let beta = if self.window.is_bounded() { Some(snapped_ceil(nf * self.window.hi) / nf) } else { None };
        Ok((lo_index / nf, beta))
    }
}

/// The moment-route bound and its ingredients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem3Bound {
    pub bound: f64,
    /// Upper estimate of `(E |f - l|^p (N_{nx}/n))^{1/p}`.
    pub moment: f64,
    pub p: f64,
    pub q: f64,
}

/// `M (L_n^{1/q} e^{-nH(alpha,x)/q} + R_n^{1/q} e^{-nH(beta,x)/q})` with
/// `M = (E|f - l|^p(N_{nx}/n))^{1/p}` and `1/p + 1/q = 1`; bounded windows only.
pub fn theorem3_bound(problem: &SzaszProblem, n: u64, p: f64) -> Result<Theorem3Bound> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain("moment route requires 1 < p < inf"));
    }
    if !problem.window.is_bounded() {
        return Err(Error::Unsupported("moment route is implemented for bounded windows only"));
    }
    let (alpha, beta) = problem.lattice(n)?;
    let beta = beta.unwrap_or(f64::INFINITY);
    let q = p / (p - 1.0);
    let x = problem.x;

    let deviation = PowerOfDeviation {
        target: &problem.target,
        reference: problem.affine_ref,
        base: problem.target.deviation_envelope(&problem.affine_ref),
        p,
    };
    let m = szasz_apply(&deviation, n, x, problem.tolerance)?;
    // stabilization of the truncated moment when the cutoff grows by 25%
    let longer = partial_sum(&deviation, n, x, m.first_index, m.truncation_index + m.truncation_index.div_ceil(4));
    let change = (longer - m.value).abs();
    if change > 1e-10 * m.value.abs() && change > problem.tolerance {
        return Err(Error::MomentDivergence);
    }
    let moment = libm::pow(m.value.max(0.0) + m.truncation_remainder_bound, 1.0 / p);

    let nf = n as f64;
    let left = libm::pow(left_prefactor(n, x, alpha), 1.0 / q) * libm::exp(-nf * divergence(alpha, x) / q);
    let right = libm::pow(right_prefactor(n, x, beta), 1.0 / q) * libm::exp(-nf * divergence(beta, x) / q);
    Ok(Theorem3Bound { bound: moment * (left + right), moment, p, q })
}

/// `||f - l|| (L_n e^{-nH(alpha,x)} + R_n e^{-nH(beta,x)})`, dropping the
/// right term when the window is unbounded.
pub fn remark5_bound(problem: &SzaszProblem, n: u64, sup_norm: f64) -> Result<f64> {
    if !(sup_norm >= 0.0 && sup_norm.is_finite()) {
        return Err(Error::Domain("sup norm must be finite and non-negative"));
    }
    let (alpha, beta) = problem.lattice(n)?;
    let x = problem.x;
    let left = left_upper_at(n, x, alpha);
    let right = beta.map_or(0.0, |beta| right_upper_at(n, x, beta));
    Ok(sup_norm * (left + right))
}

/// Error of the operator at the kink of `(t - a)_-^s` next to its
/// central-limit prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRate {
    /// `S_n f_s(a) - f_s(a)`, a finite sum over `k < n a`.
    pub lhs: f64,
    /// `(a/n)^{s/2} E[Z_-^s]`
    pub rhs: f64,
}

impl BoundaryRate {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

pub fn boundary_rate(a: f64, s: f64, n: u64) -> Result<BoundaryRate> {
    if n == 0 || !(s > 0.0 && s.is_finite()) || !(a.is_finite()) {
        return Err(Error::Domain("boundary rate requires n >= 1, s > 0"));
    }
    let nf = n as f64;
    if snapped_floor(nf * a) < 1.0 {
        return Err(Error::Domain("boundary rate requires a >= 1/n"));
    }
    let mean = nf * a;
    let end = snapped_ceil(mean) as u64;
    let acc: NeumaierSum = (0..end)
        .map(|k| {
            let w = pmf(mean, k);
            if w == 0.0 {
                0.0
            } else {
                libm::pow(a - k as f64 / nf, s) * w
            }
        })
        .collect();
    Ok(BoundaryRate { lhs: acc.total(), rhs: libm::pow(a / nf, s / 2.0) * half_normal_negative_moment(s)? })
}

/// `E[Z_-^s] = 2^{(s-2)/2} Gamma((s+1)/2) / sqrt(pi)` for standard normal `Z`.
pub fn half_normal_negative_moment(s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain("moment order must be positive"));
    }
    let (lg, _) = libm::lgamma_r(0.5 * (s + 1.0));
    Ok(libm::exp(0.5 * (s - 2.0) * LN_2 + lg) / libm::sqrt(PI))
}

/// Least-squares slope of `-ln(error)` against `n`, the measured exponential
/// rate of a sweep. Points with zero error are skipped.
pub fn fit_exponential_rate(points: &[(u64, f64)]) -> Option<f64> {
    let (mut count, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(n, err) in points {
        if !(err > 0.0) {
            continue;
        }
        let (u, v) = (n as f64, -libm::log(err));
        count += 1.0;
        sx += u;
        sy += v;
        sxx += u * u;
        sxy += u * v;
    }
    let denom = count * sxx - sx * sx;
    if count < 2.0 || denom == 0.0 {
        return None;
    }
    Some((count * sxy - sx * sy) / denom)
}
