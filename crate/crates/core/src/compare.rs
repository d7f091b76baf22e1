//! Comparison of the right-tail bound `R_n e^{-nH}` with Short's explicit
//! bound on the common domain `0 < x <= beta - 1/n`.
//!
//! For fixed `(n, b)` the landmarks are
//!
//! * `x_hat`: where the `min` inside `R_n` switches branch,
//! * `y_hat`: where `pi n H(beta - 1/n, x) = 1`, i.e. where Short's
//!   denominator switches from `sqrt(4 pi n H)` to 2,
//! * `z_hat`: where the two bounds are equal.
//!
//! With `n beta >= 9` these satisfy `y_hat < z_hat < x_hat < beta - 1/n`.

use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use crate::bounds::{right_prefactor, right_upper_at, short_explicit_at};
use crate::divergence::{divergence, snapped_ceil};
use crate::exact::poisson_sf;
use crate::{Error, Result};

/// Smallest `n beta` for which the landmark ordering is asserted.
pub const ORDERING_MIN_INDEX: u64 = 9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverSet {
    pub n: u64,
    pub b: f64,
    /// `ceil(n b)`
    pub grid_index: u64,
    pub beta: f64,
    pub x_hat: f64,
    pub y_hat: f64,
    pub z_hat: f64,
    /// `beta - 1/n`
    pub beta_hat: f64,
    /// `|Q(z_hat) - 1|` when `z_hat` lies in the branch region its closed
    /// form assumes (`y_hat <= z_hat <= min(x_hat, beta_hat)`).
    pub z_residual: Option<f64>,
}

impl CrossoverSet {
    pub fn ordering_applies(&self) -> bool {
        self.grid_index >= ORDERING_MIN_INDEX
    }

    /// `y_hat < z_hat < x_hat < beta_hat`
    pub fn ordering_holds(&self) -> bool {
        self.y_hat < self.z_hat && self.z_hat < self.x_hat && self.x_hat < self.beta_hat
    }

    pub fn region(&self, x: f64) -> Region {
        if x < self.y_hat {
            Region::BelowY
        } else if x <= self.x_hat {
            Region::YtoX
        } else {
            Region::AboveX
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    BelowY,
    YtoX,
    AboveX,
}

impl Region {
    pub fn id(self) -> &'static str {
        match self {
            Region::BelowY => "below_y",
            Region::YtoX => "y_to_x",
            Region::AboveX => "above_x",
        }
    }

    pub fn from_id(s: &str) -> Option<Self> {
        [Region::BelowY, Region::YtoX, Region::AboveX].into_iter().find(|r| r.id() == s)
    }
}

/// One row of the quotient curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub x: f64,
    pub q: f64,
    pub thm1_upper: f64,
    pub short_upper: f64,
    pub exact_tail: f64,
    pub region: Region,
}

fn grid(n: u64, b: f64) -> Result<(f64, u64, f64)> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1"));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Domain("b must be positive and finite"));
    }
    let m = snapped_ceil(n as f64 * b);
    Ok((n as f64, m as u64, m / n as f64))
}

/// `x_hat = (beta + 1/n) sqrt(2 pi n beta) / (2 + sqrt(2 pi n beta))`.
pub fn x_hat(n: u64, beta: f64) -> f64 {
    let nf = n as f64;
    let root = libm::sqrt(2.0 * PI * nf * beta);
    (beta + 1.0 / nf) * root / (2.0 + root)
}

/// `z_hat = (beta + 1/n) / (1 + e sqrt(2/pi) (m+1) m^{-m-1/2} (m-1)^{m-1})`
/// with `m = n beta`; the powers are combined in log space.
pub fn z_hat(n: u64, grid_index: u64) -> f64 {
    let m = grid_index as f64;
    let log_powers = -(m + 0.5) * libm::log(m)
        + if grid_index > 1 { (m - 1.0) * libm::log(m - 1.0) } else { 0.0 };
    let tail = E * libm::sqrt(2.0 / PI) * (m + 1.0) * libm::exp(log_powers);
    ((m + 1.0) / n as f64) / (1.0 + tail)
}

/// `g(x) = pi n H(beta - 1/n, x)`, strictly decreasing on `(0, beta - 1/n]`.
fn short_switch(n: f64, beta_hat: f64, x: f64) -> f64 {
    PI * n * divergence(beta_hat, x)
}

/// Root of `g(x) = 1` on `(0, beta - 1/n)` by bisection, run until the
/// bracket stops shrinking.
fn y_hat(n: f64, beta_hat: f64) -> Result<f64> {
    let mut lo = beta_hat * 1e-3;
    let mut expansions = 0;
    while short_switch(n, beta_hat, lo) <= 1.0 {
        lo *= 1e-3;
        expansions += 1;
        if expansions > 100 || lo == 0.0 {
            return Err(Error::InternalConsistency("could not bracket y_hat"));
        }
    }
    let mut hi = beta_hat;
    let mut best = (lo, short_switch(n, beta_hat, lo) - 1.0);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = short_switch(n, beta_hat, mid) - 1.0;
        if r.abs() < best.1.abs() {
            best = (mid, r);
        }
        if r > 0.0 {
            lo = mid;
        } else if r < 0.0 {
            hi = mid;
        } else {
            break;
        }
    }
    let r_hi = short_switch(n, beta_hat, hi) - 1.0;
    if r_hi.abs() < best.1.abs() {
        best = (hi, r_hi);
    }
    Ok(best.0)
}

/// Crossover landmarks for fixed `(n, b)`. Requires `ceil(n b) >= 2` so the
/// comparison domain `(0, beta - 1/n)` is non-empty.
pub fn crossovers(n: u64, b: f64) -> Result<CrossoverSet> {
    let (nf, m, beta) = grid(n, b)?;
    if m < 2 {
        return Err(Error::Domain("comparison requires ceil(n b) >= 2"));
    }
    let beta_hat = beta - 1.0 / nf;
    let mut set = CrossoverSet {
        n,
        b,
        grid_index: m,
        beta,
        x_hat: x_hat(n, beta),
        y_hat: y_hat(nf, beta_hat)?,
        z_hat: z_hat(n, m),
        beta_hat,
        z_residual: None,
    };
    if set.y_hat <= set.z_hat && set.z_hat <= set.x_hat.min(beta_hat) {
        let residual = (quotient_at(&set, set.z_hat) - 1.0).abs();
        if residual > 1e-9 {
            return Err(Error::InternalConsistency("closed-form z_hat does not solve Q = 1"));
        }
        set.z_residual = Some(residual);
    }
    Ok(set)
}

/// Right-tail upper bound written with its two explicit branches, split at
/// `x_hat`.
pub fn piecewise_thm1_upper(n: u64, b: f64, x: f64) -> Result<f64> {
    let (nf, _, beta) = grid(n, b)?;
    if !(x > 0.0 && x <= b) {
        return Err(Error::Domain("requires 0 < x <= b"));
    }
    Ok(thm1_branches(nf, beta, x_hat(n, beta), x))
}

fn thm1_branches(n: f64, beta: f64, x_hat: f64, x: f64) -> f64 {
    thm1_prefactor(n, beta, x_hat, x) * libm::exp(-n * divergence(beta, x))
}

fn thm1_prefactor(n: f64, beta: f64, x_hat: f64, x: f64) -> f64 {
    let root = libm::sqrt(2.0 * PI * n * beta);
    if x <= x_hat {
        (x / (beta - x + 1.0 / n) + 1.0) / root
    } else {
        0.5 + 1.0 / root
    }
}

/// Short's explicit bound written with its two branches, split at `y_hat`.
pub fn piecewise_short_upper(n: u64, b: f64, x: f64) -> Result<f64> {
    let (nf, m, beta) = grid(n, b)?;
    let beta_hat = beta - 1.0 / nf;
    if m < 2 || !(x > 0.0 && x <= beta_hat) {
        return Err(Error::Domain("requires 0 < x <= beta - 1/n"));
    }
    Ok(short_branches(nf, beta_hat, y_hat(nf, beta_hat)?, x))
}

fn short_branches(n: f64, beta_hat: f64, y_hat: f64, x: f64) -> f64 {
    short_prefactor(n, beta_hat, y_hat, x) * libm::exp(-n * divergence(beta_hat, x))
}

fn short_prefactor(n: f64, beta_hat: f64, y_hat: f64, x: f64) -> f64 {
    if x <= y_hat {
        1.0 / libm::sqrt(4.0 * PI * n * divergence(beta_hat, x))
    } else {
        0.5
    }
}

// Works with the prefactors and the exponent difference
// n (H(beta, x) - H(beta - 1/n, x)) = ln beta - (m - 1) ln(1 - 1/m) - ln x - 1,
// so the ratio stays finite after both bounds underflow.
fn quotient_at(set: &CrossoverSet, x: f64) -> f64 {
    let n = set.n as f64;
    let m = set.grid_index as f64;
    let gap = libm::log(set.beta) - (m - 1.0) * libm::log1p(-1.0 / m) - libm::log(x) - 1.0;
    thm1_prefactor(n, set.beta, set.x_hat, x) / short_prefactor(n, set.beta_hat, set.y_hat, x) * libm::exp(-gap)
}

/// `Q(x)`: ratio of the right-tail bound to Short's bound, `0 < x <= beta - 1/n`.
pub fn quotient(n: u64, b: f64, x: f64) -> Result<f64> {
    let set = crossovers(n, b)?;
    if !(x > 0.0 && x <= set.beta_hat) {
        return Err(Error::Domain("quotient requires 0 < x <= beta - 1/n"));
    }
    Ok(quotient_at(&set, x))
}

/// `num_samples` rows at `x_i = i (beta - 1/n)/num_samples`, `i = 1..=num_samples`,
/// in ascending `x`.
pub fn sample_curve(n: u64, b: f64, num_samples: usize) -> Result<(CrossoverSet, Vec<CurveSample>)> {
    if num_samples < 2 {
        return Err(Error::Domain("at least two samples are required"));
    }
    let set = crossovers(n, b)?;
    let nf = n as f64;
    let step = set.beta_hat / num_samples as f64;
    let mut rows = Vec::with_capacity(num_samples);
    for i in 1..=num_samples {
        let x = if i == num_samples { set.beta_hat } else { step * i as f64 };
        let thm1_upper = thm1_branches(nf, set.beta, set.x_hat, x);
        let short_upper = short_branches(nf, set.beta_hat, set.y_hat, x);
        rows.push(CurveSample {
            x,
            q: quotient_at(&set, x),
            thm1_upper,
            short_upper,
            exact_tail: poisson_sf(nf * x, set.grid_index)?,
            region: set.region(x),
        });
    }
    Ok((set, rows))
}

/// Direct (unbranched) form of the right-tail bound, for cross-checks.
pub fn thm1_upper_direct(n: u64, b: f64, x: f64) -> Result<f64> {
    let (_, _, beta) = grid(n, b)?;
    if !(x > 0.0 && x <= b) {
        return Err(Error::Domain("requires 0 < x <= b"));
    }
    debug_assert!(right_prefactor(n, x, beta) > 0.0);
    Ok(right_upper_at(n, x, beta))
}

/// Direct (unbranched) form of Short's bound, for cross-checks.
pub fn short_upper_direct(n: u64, b: f64, x: f64) -> Result<f64> {
    let (nf, _, beta) = grid(n, b)?;
    if !(x > 0.0 && x <= beta - 1.0 / nf) {
        return Err(Error::Domain("requires 0 < x <= beta - 1/n"));
    }
    Ok(short_explicit_at(nf, x, beta))
}
