//! Kullback-Leibler divergence between Poisson laws and the discretization of
//! real tail thresholds onto the lattice `{k/n}`.

use crate::{Error, Result};

/// Which tail of `N_{nx}` a query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `P(N_{nx} <= n a)`
    Left,
    /// `P(N_{nx} >= n b)`
    Right,
}

/// A tail event for a Poisson variable with mean `n * x`.
///
/// Queries violating the hypotheses of the tail bounds are representable; the
/// bound operations flag them instead of rejecting them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailQuery {
    pub n: u64,
    pub x: f64,
    pub threshold: f64,
    pub side: Side,
}

impl TailQuery {
    pub fn right(n: u64, x: f64, b: f64) -> Self {
        Self { n, x, threshold: b, side: Side::Right }
    }

    pub fn left(n: u64, x: f64, a: f64) -> Self {
        Self { n, x, threshold: a, side: Side::Left }
    }

    /// Poisson mean `n * x`.
    #[inline]
    pub fn mean(&self) -> f64 {
        self.n as f64 * self.x
    }

    /// Basic well-formedness: `n >= 1`, `x > 0`, `threshold > 0`, all finite.
    pub fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("n must be at least 1"));
        }
        if !(self.x > 0.0 && self.x.is_finite()) {
            return Err(Error::Domain("x must be positive and finite"));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(Error::Domain("threshold must be positive and finite"));
        }
        Ok(())
    }

    /// Whether the query satisfies the hypotheses of the main tail bounds:
    /// `x <= b` on the right, `1/n <= a <= x` on the left.
    pub fn satisfies_hypotheses(&self) -> bool {
        if self.check().is_err() {
            return false;
        }
        match self.side {
            Side::Right => self.x <= self.threshold,
            Side::Left => {
                self.n as f64 * self.threshold >= 1.0 - SNAP_RELATIVE && self.threshold <= self.x
            }
        }
    }
}

/// A threshold snapped onto the lattice `{k/n}`: ceiling for right tails,
/// floor for left tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretizedThreshold {
    pub raw: f64,
    pub grid_value: f64,
    pub grid_index: u64,
}

const SNAP_RELATIVE: f64 = 1e-9;

/// Snaps `v` to the nearest integer when it is within `1e-9` relative
/// distance, so that `n * b = 15.000000000000002` counts as 15.
#[inline]
fn snap(v: f64) -> f64 {
    let r = libm::round(v);
    if (v - r).abs() <= SNAP_RELATIVE * v.abs() {
        r
    } else {
        v
    }
}

/// `ceil(v)` with integer-boundary snapping.
#[inline]
pub fn snapped_ceil(v: f64) -> f64 {
    libm::ceil(snap(v))
}

/// `floor(v)` with integer-boundary snapping.
#[inline]
pub fn snapped_floor(v: f64) -> f64 {
    libm::floor(snap(v))
}

/// Sign of `k - v` where `k` is an integer, treating `v` within snapping
/// distance of `k` as equal.
#[inline]
pub(crate) fn snapped_sign(k: u64, v: f64) -> f64 {
    let diff = k as f64 - snap(v);
    if diff > 0.0 {
        1.0
    } else if diff < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Maps the query threshold to `beta = ceil(n b)/n` (right) or
/// `alpha = floor(n a)/n` (left).
pub fn discretize(query: &TailQuery) -> DiscretizedThreshold {
    let n = query.n as f64;
    let scaled = n * query.threshold;
    let index = match query.side {
        Side::Right => snapped_ceil(scaled),
        Side::Left => snapped_floor(scaled),
    };
    let index = if index < 0.0 { 0.0 } else { index };
    DiscretizedThreshold {
        raw: query.threshold,
        grid_value: index / n,
        grid_index: index as u64,
    }
}

/// `H(t, x) = t log(t/x) - t + x`, with `H(0, x) = x`.
pub fn kl_divergence(t: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain("H(t, x) requires x > 0"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain("H(t, x) requires t >= 0"));
    }
    Ok(divergence(t, x))
}

/// Unchecked `H(t, x)`; callers guarantee `t >= 0`, `x > 0`.
///
/// Near `t = x` the expression cancels to second order, so there we use the
/// series `H = (t-x) v + 2t sum_{j>=1} v^{2j+1}/(2j+1)` with
/// `v = (t-x)/(t+x)`, which is exact to rounding.
pub(crate) fn divergence(t: f64, x: f64) -> f64 {
    if t == 0.0 {
        return x;
    }
    let d = t - x;
    if d.abs() < 0.1 * (t + x) {
        let v = d / (t + x);
        let v2 = v * v;
        let mut s = d * v;
        let mut term = 2.0 * t * v;
        let mut j = 1u32;
        loop {
            term *= v2;
            let next = s + term / f64::from(2 * j + 1);
            if next == s {
                return next;
            }
            s = next;
            j += 1;
        }
    }
    t * libm::log(t / x) - d
}
