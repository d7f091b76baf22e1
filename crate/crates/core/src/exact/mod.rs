//! Numerically exact Poisson probabilities.
//!
//! Everything else in the crate is checked against this module. Tails are
//! always obtained by summing the smaller side directly (compensated, with a
//! geometric majorant deciding where to stop) and complementing only when the
//! complement is at least one half.

mod gamma;
mod stirling;

pub use gamma::{gamma_median, ln_factorial, stirling_error, upper_incomplete_gamma_reg, GammaMedian};
pub use stirling::{lemma3_check, stirling_interval, Lemma3Check, StirlingInterval};

use crate::divergence::{discretize, divergence, Side, TailQuery};
use crate::{Error, NeumaierSum, Result};
use gamma::log_normalizer;

/// Relative size of the dropped remainder at which tail sums stop.
const TRUNCATION: f64 = 1e-17;

fn check_rate(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain("Poisson mean must be positive and finite"))
    }
}

/// `ln P(N_lambda = k) = k ln(lambda) - lambda - ln k!`.
pub fn poisson_log_pmf(lambda: f64, k: u64) -> Result<f64> {
    check_rate(lambda)?;
    Ok(log_pmf(lambda, k))
}

/// Saddle-point form `-stirling_error(k) - H(k, lambda) - ln sqrt(2 pi k)`,
/// free of the large cancelling terms of the textbook expression.
#[inline]
pub(crate) fn log_pmf(lambda: f64, k: u64) -> f64 {
    if k == 0 {
        return -lambda;
    }
    (-stirling_error(k) - divergence(k as f64, lambda)) + log_normalizer(k)
}

#[inline]
pub(crate) fn pmf(lambda: f64, k: u64) -> f64 {
    libm::exp(log_pmf(lambda, k))
}

pub fn poisson_pmf(lambda: f64, k: u64) -> Result<f64> {
    check_rate(lambda)?;
    Ok(pmf(lambda, k))
}

/// Last index needed when summing `pmf(lambda, j)` for `j >= start`.
///
/// Walks the term ratios `lambda/(j+1)` and stops once
/// `term * r / (1 - r)`, which majorizes the rest, is negligible.
fn upper_cutoff(lambda: f64, start: u64) -> u64 {
    let mut term = 1.0;
    let mut acc = 1.0;
    let mut j = start;
    loop {
        let r = lambda / (j as f64 + 1.0);
        if r < 1.0 && term * r / (1.0 - r) < TRUNCATION * acc {
            return j;
        }
        term *= r;
        acc += term;
        j += 1;
    }
}

/// First index needed when summing `pmf(lambda, j)` for `j <= end`.
fn lower_cutoff(lambda: f64, end: u64) -> u64 {
    let mut term = 1.0;
    let mut acc = 1.0;
    let mut j = end;
    while j > 0 {
        let r = j as f64 / lambda;
        if r < 1.0 && term * r / (1.0 - r) < TRUNCATION * acc {
            return j;
        }
        term *= r;
        acc += term;
        j -= 1;
    }
    0
}

/// Sum of `pmf(lambda, j)` over `lo..=hi`, accumulated from the far end.
fn sum_range_descending(lambda: f64, lo: u64, hi: u64) -> f64 {
    let acc: NeumaierSum = (lo..=hi).rev().map(|j| pmf(lambda, j)).collect();
    acc.total()
}

fn sum_range_ascending(lambda: f64, lo: u64, hi: u64) -> f64 {
    let acc: NeumaierSum = (lo..=hi).map(|j| pmf(lambda, j)).collect();
    acc.total()
}

/// `P(N >= k)` summed directly.
fn upper_tail_direct(lambda: f64, k: u64) -> f64 {
    sum_range_descending(lambda, k, upper_cutoff(lambda, k))
}

/// `P(N <= k)` summed directly.
fn lower_tail_direct(lambda: f64, k: u64) -> f64 {
    sum_range_ascending(lambda, lower_cutoff(lambda, k), k)
}

/// `P(N_lambda >= k)`.
pub fn poisson_sf(lambda: f64, k: u64) -> Result<f64> {
    check_rate(lambda)?;
    if k == 0 {
        return Ok(1.0);
    }
    if k as f64 > lambda {
        return Ok(upper_tail_direct(lambda, k));
    }
    let below = lower_tail_direct(lambda, k - 1);
    if below <= 0.5 {
        Ok(1.0 - below)
    } else {
        Ok(upper_tail_direct(lambda, k))
    }
}

/// `P(N_lambda <= k)`.
pub fn poisson_cdf(lambda: f64, k: u64) -> Result<f64> {
    check_rate(lambda)?;
    if (k as f64) < lambda {
        return Ok(lower_tail_direct(lambda, k));
    }
    let above = upper_tail_direct(lambda, k + 1);
    if above <= 0.5 {
        Ok(1.0 - above)
    } else {
        Ok(lower_tail_direct(lambda, k))
    }
}

// ln of sum_{lo..=hi} pmf, scaled by the term at `anchor` so nothing underflows
fn log_sum_range(lambda: f64, lo: u64, hi: u64, anchor: u64) -> f64 {
    let base = log_pmf(lambda, anchor);
    let acc: NeumaierSum = (lo..=hi).map(|j| libm::exp(log_pmf(lambda, j) - base)).collect();
    base + libm::log(acc.total())
}

/// `ln P(N_lambda >= k)`, finite deep in the tail where `poisson_sf` underflows.
pub fn poisson_log_sf(lambda: f64, k: u64) -> Result<f64> {
    check_rate(lambda)?;
    if k as f64 > lambda {
        return Ok(log_sum_range(lambda, k, upper_cutoff(lambda, k), k));
    }
    Ok(libm::log(poisson_sf(lambda, k)?))
}

/// `ln P(N_lambda <= k)`, finite deep in the tail where `poisson_cdf` underflows.
pub fn poisson_log_cdf(lambda: f64, k: u64) -> Result<f64> {
    check_rate(lambda)?;
    if (k as f64) < lambda {
        return Ok(log_sum_range(lambda, lower_cutoff(lambda, k), k, k));
    }
    Ok(libm::log(poisson_cdf(lambda, k)?))
}

/// `P(lo <= N_lambda <= hi)`, summed directly over the window (clipped where
/// the remaining upper tail is negligible).
pub fn poisson_window(lambda: f64, lo: u64, hi: u64) -> Result<f64> {
    check_rate(lambda)?;
    if hi < lo {
        return Ok(0.0);
    }
    let stop = hi.min(upper_cutoff(lambda, lo.max(libm::ceil(lambda) as u64)));
    if stop < lo {
        return Ok(0.0);
    }
    Ok(sum_range_descending(lambda, lo, stop))
}

/// Exact probability of the tail event: `P(N_{nx} >= ceil(n b))` or
/// `P(N_{nx} <= floor(n a))`.
pub fn exact_tail(query: &TailQuery) -> Result<f64> {
    query.check()?;
    let grid = discretize(query);
    match query.side {
        Side::Right => poisson_sf(query.mean(), grid.grid_index),
        Side::Left => poisson_cdf(query.mean(), grid.grid_index),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // brute-force oracle: lambda^k/k! e^{-lambda} by direct product, fine for
    // small arguments
    fn pmf_product(lambda: f64, k: u64) -> f64 {
        let mut v = libm::exp(-lambda);
        for i in 1..=k {
            v *= lambda / i as f64;
        }
        v
    }

    #[test]
    fn log_pmf_examples() {
        assert_eq!(poisson_log_pmf(1.0, 0).unwrap(), -1.0);
        assert_relative_eq!(poisson_pmf(2.0, 2).unwrap(), 0.270_670_566_473_225_38, max_relative = 1e-15);
        assert!(poisson_log_pmf(0.0, 1).is_err());
        assert!(poisson_log_pmf(-2.0, 1).is_err());
        for lambda in [0.3, 1.0, 4.5, 17.0] {
            for k in 0..60 {
                assert_relative_eq!(pmf(lambda, k), pmf_product(lambda, k), max_relative = 2e-14);
            }
        }
    }

    #[test]
    fn pmf_at_large_mean_lies_in_robbins_interval() {
        let p = poisson_pmf(1e5, 100_000).unwrap();
        let iv = stirling_interval(100_000).unwrap();
        assert!(iv.lower <= p && p <= iv.upper);
    }

    #[test]
    fn survival_examples() {
        assert_eq!(poisson_sf(3.0, 0).unwrap(), 1.0);
        assert_relative_eq!(poisson_sf(2.0, 3).unwrap(), 0.323_323_583_816_936_54, max_relative = 1e-14);
        assert_relative_eq!(poisson_sf(10.0, 15).unwrap(), 0.083_458_472_934_662_825, max_relative = 1e-13);
    }

    #[test]
    fn cdf_examples() {
        assert_relative_eq!(poisson_cdf(1.0, 1).unwrap(), 2.0 / core::f64::consts::E, max_relative = 1e-15);
        assert_eq!(poisson_cdf(1e-300, 0).unwrap(), 1.0);
        assert_relative_eq!(poisson_cdf(10.0, 5).unwrap(), 0.067_085_962_879_031_782, max_relative = 1e-14);
        // deep left tail from a 60-digit evaluation
        assert_relative_eq!(poisson_cdf(1e4, 9000).unwrap(), 1.389_635_090_659_424_29e-24, max_relative = 1e-12);
    }

    #[test]
    fn tails_near_the_mode() {
        // 60-digit values of P(N_1e4 >= 1e4) and P(N_1e4 <= 1e4)
        assert_relative_eq!(poisson_sf(1e4, 10_000).unwrap(), 0.501_329_808_339_955_2, max_relative = 1e-13);
        assert_relative_eq!(poisson_cdf(1e4, 10_000).unwrap(), 0.502_659_581_219_007_6, max_relative = 1e-13);
    }

    #[test]
    fn window_matches_tail_for_wide_windows() {
        let w = poisson_window(2.0, 3, u64::MAX).unwrap();
        assert_relative_eq!(w, poisson_sf(2.0, 3).unwrap(), max_relative = 1e-15);
        let w = poisson_window(2.0, 3, 4).unwrap();
        assert_relative_eq!(w, pmf_product(2.0, 3) + pmf_product(2.0, 4), max_relative = 1e-14);
        assert_eq!(poisson_window(2.0, 5, 4).unwrap(), 0.0);
        // window entirely below the mean
        let w = poisson_window(50.0, 0, 40).unwrap();
        assert_relative_eq!(w, poisson_cdf(50.0, 40).unwrap(), max_relative = 1e-13);
    }

    #[test]
    fn exact_tail_dispatches_on_side() {
        let r = exact_tail(&TailQuery::right(10, 1.0, 1.41)).unwrap();
        assert_relative_eq!(r, poisson_sf(10.0, 15).unwrap());
        let l = exact_tail(&TailQuery::left(10, 1.0, 0.59)).unwrap();
        assert_relative_eq!(l, poisson_cdf(10.0, 5).unwrap());
        assert!(exact_tail(&TailQuery::right(0, 1.0, 2.0)).is_err());
    }

    #[test]
    fn log_tails_agree_with_linear_tails() {
        for (lambda, k) in [(600.0, 1), (50.0, 10), (3.0, 20), (10.0, 10), (0.5, 0)] {
            let c = poisson_cdf(lambda, k).unwrap();
            assert_relative_eq!(poisson_log_cdf(lambda, k).unwrap(), libm::log(c), max_relative = 1e-13);
            let s = poisson_sf(lambda, k + 1).unwrap();
            assert_relative_eq!(poisson_log_sf(lambda, k + 1).unwrap(), libm::log(s), max_relative = 1e-13);
        }
        // below the subnormal range: e^{-2000} (1 + 2000)
        let deep = poisson_log_cdf(2000.0, 1).unwrap();
        assert_relative_eq!(deep, -2000.0 + libm::log(2001.0), max_relative = 1e-14);
    }
}
