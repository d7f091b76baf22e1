use super::gamma::log_normalizer;
use super::{poisson_cdf, poisson_sf};
use crate::{Error, Result};

/// Robbins' two-sided enclosure of `P(N_k = k)`:
/// `e^{-1/(12k)}/sqrt(2 pi k) <= P(N_k = k) <= e^{-1/(12k+1)}/sqrt(2 pi k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StirlingInterval {
    pub k: u64,
    pub lower: f64,
    pub upper: f64,
}

impl StirlingInterval {
    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

pub fn stirling_interval(k: u64) -> Result<StirlingInterval> {
    if k == 0 {
        return Err(Error::Domain("Stirling interval requires k >= 1"));
    }
    let kf = k as f64;
    let norm = log_normalizer(k);
    Ok(StirlingInterval {
        k,
        lower: libm::exp(-1.0 / (12.0 * kf) + norm),
        upper: libm::exp(-1.0 / (12.0 * kf + 1.0) + norm),
    })
}

/// Both central probabilities of `N_k` and the upper envelope
/// `1/2 + 1/sqrt(2 pi k)` they must respect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma3Check {
    pub k: u64,
    /// `P(N_k >= k)`
    pub p_geq: f64,
    /// `P(N_k <= k)`
    pub p_leq: f64,
    pub bound: f64,
}

impl Lemma3Check {
    pub fn holds(&self) -> bool {
        let lo = self.p_geq.min(self.p_leq);
        let hi = self.p_geq.max(self.p_leq);
        0.5 <= lo && hi <= self.bound
    }

    /// Smallest distance to either side of the envelope (negative on violation).
    pub fn slack(&self) -> f64 {
        let lo = self.p_geq.min(self.p_leq);
        let hi = self.p_geq.max(self.p_leq);
        (lo - 0.5).min(self.bound - hi)
    }
}

pub fn lemma3_check(k: u64) -> Result<Lemma3Check> {
    if k == 0 {
        return Err(Error::Domain("central tail check requires k >= 1"));
    }
    let lambda = k as f64;
    Ok(Lemma3Check {
        k,
        p_geq: poisson_sf(lambda, k)?,
        p_leq: poisson_cdf(lambda, k)?,
        bound: 0.5 + 1.0 / libm::sqrt(2.0 * core::f64::consts::PI * lambda),
    })
}

/// Check used by the interval tests: the saddle-point pmf uses the same
/// normalizer, so containment reduces to `1/(12k+1) <= stirling_error(k) <= 1/(12k)`.
#[cfg(test)]
pub(crate) fn correction_inside(k: u64) -> bool {
    let kf = k as f64;
    let s = super::stirling_error(k);
    1.0 / (12.0 * kf + 1.0) <= s && s <= 1.0 / (12.0 * kf)
}
