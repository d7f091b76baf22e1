//! Log-factorials, the regularized upper incomplete gamma integral and the
//! median of the `Gamma(k+1, 1)` law.

use crate::divergence::divergence;
use crate::{Error, Result, LN_SQRT_2PI};

/// `ln k! - [(k + 1/2) ln k - k + ln sqrt(2 pi)]` for `k = 1..=19`.
const STIRLING_ERROR_TABLE: [f64; 19] = [
    0.081_061_466_795_327_258_22,
    0.041_340_695_955_409_294_094,
    0.027_677_925_684_998_339_149,
    0.020_790_672_103_765_093_112,
    0.016_644_691_189_821_192_163,
    0.013_876_128_823_070_747_999,
    0.011_896_709_945_891_770_095,
    0.010_411_265_261_972_096_497,
    0.009_255_462_182_712_732_917_7,
    0.008_330_563_433_362_871_256_5,
    0.007_573_675_487_951_840_795,
    0.006_942_840_107_209_529_865_7,
    0.006_408_994_188_004_207_068_4,
    0.005_951_370_112_758_847_735_6,
    0.005_554_733_551_962_801_371,
    0.005_207_655_919_609_640_440_7,
    0.004_901_395_948_434_737_860_7,
    0.004_629_153_749_334_028_592_4,
    0.004_385_560_249_232_324_268_3,
];

/// Error of Stirling's formula for `ln k!`, `k >= 1`.
///
/// Table lookup below 20, five-term asymptotic series above; the next omitted
/// term is below `1e-17`.
pub fn stirling_error(k: u64) -> f64 {
    debug_assert!(k >= 1);
    if k < 20 {
        return STIRLING_ERROR_TABLE[(k - 1) as usize];
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let kf = k as f64;
    let k2 = kf * kf;
    (S0 - (S1 - (S2 - (S3 - S4 / k2) / k2) / k2) / k2) / kf
}

/// `-ln sqrt(2 pi k)`, the normalizer shared by the pmf and the Robbins
/// interval so both round identically.
#[inline]
pub(crate) fn log_normalizer(k: u64) -> f64 {
    -(LN_SQRT_2PI + 0.5 * libm::log(k as f64))
}

const FACTORIALS: [f64; 20] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
];

/// `ln k!`: exact factorials below 20, Stirling series above.
pub fn ln_factorial(k: u64) -> f64 {
    if k < 20 {
        return libm::log(FACTORIALS[k as usize]);
    }
    let kf = k as f64;
    (kf + 0.5) * libm::log(kf) - kf + LN_SQRT_2PI + stirling_error(k)
}

/// `x^a e^{-x} / a!` for integer `a >= 1`, evaluated through the
/// saddle-point form so large `a` loses no digits to cancellation.
fn gamma_kernel(a: u64, x: f64) -> f64 {
    libm::exp(-stirling_error(a) - divergence(a as f64, x) + log_normalizer(a))
}

const MAX_ITER: usize = 1_000_000;
const TINY: f64 = 1e-300;

/// `int_lambda^inf u^k e^{-u} / k! du`, the regularized upper incomplete
/// gamma function `Q(k+1, lambda)`.
///
/// Series for the lower integral when `lambda < k + 2`, Lentz continued
/// fraction for the upper integral otherwise, so the returned value never
/// comes from a cancelling complement of a quantity near one.
pub fn upper_incomplete_gamma_reg(k: u64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain("incomplete gamma requires lambda > 0"));
    }
    let a = k + 1;
    let af = a as f64;
    if lambda < af + 1.0 {
        // P(a, x) = x^a e^{-x}/a! * sum_{j>=0} x^j / ((a+1)...(a+j))
        let kernel = gamma_kernel(a, lambda);
        if kernel == 0.0 {
            return Ok(1.0);
        }
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut denom = af;
        for _ in 0..MAX_ITER {
            denom += 1.0;
            term *= lambda / denom;
            sum += term;
            if term < sum * 1e-17 {
                return Ok(1.0 - kernel * sum);
            }
        }
        Err(Error::Divergence("incomplete gamma series"))
    } else {
        // Q(a, x) = x^a e^{-x}/Gamma(a) * 1/(x+1-a- 1(1-a)/(x+3-a- ...))
        let mut b = lambda + 1.0 - af;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            let an = -fi * (fi - af);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                return Ok(af * gamma_kernel(a, lambda) * h);
            }
        }
        Err(Error::Divergence("incomplete gamma continued fraction"))
    }
}

/// The median `lambda_k` of `Gamma(k+1, 1)`, which lies in `(k, k+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaMedian {
    pub k: u64,
    pub lambda_k: f64,
    /// `upper_incomplete_gamma_reg(k, lambda_k) - 1/2`
    pub residual: f64,
}

impl GammaMedian {
    pub fn bracket(&self) -> (f64, f64) {
        (self.k as f64, self.k as f64 + 1.0)
    }
}

/// Bisection for `Q(k+1, lambda) = 1/2` on `(k, k+1)`.
pub fn gamma_median(k: u64) -> Result<GammaMedian> {
    if k == 0 {
        return Err(Error::Domain("gamma median requires k >= 1"));
    }
    let resid = |l: f64| upper_incomplete_gamma_reg(k, l).map(|q| q - 0.5);
    let mut lo = k as f64;
    let mut hi = lo + 1.0;
    let (r_lo, r_hi) = (resid(lo)?, resid(hi)?);
    // Q(k+1, .) is decreasing: positive at k, negative at k+1
    if !(r_lo > 0.0 && r_hi < 0.0) {
        return Err(Error::InternalConsistency("median not bracketed by (k, k+1)"));
    }
    let mut best = if r_lo.abs() < r_hi.abs() { (lo, r_lo) } else { (hi, r_hi) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = resid(mid)?;
        if r.abs() < best.1.abs() {
            best = (mid, r);
        }
        if r == 0.0 {
            break;
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(GammaMedian { k, lambda_k: best.0, residual: best.1 })
}
