//! Closed-form bounds on Poisson tails.
//!
//! The main right/left bounds have the shape `prefactor * e^{-n H(beta, x)}`
//! with the prefactors [`right_prefactor`] (`R_n`) and [`left_prefactor`]
//! (`L_n`). The comparator families are the Chernoff bound, Short's normal
//! sandwich and explicit bound, and Klar's window sandwich.
//!
//! Precondition failures never raise; they produce a [`BoundResult`] with
//! `valid == false` and an infinite value, so sweeps can cross validity
//! boundaries.

mod normal;

pub use normal::{log_normal_cdf, normal_cdf};

use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::divergence::{discretize, divergence, snapped_ceil, snapped_floor, snapped_sign, Side, TailQuery};
use crate::exact::poisson_window;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Thm1Upper,
    Thm1Lower,
    Thm1LowerSharp,
    Thm2Upper,
    Thm2Lower,
    Thm2LowerSharp,
    BlmRight,
    BlmLeft,
    ShortPhiLower,
    ShortPhiUpper,
    ShortExplicit,
    KlarLower,
    KlarUpper,
}

impl Family {
    pub fn id(self) -> &'static str {
        match self {
            Family::Thm1Upper => "thm1-upper",
            Family::Thm1Lower => "thm1-lower",
            Family::Thm1LowerSharp => "thm1-lower-sharp",
            Family::Thm2Upper => "thm2-upper",
            Family::Thm2Lower => "thm2-lower",
            Family::Thm2LowerSharp => "thm2-lower-sharp",
            Family::BlmRight => "blm-right",
            Family::BlmLeft => "blm-left",
            Family::ShortPhiLower => "short-phi-lower",
            Family::ShortPhiUpper => "short-phi-upper",
            Family::ShortExplicit => "short-explicit",
            Family::KlarLower => "klar-lower",
            Family::KlarUpper => "klar-upper",
        }
    }

    pub fn is_upper(self) -> bool {
        matches!(
            self,
            Family::Thm1Upper
                | Family::Thm2Upper
                | Family::BlmRight
                | Family::BlmLeft
                | Family::ShortPhiUpper
                | Family::ShortExplicit
                | Family::KlarUpper
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// A bound family group as addressed from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyGroup {
    Thm1,
    Thm2,
    Blm,
    ShortPhi,
    ShortExplicit,
    Klar,
}

impl FamilyGroup {
    pub const ALL: [FamilyGroup; 6] = [
        FamilyGroup::Thm1,
        FamilyGroup::Thm2,
        FamilyGroup::Blm,
        FamilyGroup::ShortPhi,
        FamilyGroup::ShortExplicit,
        FamilyGroup::Klar,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FamilyGroup::Thm1 => "thm1",
            FamilyGroup::Thm2 => "thm2",
            FamilyGroup::Blm => "blm",
            FamilyGroup::ShortPhi => "short-phi",
            FamilyGroup::ShortExplicit => "short-explicit",
            FamilyGroup::Klar => "klar",
        }
    }

    /// Whether the group speaks about the given tail.
    pub fn applies_to(self, side: Side) -> bool {
        match self {
            FamilyGroup::Thm1 | FamilyGroup::ShortExplicit | FamilyGroup::Klar => side == Side::Right,
            FamilyGroup::Thm2 | FamilyGroup::ShortPhi => side == Side::Left,
            FamilyGroup::Blm => true,
        }
    }
}

impl FromStr for FamilyGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyGroup::ALL
            .into_iter()
            .find(|g| g.id() == s)
            .ok_or(Error::Domain("unknown bound family"))
    }
}

/// One bound family's value at a query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub family: Family,
    /// Meaningful only when `valid`; `+inf` otherwise.
    pub value: f64,
    pub valid: bool,
    pub note: &'static str,
}

impl BoundResult {
    fn valid(family: Family, value: f64) -> Self {
        Self { family, value, valid: true, note: "" }
    }

    fn invalid(family: Family, note: &'static str) -> Self {
        Self { family, value: f64::INFINITY, valid: false, note }
    }

    /// Whether the value is on the correct side of `exact`.
    pub fn respects(&self, exact: f64) -> bool {
        if self.family.is_upper() {
            exact <= self.value
        } else {
            self.value <= exact
        }
    }

    /// `bound - exact` for upper bounds, `exact - bound` for lower bounds.
    pub fn slack(&self, exact: f64) -> f64 {
        if self.family.is_upper() {
            self.value - exact
        } else {
            exact - self.value
        }
    }
}

/// The lower/upper bounds of one of the two main tail estimates.
///
/// `lower` uses the `e^{-1/(2 n beta)}` constant of the published statement,
/// `lower_sharp` the `e^{-1/(12 n beta)}` constant its proof actually yields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSandwich {
    pub lower: BoundResult,
    pub lower_sharp: BoundResult,
    pub upper: BoundResult,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPair {
    pub lower: BoundResult,
    pub upper: BoundResult,
}

/// `R_n(x, beta) = min(x / ((beta - x + 1/n) sqrt(2 pi n beta)), 1/2) + 1/sqrt(2 pi n beta)`.
pub fn right_prefactor(n: u64, x: f64, beta: f64) -> f64 {
    let n = n as f64;
    let root = libm::sqrt(2.0 * PI * n * beta);
    (x / ((beta - x + 1.0 / n) * root)).min(0.5) + 1.0 / root
}

/// `L_n(x, alpha) = min(x / ((x - alpha + 1/n) sqrt(2 pi n alpha)), 1/2) + 1/sqrt(2 pi n alpha)`.
pub fn left_prefactor(n: u64, x: f64, alpha: f64) -> f64 {
    let n = n as f64;
    let root = libm::sqrt(2.0 * PI * n * alpha);
    (x / ((x - alpha + 1.0 / n) * root)).min(0.5) + 1.0 / root
}

/// `R_n` and `L_n` at a pair of grid points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeConstants {
    pub right: f64,
    pub left: f64,
}

impl EnvelopeConstants {
    pub fn new(n: u64, x: f64, alpha: f64, beta: f64) -> Self {
        Self { right: right_prefactor(n, x, beta), left: left_prefactor(n, x, alpha) }
    }
}

/// Right-tail upper bound `R_n(x, beta) e^{-n H(beta, x)}` on the lattice point
/// `beta`; no validity checks.
pub(crate) fn right_upper_at(n: u64, x: f64, beta: f64) -> f64 {
    right_prefactor(n, x, beta) * libm::exp(-(n as f64) * divergence(beta, x))
}

pub(crate) fn left_upper_at(n: u64, x: f64, alpha: f64) -> f64 {
    left_prefactor(n, x, alpha) * libm::exp(-(n as f64) * divergence(alpha, x))
}

fn lower_pair(n: u64, x: f64, grid: f64, stated: Family, sharp: Family) -> (BoundResult, BoundResult) {
    let m = n as f64 * grid;
    let base = libm::exp(-(n as f64) * divergence(grid, x)) / libm::sqrt(2.0 * PI * m);
    (
        BoundResult::valid(stated, libm::exp(-1.0 / (2.0 * m)) * base),
        BoundResult::valid(sharp, libm::exp(-1.0 / (12.0 * m)) * base),
    )
}

/// Right-tail bounds for `P(N_{nx} >= n b)`, `0 < x <= b`.
pub fn thm1_bounds(query: &TailQuery) -> TailSandwich {
    let ok = query.side == Side::Right && query.satisfies_hypotheses();
    if !ok {
        let note = "requires a right-tail query with 0 < x <= b";
        return TailSandwich {
            lower: BoundResult::invalid(Family::Thm1Lower, note),
            lower_sharp: BoundResult::invalid(Family::Thm1LowerSharp, note),
            upper: BoundResult::invalid(Family::Thm1Upper, note),
        };
    }
    let beta = discretize(query).grid_value;
    let (lower, lower_sharp) = lower_pair(query.n, query.x, beta, Family::Thm1Lower, Family::Thm1LowerSharp);
    TailSandwich {
        lower,
        lower_sharp,
        upper: BoundResult::valid(Family::Thm1Upper, right_upper_at(query.n, query.x, beta)),
    }
}

/// Left-tail bounds for `P(N_{nx} <= n a)`, `1/n <= a <= x`.
pub fn thm2_bounds(query: &TailQuery) -> TailSandwich {
    let ok = query.side == Side::Left && query.satisfies_hypotheses();
    if !ok {
        let note = "requires a left-tail query with 1/n <= a <= x";
        return TailSandwich {
            lower: BoundResult::invalid(Family::Thm2Lower, note),
            lower_sharp: BoundResult::invalid(Family::Thm2LowerSharp, note),
            upper: BoundResult::invalid(Family::Thm2Upper, note),
        };
    }
    let alpha = discretize(query).grid_value;
    let (lower, lower_sharp) = lower_pair(query.n, query.x, alpha, Family::Thm2Lower, Family::Thm2LowerSharp);
    TailSandwich {
        lower,
        lower_sharp,
        upper: BoundResult::valid(Family::Thm2Upper, left_upper_at(query.n, query.x, alpha)),
    }
}

/// Natural logarithms of the values in a [`TailSandwich`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSandwich {
    pub lower: f64,
    pub lower_sharp: f64,
    pub upper: f64,
}

/// Logarithms of [`thm1_bounds`] (right) or [`thm2_bounds`] (left), finite
/// where the bounds themselves underflow. `None` when the hypotheses fail.
pub fn log_tail_bounds(query: &TailQuery) -> Option<LogSandwich> {
    if !query.satisfies_hypotheses() {
        return None;
    }
    let (n, x) = (query.n, query.x);
    let grid = discretize(query).grid_value;
    let m = n as f64 * grid;
    let exponent = -(n as f64) * divergence(grid, x);
    let prefactor = match query.side {
        Side::Right => right_prefactor(n, x, grid),
        Side::Left => left_prefactor(n, x, grid),
    };
    let base = exponent - libm::log(libm::sqrt(2.0 * PI * m));
    Some(LogSandwich {
        lower: base - 1.0 / (2.0 * m),
        lower_sharp: base - 1.0 / (12.0 * m),
        upper: libm::log(prefactor) + exponent,
    })
}

/// Chernoff bound `e^{-n H(b, x)}` (right, `x <= b`) or `e^{-n H(a, x)}`
/// (left, `a <= x`, `nx >= 1`), evaluated at the raw threshold.
pub fn blm_bound(query: &TailQuery) -> BoundResult {
    let n = query.n as f64;
    match query.side {
        Side::Right => {
            if query.check().is_err() || query.x > query.threshold {
                return BoundResult::invalid(Family::BlmRight, "requires 0 < x <= b");
            }
            BoundResult::valid(Family::BlmRight, libm::exp(-n * divergence(query.threshold, query.x)))
        }
        Side::Left => {
            if query.check().is_err() || query.threshold > query.x {
                return BoundResult::invalid(Family::BlmLeft, "requires 0 <= a <= x");
            }
            if query.mean() < 1.0 {
                return BoundResult::invalid(Family::BlmLeft, "requires n x >= 1");
            }
            BoundResult::valid(Family::BlmLeft, libm::exp(-n * divergence(query.threshold, query.x)))
        }
    }
}

/// Short's normal sandwich around `P(N_{nx} <= floor(n c))`, `floor(n c) >= 1`:
/// `Phi(s sqrt(2 n H(gamma, x))) < P < Phi(t sqrt(2 n H(gamma + 1/n, x)))`
/// with `gamma = floor(n c)/n`, `s = sign(floor(n c) - n x)` and
/// `t = sign(floor(n c) + 1 - n x)`. The two signs differ only when
/// `floor(n c) <= n x < floor(n c) + 1`, where a shared sign would put the
/// upper value at or below 1/2 and below the probability.
pub fn short_phi_sandwich(n: u64, x: f64, c: f64) -> BoundPair {
    match short_phi_arguments(n, x, c) {
        Some((lo, hi)) => BoundPair {
            lower: BoundResult::valid(Family::ShortPhiLower, normal_cdf(lo)),
            upper: BoundResult::valid(Family::ShortPhiUpper, normal_cdf(hi)),
        },
        None => {
            let note = "requires floor(n c) >= 1";
            BoundPair {
                lower: BoundResult::invalid(Family::ShortPhiLower, note),
                upper: BoundResult::invalid(Family::ShortPhiUpper, note),
            }
        }
    }
}

/// Natural logarithms of the two sides of [`short_phi_sandwich`], for
/// comparisons past the underflow threshold. `None` when invalid.
pub fn short_phi_log_sandwich(n: u64, x: f64, c: f64) -> Option<(f64, f64)> {
    short_phi_arguments(n, x, c).map(|(lo, hi)| (log_normal_cdf(lo), log_normal_cdf(hi)))
}

fn short_phi_arguments(n: u64, x: f64, c: f64) -> Option<(f64, f64)> {
    let m = snapped_floor(n as f64 * c);
    if n == 0 || !(x > 0.0) || !(c > 0.0) || m < 1.0 {
        return None;
    }
    let nf = n as f64;
    let gamma = m / nf;
    let s_lower = snapped_sign(m as u64, nf * x);
    let s_upper = snapped_sign(m as u64 + 1, nf * x);
    Some((
        s_lower * libm::sqrt(2.0 * nf * divergence(gamma, x)),
        s_upper * libm::sqrt(2.0 * nf * divergence(gamma + 1.0 / nf, x)),
    ))
}

/// Short's explicit right-tail bound at `beta = ceil(n b)/n`, valid when
/// `ceil(n b) >= n x + 1`:
/// `e^{-n H(beta - 1/n, x)} / max(2, sqrt(4 pi n H(beta - 1/n, x)))`.
pub fn short_explicit(query: &TailQuery) -> BoundResult {
    if query.side != Side::Right || query.check().is_err() {
        return BoundResult::invalid(Family::ShortExplicit, "requires a right-tail query");
    }
    let m = discretize(query).grid_index;
    if snapped_sign(m, query.mean() + 1.0) < 0.0 {
        return BoundResult::invalid(Family::ShortExplicit, "requires ceil(n b) >= n x + 1");
    }
    let nf = query.n as f64;
    BoundResult::valid(Family::ShortExplicit, short_explicit_at(nf, query.x, m as f64 / nf))
}

pub(crate) fn short_explicit_at(n: f64, x: f64, beta: f64) -> f64 {
    let nh = n * divergence(beta - 1.0 / n, x);
    libm::exp(-nh) / libm::sqrt(4.0 * PI * nh).max(2.0)
}

/// Denominator of the ratio in Klar's bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KlarProduct {
    /// `prod_{i=1}^k (ceil(n b) + i)`
    #[default]
    Consecutive,
    /// `(ceil(n b) + 1)^k`, the form as literally printed; looser but valid.
    Literal,
}

/// Klar's sandwich: the window mass `P(m <= N_{nx} <= m + k - 1)`, `m = ceil(n b)`,
/// below the tail, and the window mass divided by `1 - rho` above it, where
/// `rho = (n x)^k / prod(...)`.
pub fn klar_sandwich(n: u64, x: f64, b: f64, k: u64, product: KlarProduct) -> BoundPair {
    let invalid = |note| BoundPair {
        lower: BoundResult::invalid(Family::KlarLower, note),
        upper: BoundResult::invalid(Family::KlarUpper, note),
    };
    let query = TailQuery::right(n, x, b);
    if query.check().is_err() || k == 0 {
        return invalid("requires n, x, b > 0 and k >= 1");
    }
    let mean = query.mean();
    let m = snapped_ceil(n as f64 * b);
    if !(m + 1.0 > mean) {
        return invalid("requires ceil(n b) + 1 > n x");
    }
    let ln_mean = libm::log(mean);
    let log_rho = match product {
        KlarProduct::Consecutive => (1..=k).map(|i| ln_mean - libm::log(m + i as f64)).sum::<f64>(),
        KlarProduct::Literal => k as f64 * (ln_mean - libm::log(m + 1.0)),
    };
    if !(log_rho < 0.0) {
        return invalid("requires rho < 1");
    }
    let mi = m as u64;
    let window = match poisson_window(mean, mi, mi.saturating_add(k - 1)) {
        Ok(w) => w,
        Err(_) => return invalid("window mass unavailable"),
    };
    BoundPair {
        lower: BoundResult::valid(Family::KlarLower, window),
        upper: BoundResult::valid(Family::KlarUpper, window / -libm::expm1(log_rho)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_tail, poisson_cdf, poisson_sf};
    use approx::assert_relative_eq;

    // Reference values below come from a 40-digit evaluation of the formulas.

    #[test]
    fn right_tail_small_example() {
        let q = TailQuery::right(1, 2.0, 3.0);
        let t = thm1_bounds(&q);
        assert_relative_eq!(t.upper.value, 0.371_022_407_248_136_1, max_relative = 1e-14);
        assert_relative_eq!(t.lower.value, 0.157_031_843_630_235_06, max_relative = 1e-14);
        assert_relative_eq!(t.lower_sharp.value, 0.180_429_027_200_011_14, max_relative = 1e-14);
        assert_relative_eq!(right_prefactor(1, 2.0, 3.0), 0.460_658_865_961_780_64, max_relative = 1e-14);
        let exact = exact_tail(&q).unwrap();
        assert!(t.lower.value <= t.lower_sharp.value && t.lower_sharp.value <= exact && exact <= t.upper.value);
    }

    #[test]
    fn right_tail_n10_example() {
        let q = TailQuery::right(10, 1.0, 1.5);
        let t = thm1_bounds(&q);
        assert_relative_eq!(10.0 * divergence(1.5, 1.0), 1.081_976_621_622_465_7, max_relative = 1e-14);
        assert_relative_eq!(right_prefactor(10, 1.0, 1.5), 0.274_683_876_994_268_15, max_relative = 1e-14);
        assert_relative_eq!(t.upper.value, 0.093_097_215_637_802_01, max_relative = 1e-14);
        assert!(poisson_sf(10.0, 15).unwrap() <= t.upper.value);
    }

    #[test]
    fn right_tail_at_b_equal_x() {
        for (n, x) in [(1, 2.0), (7, 0.3), (50, 1.1)] {
            let q = TailQuery::right(n, x, x);
            let t = thm1_bounds(&q);
            let beta = discretize(&q).grid_value;
            let cap = (0.5 + 1.0 / libm::sqrt(2.0 * PI * n as f64 * beta))
                * libm::exp(-(n as f64) * divergence(beta, x));
            assert!(exact_tail(&q).unwrap() <= t.upper.value);
            assert!(t.upper.value <= cap);
        }
    }

    #[test]
    fn left_tail_examples() {
        let q = TailQuery::left(10, 1.0, 0.5);
        let t = thm2_bounds(&q);
        assert_relative_eq!(10.0 * divergence(0.5, 1.0), 1.534_264_097_200_273_5, max_relative = 1e-14);
        assert_relative_eq!(left_prefactor(10, 1.0, 0.5), 0.475_766_430_974_072_3, max_relative = 1e-14);
        assert_relative_eq!(t.upper.value, 0.102_582_047_867_115_31, max_relative = 1e-14);
        assert!(poisson_cdf(10.0, 5).unwrap() <= t.upper.value);

        // alpha = x: prefactor 1/2 + 1/sqrt(2 pi n alpha), exponent zero
        let t = thm2_bounds(&TailQuery::left(4, 2.0, 2.0));
        assert_relative_eq!(t.upper.value, 0.5 + 1.0 / libm::sqrt(2.0 * PI * 8.0), max_relative = 1e-15);

        let t = thm2_bounds(&TailQuery::left(1, 1.0, 1.0));
        assert_relative_eq!(t.upper.value, 0.797_884_560_802_865_4, max_relative = 1e-14);
        assert!(2.0 / core::f64::consts::E <= t.upper.value);
    }

    #[test]
    fn invalid_queries_are_flagged() {
        let t = thm1_bounds(&TailQuery::right(3, 2.0, 1.0));
        assert!(!t.upper.valid && !t.lower.valid && t.upper.value.is_infinite());
        let t = thm2_bounds(&TailQuery::left(10, 1.0, 0.05));
        assert!(!t.upper.valid);
        let t = thm2_bounds(&TailQuery::left(10, 1.0, 1.5));
        assert!(!t.upper.valid);
        assert!(!thm1_bounds(&TailQuery::left(10, 1.0, 0.5)).upper.valid);
    }

    #[test]
    fn chernoff_examples() {
        assert_eq!(blm_bound(&TailQuery::right(5, 1.3, 1.3)).value, 1.0);
        let r = blm_bound(&TailQuery::right(1, 2.0, 3.0));
        assert_relative_eq!(r.value, 0.805_416_838_061_939_3, max_relative = 1e-14);
        assert!(r.respects(0.323_323_583_816_936_54));
        let l = blm_bound(&TailQuery::left(10, 1.0, 0.5));
        assert_relative_eq!(l.value, 0.215_614_303_970_734_95, max_relative = 1e-14);
        let l = blm_bound(&TailQuery::left(2, 0.4, 0.2));
        assert!(!l.valid && l.note.contains("n x >= 1"));
    }

    #[test]
    fn short_phi_examples() {
        let p = short_phi_sandwich(10, 1.0, 0.59);
        assert_relative_eq!(p.lower.value, 0.039_910_854_505_797_06, max_relative = 1e-12);
        assert_relative_eq!(p.upper.value, 0.085_732_242_025_104_34, max_relative = 1e-12);
        let exact = poisson_cdf(10.0, 5).unwrap();
        assert!(p.lower.value < exact && exact < p.upper.value);

        // floor(n c) = n x gives Phi(0) on the lower side
        let p = short_phi_sandwich(10, 1.0, 1.0);
        assert_eq!(p.lower.value, 0.5);
        assert!(0.5 < poisson_cdf(10.0, 10).unwrap());

        assert!(!short_phi_sandwich(10, 1.0, 0.09).lower.valid);
    }

    #[test]
    fn short_explicit_examples() {
        let r = short_explicit(&TailQuery::right(1, 2.0, 3.0));
        assert_eq!(r.value, 0.5);
        let r = short_explicit(&TailQuery::right(3, 1.0, 3.0));
        assert_relative_eq!(r.value, 0.009_704_022_646_266_805, max_relative = 1e-13);
        let r = short_explicit(&TailQuery::right(1, 2.0, 2.0));
        assert!(!r.valid);
        let r = short_explicit(&TailQuery::right(2, 0.01, 30.0));
        assert!(r.valid && r.value > 0.0);
    }

    #[test]
    fn klar_examples() {
        let exact = poisson_sf(2.0, 3).unwrap();
        let p = klar_sandwich(1, 2.0, 3.0, 1, KlarProduct::Consecutive);
        assert_relative_eq!(p.lower.value, 0.180_447_044_315_483_59, max_relative = 1e-14);
        assert_relative_eq!(p.upper.value, 0.360_894_088_630_967_18, max_relative = 1e-14);
        let p = klar_sandwich(1, 2.0, 3.0, 2, KlarProduct::Consecutive);
        assert_relative_eq!(p.lower.value, 0.270_670_566_473_225_38, max_relative = 1e-14);
        assert_relative_eq!(p.upper.value, 0.338_338_208_091_531_73, max_relative = 1e-14);
        assert!(p.lower.value <= exact && exact <= p.upper.value);
        let p = klar_sandwich(1, 2.0, 3.0, 200, KlarProduct::Consecutive);
        assert_relative_eq!(p.lower.value, exact, max_relative = 1e-14);
        let lit = klar_sandwich(1, 2.0, 3.0, 2, KlarProduct::Literal);
        assert!(lit.upper.value >= exact);
        assert!(!klar_sandwich(1, 5.0, 3.0, 2, KlarProduct::Consecutive).upper.valid);
    }

    #[test]
    fn family_groups_parse() {
        for g in FamilyGroup::ALL {
            assert_eq!(g.id().parse::<FamilyGroup>().unwrap(), g);
        }
        assert!("thm3".parse::<FamilyGroup>().is_err());
    }

    #[test]
    fn log_bounds_match_linear_ones() {
        for q in [TailQuery::right(1, 2.0, 3.0), TailQuery::right(10, 1.0, 1.5), TailQuery::left(10, 1.0, 0.5)] {
            let t = if q.side == Side::Right { thm1_bounds(&q) } else { thm2_bounds(&q) };
            let l = log_tail_bounds(&q).unwrap();
            assert_relative_eq!(l.lower, libm::log(t.lower.value), max_relative = 1e-14);
            assert_relative_eq!(l.lower_sharp, libm::log(t.lower_sharp.value), max_relative = 1e-14);
            assert_relative_eq!(l.upper, libm::log(t.upper.value), max_relative = 1e-14);
        }
        assert!(log_tail_bounds(&TailQuery::right(1, 2.0, 1.0)).is_none());
        let deep = log_tail_bounds(&TailQuery::left(200, 20.0, 0.005)).unwrap();
        assert!(deep.upper.is_finite() && deep.upper < -3000.0);
    }
}
