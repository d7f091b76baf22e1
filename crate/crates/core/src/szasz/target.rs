use alloc::vec::Vec;

use crate::{Error, Result};

/// Growth envelope `|f(t)| <= scale * (1 + t)^degree` on `t >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub scale: f64,
    pub degree: f64,
}

impl Envelope {
    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.scale * libm::pow(1.0 + t, self.degree)
        }
    }
}

/// A function the operator can be applied to, together with a growth
/// envelope that makes series truncation rigorous.
pub trait Target {
    fn eval(&self, t: f64) -> f64;
    fn envelope(&self) -> Envelope;
}

/// `l(t) = slope * t + intercept`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub slope: f64,
    pub intercept: f64,
}

impl Affine {
    pub const ZERO: Affine = Affine { slope: 0.0, intercept: 0.0 };

    pub fn new(slope: f64, intercept: f64) -> Self {
        Self { slope, intercept }
    }
}

impl Target for Affine {
    fn eval(&self, t: f64) -> f64 {
        self.slope * t + self.intercept
    }

    fn envelope(&self) -> Envelope {
        Envelope {
            scale: self.slope.abs() + self.intercept.abs(),
            degree: if self.slope == 0.0 { 0.0 } else { 1.0 },
        }
    }
}

/// Open interval `(lo, hi)`; `hi` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && lo >= 0.0 && hi > lo) {
            return Err(Error::Domain("window must satisfy 0 <= a < b"));
        }
        Ok(Self { lo, hi })
    }

    #[inline]
    pub fn contains(&self, t: f64) -> bool {
        self.lo < t && t < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }
}

pub const MAX_POLY_DEGREE: usize = 6;

/// Polynomial of degree at most 6, coefficients in ascending order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polynomial {
    coeffs: [f64; MAX_POLY_DEGREE + 1],
    len: usize,
}

impl Polynomial {
    pub fn new(coeffs: &[f64]) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_POLY_DEGREE + 1 {
            return Err(Error::Domain("polynomial needs 1 to 7 coefficients"));
        }
        let mut c = [0.0; MAX_POLY_DEGREE + 1];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(Self { coeffs: c, len: coeffs.len() })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs[..self.len]
    }
}

impl Target for Polynomial {
    fn eval(&self, t: f64) -> f64 {
        self.coefficients().iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    fn envelope(&self) -> Envelope {
        // t^i <= (1 + t)^d for t >= 0, i <= d
        Envelope {
            scale: self.coefficients().iter().map(|c| c.abs()).sum(),
            degree: (self.len - 1) as f64,
        }
    }
}

/// Continuous piecewise-affine function through `knots` (strictly increasing
/// abscissae), constant beyond the first and last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseAffine {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseAffine {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Domain("piecewise-affine function needs at least one knot"));
        }
        if knots.iter().any(|(t, y)| !t.is_finite() || !y.is_finite()) {
            return Err(Error::Domain("knots must be finite"));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Domain("knot abscissae must be strictly increasing"));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }
}

impl Target for PiecewiseAffine {
    fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t <= k[0].0 {
            return k[0].1;
        }
        if t >= k[k.len() - 1].0 {
            return k[k.len() - 1].1;
        }
        let i = k.partition_point(|&(kt, _)| kt <= t);
        let (t0, y0) = k[i - 1];
        let (t1, y1) = k[i];
        y0 + (y1 - y0) * (t - t0) / (t1 - t0)
    }

    fn envelope(&self) -> Envelope {
        Envelope { scale: self.knots.iter().map(|k| k.1.abs()).fold(0.0, f64::max), degree: 0.0 }
    }
}

/// The closed registry of target functions accepted at the interface boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionDescriptor {
    Affine(Affine),
    Polynomial(Polynomial),
    /// `(t - a)_-^s = max(0, a - t)^s`
    PowerDeviation { a: f64, s: f64 },
    /// `base` on `window`, `base + offset` outside it.
    Patch { base: Affine, offset: f64, window: Window },
    PiecewiseAffine(PiecewiseAffine),
}

impl FunctionDescriptor {
    pub fn power_deviation(a: f64, s: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && s > 0.0 && s.is_finite()) {
            return Err(Error::Domain("power deviation requires a > 0 and s > 0"));
        }
        Ok(Self::PowerDeviation { a, s })
    }

    /// The affine function and window on which the descriptor is affine by
    /// construction, when there is one.
    pub fn natural_reference(&self) -> Option<(Affine, Window)> {
        let everywhere = Window { lo: 0.0, hi: f64::INFINITY };
        match self {
            FunctionDescriptor::Affine(l) => Some((*l, everywhere)),
            FunctionDescriptor::Polynomial(p) if p.coefficients().len() <= 2 => {
                let c = p.coefficients();
                Some((Affine::new(c.get(1).copied().unwrap_or(0.0), c[0]), everywhere))
            }
            FunctionDescriptor::Polynomial(_) => None,
            FunctionDescriptor::PowerDeviation { a, .. } => Some((Affine::ZERO, Window { lo: *a, hi: f64::INFINITY })),
            FunctionDescriptor::Patch { base, window, .. } => Some((*base, *window)),
            FunctionDescriptor::PiecewiseAffine(_) => None,
        }
    }
}

impl FunctionDescriptor {
    /// Envelope of `f - l`, exploiting the structure of the descriptor so that
    /// `f = l` gives a zero envelope.
    pub fn deviation_envelope(&self, reference: &Affine) -> Envelope {
        let diff = |l: &Affine| Affine::new(l.slope - reference.slope, l.intercept - reference.intercept);
        match self {
            FunctionDescriptor::Affine(l) => diff(l).envelope(),
            FunctionDescriptor::Polynomial(p) => {
                let mut c = [0.0; MAX_POLY_DEGREE + 1];
                let coeffs = p.coefficients();
                c[..coeffs.len()].copy_from_slice(coeffs);
                c[0] -= reference.intercept;
                c[1] -= reference.slope;
                let len = c.iter().rposition(|v| *v != 0.0).map_or(1, |i| i + 1);
                Polynomial { coeffs: c, len }.envelope()
            }
            FunctionDescriptor::Patch { base, offset, .. } => {
                let e = diff(base).envelope();
                Envelope { scale: e.scale + offset.abs(), degree: e.degree }
            }
            FunctionDescriptor::PowerDeviation { .. } | FunctionDescriptor::PiecewiseAffine(_) => {
                let (f, l) = (self.envelope(), reference.envelope());
                Envelope { scale: f.scale + l.scale, degree: f.degree.max(l.degree) }
            }
        }
    }
}

impl Target for FunctionDescriptor {
    fn eval(&self, t: f64) -> f64 {
        match self {
            FunctionDescriptor::Affine(l) => l.eval(t),
            FunctionDescriptor::Polynomial(p) => p.eval(t),
            FunctionDescriptor::PowerDeviation { a, s } => {
                if t >= *a {
                    0.0
                } else {
                    libm::pow(a - t, *s)
                }
            }
            FunctionDescriptor::Patch { base, offset, window } => {
                base.eval(t) + if window.contains(t) { 0.0 } else { *offset }
            }
            FunctionDescriptor::PiecewiseAffine(p) => p.eval(t),
        }
    }

    fn envelope(&self) -> Envelope {
        match self {
            FunctionDescriptor::Affine(l) => l.envelope(),
            FunctionDescriptor::Polynomial(p) => p.envelope(),
            FunctionDescriptor::PowerDeviation { a, s } => Envelope { scale: libm::pow(*a, *s), degree: 0.0 },
            FunctionDescriptor::Patch { base, offset, .. } => {
                let e = base.envelope();
                Envelope { scale: e.scale + offset.abs(), degree: e.degree }
            }
            FunctionDescriptor::PiecewiseAffine(p) => p.envelope(),
        }
    }
}

/// `f(t) - l(t)`.
pub(crate) struct Deviation<'a> {
    pub target: &'a FunctionDescriptor,
    pub reference: Affine,
}

impl Target for Deviation<'_> {
    fn eval(&self, t: f64) -> f64 {
        self.target.eval(t) - self.reference.eval(t)
    }

    fn envelope(&self) -> Envelope {
        self.target.deviation_envelope(&self.reference)
    }
}

/// `|f(t) - l(t)|^p`, with `base` an envelope of `f - l`.
pub(crate) struct PowerOfDeviation<'a> {
    pub target: &'a FunctionDescriptor,
    pub reference: Affine,
    pub base: Envelope,
    pub p: f64,
}

impl Target for PowerOfDeviation<'_> {
    fn eval(&self, t: f64) -> f64 {
        let d = (self.target.eval(t) - self.reference.eval(t)).abs();
        if d == 0.0 {
            0.0
        } else {
            libm::pow(d, self.p)
        }
    }

    fn envelope(&self) -> Envelope {
        Envelope { scale: libm::pow(self.base.scale, self.p), degree: self.p * self.base.degree }
    }
}
