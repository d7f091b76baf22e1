//! Tight two-sided bounds on Poisson tail probabilities and the machinery
//! around them.
//!
//! The crate is `no_std` (with `alloc`) so the numerical core can be embedded
//! anywhere; IO, file formats and the command-line front end live in the
//! `ptail` crate.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`divergence`] | Kullback-Leibler divergence `H(t,x)` between Poisson means, threshold discretization |
//! | [`exact`] | Poisson pmf/cdf/survival oracle, regularized incomplete gamma, gamma median, Robbins interval |
//! | [`bounds`] | Right/left tail bounds with `R_n`/`L_n` prefactors and the comparator families |
//! | [`compare`] | Crossover points and the quotient curve between two explicit right-tail bounds |
//! | [`szasz`] | Szász-Mirakyan operator and exponential pointwise-convergence bounds |
//!
//! ```
//! use ptail_core::{bounds, divergence::TailQuery, exact};
//!
//! let q = TailQuery::right(10, 1.0, 1.5);
//! let thm = bounds::thm1_bounds(&q);
//! let truth = exact::exact_tail(&q).unwrap();
//! assert!(thm.lower.value <= truth && truth <= thm.upper.value);
//! ```
#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

pub mod bounds;
pub mod compare;
pub mod divergence;
mod error;
pub mod exact;
mod sum;
pub mod szasz;

pub use error::Error;
pub use sum::NeumaierSum;

/// `ln(sqrt(2*pi))`
pub(crate) const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_4;

pub type Result<T> = core::result::Result<T, Error>;
