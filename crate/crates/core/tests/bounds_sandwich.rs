use proptest::prelude::*;
use ptail_core::bounds::{
    blm_bound, klar_sandwich, short_explicit, short_phi_log_sandwich, short_phi_sandwich, thm1_bounds, thm2_bounds, KlarProduct,
};
use ptail_core::divergence::{discretize, kl_divergence, TailQuery};
use ptail_core::exact::{exact_tail, poisson_log_cdf};
use std::f64::consts::PI;

const NS: [u64; 8] = [1, 2, 3, 5, 10, 25, 60, 200];

fn xs() -> impl Iterator<Item = f64> {
    (1..=50).map(|i| 0.4 * i as f64)
}

#[test]
fn right_tail_sandwich_and_comparators() {
    let mut checked = 0;
    for n in NS {
        for x in xs() {
            for j in 0..6 {
                let b = x + [0.0, 0.05, 0.3, 1.0, 3.7, 10.0][j];
                let q = TailQuery::right(n, x, b);
                let exact = exact_tail(&q).unwrap();
                let t = thm1_bounds(&q);
                assert!(t.upper.valid);
                assert!(t.lower.value <= t.lower_sharp.value, "{q:?}");
                assert!(t.lower_sharp.value <= exact, "{q:?}");
                assert!(exact <= t.upper.value, "{q:?}");
                for r in [blm_bound(&q), short_explicit(&q)] {
                    if r.valid {
                        assert!(r.respects(exact), "{:?} at {q:?}", r.family);
                    }
                }
                for k in [1, 3, 20] {
                    let p = klar_sandwich(n, x, b, k, KlarProduct::Consecutive);
                    if p.upper.valid {
                        assert!(p.lower.value <= exact * (1.0 + 1e-13) && exact <= p.upper.value * (1.0 + 1e-13));
                    }
                }
                checked += 1;
            }
        }
    }
    assert!(checked >= 2000);
}

#[test]
fn left_tail_sandwich_and_comparators() {
    for n in NS {
        let nf = n as f64;
        for x in xs() {
            for j in 0..6 {
                let a = 1.0 / nf + (x - 1.0 / nf) * [0.0, 0.1, 0.4, 0.75, 0.95, 1.0][j];
                if a > x || x < 1.0 / nf {
                    continue;
                }
                let q = TailQuery::left(n, x, a);
                let exact = exact_tail(&q).unwrap();
                let t = thm2_bounds(&q);
                assert!(t.upper.valid, "{q:?}");
                assert!(t.lower.value <= t.lower_sharp.value && t.lower_sharp.value <= exact, "{q:?}");
                assert!(exact <= t.upper.value, "{q:?}");
                let blm = blm_bound(&q);
                if blm.valid {
                    assert!(blm.respects(exact));
                }
                let phi = short_phi_sandwich(n, x, a);
                if phi.lower.valid {
                    if exact > 1e-250 {
                        assert!(phi.lower.value < exact && exact < phi.upper.value, "{q:?}");
                    } else {
                        let (lo, hi) = short_phi_log_sandwich(n, x, a).unwrap();
                        let k = discretize(&q).grid_index;
                        let log_exact = poisson_log_cdf(q.mean(), k).unwrap();
                        assert!(lo < log_exact && log_exact < hi, "{q:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn right_upper_never_exceeds_half_plus_cap() {
    for n in NS {
        for x in xs() {
            for b in [x, x + 0.01, x + 2.0] {
                let q = TailQuery::right(n, x, b);
                let beta = discretize(&q).grid_value;
                let nf = n as f64;
                let cap = (0.5 + 1.0 / (2.0 * PI * nf * beta).sqrt()) * (-nf * kl_divergence(beta, x).unwrap()).exp();
                assert!(thm1_bounds(&q).upper.value <= cap * (1.0 + 1e-15));
            }
        }
    }
}

// Far from the mean the upper bound is asymptotically exact: R_n ~ beta/(beta - x)/sqrt(2 pi n beta).
#[test]
fn upper_bound_is_asymptotically_sharp() {
    let mut prev = f64::INFINITY;
    for n in [10, 50, 200, 800] {
        let q = TailQuery::right(n, 1.0, 2.0);
        let ratio = thm1_bounds(&q).upper.value / exact_tail(&q).unwrap();
        assert!(ratio >= 1.0 && ratio < prev, "{ratio}");
        prev = ratio;
    }
    assert!(prev < 1.005, "{prev}");
    let q = TailQuery::right(10_000, 1.0, 1.0);
    let up = thm1_bounds(&q).upper.value;
    let exact = exact_tail(&q).unwrap();
    assert!(up >= exact && up - exact < 0.01);
}

#[test]
fn klar_window_monotone_in_k() {
    for (n, x, b) in [(1, 2.0, 3.0), (10, 1.0, 1.5), (40, 3.0, 3.2)] {
        let mut prev = klar_sandwich(n, x, b, 1, KlarProduct::Consecutive);
        for k in 2..60 {
            let cur = klar_sandwich(n, x, b, k, KlarProduct::Consecutive);
            assert!(cur.lower.value >= prev.lower.value);
            assert!(cur.upper.value <= prev.upper.value * (1.0 + 1e-14));
            prev = cur;
        }
    }
}

proptest! {
    #[test]
    fn literal_klar_product_is_still_valid(n in 1u64..60, x in 0.1f64..10.0, db in 0.0f64..5.0, k in 1u64..30) {
        let b = x + db;
        let p = klar_sandwich(n, x, b, k, KlarProduct::Literal);
        prop_assume!(p.upper.valid);
        let exact = exact_tail(&TailQuery::right(n, x, b)).unwrap();
        prop_assert!(exact <= p.upper.value * (1.0 + 1e-13));
        let c = klar_sandwich(n, x, b, k, KlarProduct::Consecutive);
        prop_assert!(c.upper.value <= p.upper.value * (1.0 + 1e-15));
    }
}
