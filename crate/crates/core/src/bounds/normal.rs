use core::f64::consts::FRAC_1_SQRT_2;

/// Standard normal distribution function `Phi(z) = erfc(-z/sqrt 2)/2`.
///
/// Going through `erfc` keeps full relative accuracy in the lower tail, where
/// the explicit Short-type bounds live.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// `ln Phi(z)`, finite wherever `Phi(z) > 0` mathematically.
///
/// Below `z = -20` uses `ln phi(z) + ln R(-z)` with the Mills ratio `R`
/// from its continued fraction, so the result stays finite after `Phi`
/// itself underflows.
pub fn log_normal_cdf(z: f64) -> f64 {
    if z >= -20.0 {
        return libm::log(normal_cdf(z));
    }
    let t = -z;
    let mut d = t;
    for k in (1..=60).rev() {
        d = t + k as f64 / d;
    }
    -0.5 * t * t - crate::LN_SQRT_2PI - libm::log(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // composite Simpson on [0, |z|] of the density: an oracle independent of erfc
    fn quadrature(z: f64) -> f64 {
        let steps = 20_000;
        let h = z / steps as f64;
        let phi = |t: f64| libm::exp(-0.5 * t * t) / libm::sqrt(2.0 * core::f64::consts::PI);
        let mut s = crate::NeumaierSum::new();
        s.add(phi(0.0));
        s.add(phi(z));
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s.add(w * phi(i as f64 * h));
        }
        0.5 + s.total() * h / 3.0
    }

    #[test]
    fn reference_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert_relative_eq!(normal_cdf(1.96), quadrature(1.96), max_relative = 1e-14);
        assert_relative_eq!(normal_cdf(1.96), 0.975_002_104_851_779_6, max_relative = 1e-15);
        let deep = normal_cdf(-8.0);
        assert!(deep > 0.0);
        assert_relative_eq!(deep, 6.220_960_574_271_784e-16, max_relative = 1e-13);
    }

    #[test]
    fn symmetry_and_accuracy_on_a_grid() {
        for i in -800..=800 {
            let z = i as f64 / 100.0;
            assert!((normal_cdf(z) + normal_cdf(-z) - 1.0).abs() <= 1e-15);
            if z >= 0.0 {
                assert!((normal_cdf(z) - quadrature(z)).abs() <= 1e-14, "z = {z}");
            }
        }
    }

    #[test]
    fn monotone() {
        let mut prev = 0.0;
        for i in -1200..=1200 {
            let v = normal_cdf(i as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn log_cdf_matches_direct_log_where_representable() {
        for z in [-37.0, -30.0, -25.0, -20.5, -20.0, -5.0, 0.0, 3.0] {
            assert_relative_eq!(log_normal_cdf(z), libm::log(normal_cdf(z)), max_relative = 1e-13);
        }
        assert!(log_normal_cdf(-100.0).is_finite());
        assert!(log_normal_cdf(-100.0) < -5000.0);
    }
}
