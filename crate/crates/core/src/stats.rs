//! Sample Pearson correlation with a two-tailed t-test p-value.

use libm::{exp, fabs, lgamma, log, sqrt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("a sample has zero variance, correlation is undefined")]
    DegenerateVariance,
    #[error("samples contain a non-finite value")]
    NonFinite,
}

/// Pearson's r between `x` and `y`, with the p-value of
/// `t = r·sqrt((n−2)/(1−r²))` against Student's t with `n − 2` degrees of
/// freedom.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::TooFewSamples(n));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    let r = (sxy / sqrt(sxx * syy)).clamp(-1.0, 1.0);
    Ok(CorrelationResult {
        r,
        p_value: t_test_p_value(r, n),
        n,
    })
}

fn t_test_p_value(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let one_minus_r2 = 1.0 - r * r;
    if one_minus_r2 <= 0.0 {
        return 0.0;
    }
    let t2 = r * r * df / one_minus_r2;
    // P(|T| > t) = I_{df/(df+t²)}(df/2, 1/2)
    regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t2)).clamp(0.0, 1.0)
}

/// Two-tailed p-value for a t statistic with `df` degrees of freedom.
pub fn student_t_two_tailed(t: f64, df: f64) -> f64 {
    regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

/// `I_x(a, b)` by Lentz's continued fraction.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log(1.0 - x);
    let front = exp(ln_front);
    // The fraction converges fast for x < (a+1)/(a+b+2); use symmetry otherwise.
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if fabs(d) < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if fabs(del - 1.0) < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;
    use statrs::distribution::{ContinuousCDF, StudentsT};

    #[test]
    fn perfect_correlation() {
        let r = pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.r, 1.0);
        assert_eq!(r.p_value, 0.0);
        let r = pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(r.r, -1.0);
    }

    #[test]
    fn hand_computed_point_six() {
        // means 2.5; deviations (-1.5,-0.5,0.5,1.5) and (-0.5,-1.5,1.5,0.5);
        // cross sum 3, squares 5 and 5, so r = 3/5.
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert!((r.r - 0.6).abs() < 1e-9);
        assert_eq!(r.n, 4);
    }

    #[test]
    fn error_cases() {
        assert_eq!(
            pearson(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::LengthMismatch(2, 3))
        );
        assert_eq!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Err(StatsError::TooFewSamples(2))
        );
        assert_eq!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::DegenerateVariance)
        );
        assert_eq!(
            pearson(&[1.0, f64::NAN, 1.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::NonFinite)
        );
    }

    #[test]
    fn p_value_matches_statrs() {
        for &(t, df) in &[
            (0.5, 3.0),
            (2.0, 18.0),
            (2.87, 18.0),
            (-1.3, 7.0),
            (10.0, 2.0),
            (0.0, 5.0),
        ] {
            let dist = StudentsT::new(0.0, 1.0, df).unwrap();
            let expected = 2.0 * (1.0 - dist.cdf(fabs(t)));
            let got = student_t_two_tailed(t, df);
            assert!(
                (got - expected).abs() < 1e-10,
                "t={t} df={df}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn twenty_samples_near_point_five_six() {
        // r = 0.56 with n = 20 gives p ≈ 0.01.
        let df = 18.0;
        let r: f64 = 0.56;
        let t = r * sqrt(df / (1.0 - r * r));
        let p = student_t_two_tailed(t, df);
        assert!(p > 0.005 && p < 0.015, "p = {p}");
    }

    fn samples() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (3usize..30).prop_flat_map(|n| {
            (
                prop::collection::vec(-100.0f64..100.0, n),
                prop::collection::vec(-100.0f64..100.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn symmetric_and_affine_invariant((x, y) in samples(), scale in 0.1f64..10.0, shift in -50.0f64..50.0) {
            let Ok(a) = pearson(&x, &y) else { return Ok(()) };
            let b = pearson(&y, &x).unwrap();
            prop_assert!((a.r - b.r).abs() < 1e-12);
            let xs: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
            let c = pearson(&xs, &y).unwrap();
            prop_assert!((a.r - c.r).abs() < 1e-9);
            prop_assert!(a.r.abs() <= 1.0);
            prop_assert!((0.0..=1.0).contains(&a.p_value));
        }
    }
}
