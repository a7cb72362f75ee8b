//! Tail probabilities and goodness-of-fit helpers.
//!
//! Chi-squared and normal tails come from `statrs`; the Kolmogorov
//! distribution and the KS and Pearson tests are built on top.

use std::f64::consts::{PI, SQRT_2};

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf;

pub use statrs::function::gamma::ln_gamma;

fn chi2(df: f64) -> ChiSquared {
    ChiSquared::new(df).expect("positive degrees of freedom")
}

/// Upper tail of the chi-squared distribution with `df` degrees of freedom.
pub fn chi2_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    chi2(df).sf(x)
}

pub fn chi2_cdf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    chi2(df).cdf(x)
}

pub fn chi2_quantile(p: f64, df: f64) -> f64 {
    assert!((0.0..1.0).contains(&p), "probability out of range");
    chi2(df).inverse_cdf(p)
}

pub fn erfc(x: f64) -> f64 {
    erf::erfc(x)
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erf::erfc(-z / SQRT_2)
}

pub fn normal_sf(z: f64) -> f64 {
    0.5 * erf::erfc(z / SQRT_2)
}

/// Two-sided standard-normal p-value for `z`.
pub fn normal_two_sided(z: f64) -> f64 {
    erf::erfc(z.abs() / SQRT_2).min(1.0)
}

pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "probability out of range");
    -SQRT_2 * erf::erfc_inv(2.0 * p)
}

/// Survival function of the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-theta form converges quickly for small arguments.
        let k = (2.0 * PI).sqrt() / lambda;
        let f = -PI * PI / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for j in 1..=20 {
            let m = (2 * j - 1) as f64;
            cdf += (f * m * m).exp();
        }
        (1.0 - k * cdf).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for j in 1..=100 {
            let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
            sum += sign * term;
            if term < 1e-17 {
                break;
            }
            sign = -sign;
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

fn ks_p_value(d: f64, effective_n: f64) -> f64 {
    let sq = effective_n.sqrt();
    kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d)
}

/// One-sample Kolmogorov-Smirnov test against Uniform(0, 1).
pub fn ks_uniform(samples: &[f64]) -> KsResult {
    assert!(!samples.is_empty(), "empty sample");
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &u) in s.iter().enumerate() {
        let u = u.clamp(0.0, 1.0);
        d = d.max((i + 1) as f64 / n - u).max(u - i as f64 / n);
    }
    KsResult {
        statistic: d,
        p_value: ks_p_value(d, n),
    }
}

/// Two-sample Kolmogorov-Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    assert!(!a.is_empty() && !b.is_empty(), "empty sample");
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    KsResult {
        statistic: d,
        p_value: ks_p_value(d, n1 * n2 / (n1 + n2)),
    }
}

/// Pearson chi-squared goodness of fit of `observed` counts against `probs`.
///
/// Cells with zero probability must have zero counts and do not contribute
/// degrees of freedom. Returns `(statistic, p_value)`.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), probs.len());
    let total: u64 = observed.iter().sum();
    let total = total as f64;
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(probs) {
        if p > 0.0 {
            let e = total * p;
            stat += (o as f64 - e).powi(2) / e;
            cells += 1;
        } else if o > 0 {
            return (f64::INFINITY, 0.0);
        }
    }
    let df = cells.saturating_sub(1).max(1) as f64;
    (stat, chi2_sf(stat, df))
}
