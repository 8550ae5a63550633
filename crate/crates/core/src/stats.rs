//! Summary statistics and goodness-of-fit tests used by the verification suites.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Mean and variance of a sample together with their standard errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleSummary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    /// Asymptotic standard error `sqrt((m4 − σ⁴)/N)` of the sample variance.
    pub se_variance: f64,
}

impl SampleSummary {
    pub fn of(values: &[f64]) -> SampleSummary {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let (m2, m4) = values.iter().fold((0.0, 0.0), |(m2, m4), x| {
            let d = (x - mean) * (x - mean);
            (m2 + d, m4 + d * d)
        });
        let variance = m2 / (n - 1.0);
        let m4 = m4 / n;
        SampleSummary {
            count: values.len(),
            mean,
            variance,
            se_mean: (variance / n).sqrt(),
            se_variance: ((m4 - variance * variance).max(0.0) / n).sqrt(),
        }
    }
}

/// Sample covariance of two equally long samples.
pub fn covariance(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (n - 1.0)
}

/// One-sample Kolmogorov–Smirnov test: returns `(D, p-value)` using the
/// asymptotic Kolmogorov distribution with the usual small-sample correction.
pub fn ks_test(values: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted.iter().enumerate().fold(0.0_f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    });
    let sqrt_n = n.sqrt();
    (d, kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d))
}

/// `P(K > λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}`.
fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Pearson chi-square goodness of fit of bin counts against bin probabilities.
/// Returns `(statistic, p-value)` with `bins − 1` degrees of freedom.
pub fn chi_square_test(counts: &[u64], probabilities: &[f64]) -> (f64, f64) {
    let total = counts.iter().sum::<u64>() as f64;
    let stat = counts
        .iter()
        .zip(probabilities)
        .map(|(&o, &p)| {
            let e = total * p;
            (o as f64 - e).powi(2) / e
        })
        .sum::<f64>();
    let dof = (counts.len() - 1) as f64;
    let dist = ChiSquared::new(dof).expect("positive degrees of freedom");
    (stat, 1.0 - dist.cdf(stat))
}

/// `|observed − target| ≤ k·se`.
pub fn within_band(observed: f64, target: f64, se: f64, k: f64) -> bool {
    (observed - target).abs() <= k * se
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn summary_of_known_sample() {
        let s = SampleSummary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn variance_standard_error_matches_gaussian_formula() {
        // For N(0,1), sqrt((m4 − σ⁴)/N) = sqrt(2/N).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..200_000).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
        let s = SampleSummary::of(&xs);
        assert!((s.se_variance / (2.0 / xs.len() as f64).sqrt() - 1.0).abs() < 0.05);
    }

    #[test]
    fn ks_accepts_uniform_and_rejects_shifted() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let xs: Vec<f64> = (0..5000).map(|_| rng.random::<f64>()).collect();
        let (_, p) = ks_test(&xs, |x| x.clamp(0.0, 1.0));
        assert!(p > 0.01);
        let shifted: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let (_, p) = ks_test(&shifted, |x| x.clamp(0.0, 1.0));
        assert!(p < 1e-6);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Standard critical values: P(K > 1.3581) = 0.05, P(K > 1.6276) = 0.01.
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 1e-4);
    }

    #[test]
    fn chi_square_uniform_bins() {
        let (stat, p) = chi_square_test(&[25, 25, 25, 25], &[0.25; 4]);
        assert_eq!(stat, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
        let (_, p) = chi_square_test(&[100, 0, 0, 0], &[0.25; 4]);
        assert!(p < 1e-10);
    }
}
