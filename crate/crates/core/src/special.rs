//! Multivariate gamma and beta functions of the complex matrix ensembles.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

/// `log Γ_p(a) = p(p−1)/2 · log π + Σ_{i=1}^p log Γ(a − i + 1)`, for `a > p − 1`.
pub fn ln_multigamma(p: usize, a: f64) -> f64 {
    let pf = p as f64;
    pf * (pf - 1.0) / 2.0 * PI.ln() + (1..=p).map(|i| ln_gamma(a - i as f64 + 1.0)).sum::<f64>()
}

/// `log 𝓑_p(a, b) = log Γ_p(a) + log Γ_p(b) − log Γ_p(a + b)`.
pub fn ln_multibeta(p: usize, a: f64, b: f64) -> f64 {
    ln_multigamma(p, a) + ln_multigamma(p, b) - ln_multigamma(p, a + b)
}
