//! Complex matrix ensembles: samplers, log-densities and rate functions.
//!
//! Conventions: a standard complex Gaussian has density `π^{-1} e^{-|z|²}`
//! (real and imaginary parts `N(0, 1/2)`); the Wishart law `W_p(a)` has density
//! `Γ_p(a)^{-1} det(X)^{a-p} e^{-tr X}`; `Beta_p(a, b)` has density
//! `𝓑_p(a,b)^{-1} det(X)^{a-p} det(I-X)^{b-p}` on `0 < X < I`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::CircleCanonicalVector;
use crate::error::{Error, Result};
use crate::hermitian::{
    hermitian_sqrt, identity, inv_sqrt, log_det_cholesky, CMatrix, Hermitian, Psd, TOL,
};
use crate::interval::IntervalCanonicalVector;
use crate::rng::RngStream;
use crate::special::{ln_multibeta, ln_multigamma};

/// Integer Wishart shapes up to this size are drawn as `G G*`; larger or
/// fractional shapes use the triangular construction.
pub const GRAM_SHAPE_LIMIT: f64 = 32.0;

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre_rect<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn sample_ginibre<R: Rng + ?Sized>(p: usize, rng: &mut R) -> CMatrix {
    ginibre_rect(p, p, rng)
}

/// GUE with density `∝ e^{-tr X²/2}`: real `N(0,1)` diagonal, off-diagonal
/// real and imaginary parts `N(0, 1/2)`.
pub fn sample_gue<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Hermitian {
    let mut m = CMatrix::zeros(p, p);
    for i in 0..p {
        m[(i, i)] = Complex64::new(rng.sample(StandardNormal), 0.0);
        for j in 0..i {
            let z = complex_normal(rng);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    Hermitian::symmetrize(m)
}

/// Haar unitary from the QR factorization of a Ginibre matrix, with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(p: usize, rng: &mut R) -> CMatrix {
    haar_of_size(p, rng)
}

fn haar_of_size<R: Rng + ?Sized>(size: usize, rng: &mut R) -> CMatrix {
    let qr = sample_ginibre(size, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..size {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..size {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn check_shape(p: usize, a: f64, name: &str) -> Result<()> {
    if !(a > p as f64 - 1.0) || !a.is_finite() {
        return Err(Error::BadShape(format!("{name} = {a} must exceed p - 1 = {}", p as f64 - 1.0)));
    }
    Ok(())
}

/// Complex Wishart `W_p(a)`, `a > p − 1`.
pub fn sample_complex_wishart<R: Rng + ?Sized>(p: usize, a: f64, rng: &mut R) -> Result<Psd> {
    check_shape(p, a, "a")?;
    let x = if a.fract() == 0.0 && a <= GRAM_SHAPE_LIMIT {
        let g = ginibre_rect(p, a as usize, rng);
        &g * g.adjoint()
    } else {
        // Bartlett: |T_ii|² ~ Gamma(a − i + 1, 1) (i from 1), strictly lower part standard complex normal.
        let mut t = CMatrix::zeros(p, p);
        for i in 0..p {
            let shape = a - i as f64;
            let g = Gamma::new(shape, 1.0).map_err(|e| Error::BadShape(e.to_string()))?;
            t[(i, i)] = Complex64::new(g.sample(rng).sqrt(), 0.0);
            for j in 0..i {
                t[(i, j)] = complex_normal(rng);
            }
        }
        &t * t.adjoint()
    };
    Psd::new(Hermitian::symmetrize(x))
}

/// `Beta_p(a, b)` as `(W₁+W₂)^{-1/2} W₁ (W₁+W₂)^{-1/2}` with independent Wisharts.
pub fn sample_matrix_beta<R: Rng + ?Sized>(p: usize, a: f64, b: f64, rng: &mut R) -> Result<Hermitian> {
    check_shape(p, a, "a")?;
    check_shape(p, b, "b")?;
    let w1 = sample_complex_wishart(p, a, rng)?;
    let w2 = sample_complex_wishart(p, b, rng)?;
    let total = Psd::new(w1.hermitian() + w2.hermitian())?;
    let root = inv_sqrt(&total)?;
    Ok(w1.hermitian().congruence(root.matrix()))
}

/// First `k` canonical moments of a uniform draw from the `n`-th interval
/// moment space: independent `U_j ~ Beta_p(p(n−j+1), p(n−j+1))`.
pub fn sample_canonical_interval_prefix<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    p: usize,
    rng: &mut R,
) -> Result<IntervalCanonicalVector> {
    if k > n || n == 0 {
        return Err(Error::BadShape(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let canon = (1..=k)
        .map(|j| {
            let s = (p * (n - j + 1)) as f64;
            sample_matrix_beta(p, s, s, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    IntervalCanonicalVector::new(p, canon)
}

pub fn sample_uniform_canonical_interval<R: Rng + ?Sized>(
    n: usize,
    p: usize,
    rng: &mut R,
) -> Result<IntervalCanonicalVector> {
    sample_canonical_interval_prefix(n, n, p, rng)
}

/// Shape of the defect Beta law of `A_j` in the `n`-th circle moment space.
fn circle_beta_shape(n: usize, j: usize, p: usize) -> f64 {
    (2 * p * (n - j) + p) as f64
}

/// First `k` canonical moments of a uniform draw from the `n`-th circle
/// moment space: independent `A_j = V_j B_j^{1/2}`, `V_j` Haar and
/// `B_j ~ Beta_p(p, 2p(n−j)+p)`.
pub fn sample_canonical_circle_prefix<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    p: usize,
    rng: &mut R,
) -> Result<CircleCanonicalVector> {
    if k > n || n == 0 {
        return Err(Error::BadShape(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let canon = (1..=k)
        .map(|j| {
            let b = sample_matrix_beta(p, p as f64, circle_beta_shape(n, j, p), rng)?;
            let v = sample_haar_unitary(p, rng);
            Ok(v * hermitian_sqrt(&Psd::new(b)?).matrix())
        })
        .collect::<Result<Vec<_>>>()?;
    CircleCanonicalVector::new(p, canon)
}

pub fn sample_uniform_canonical_circle<R: Rng + ?Sized>(
    n: usize,
    p: usize,
    rng: &mut R,
) -> Result<CircleCanonicalVector> {
    sample_canonical_circle_prefix(n, n, p, rng)
}

/// Top-left `p×p` block of a Haar unitary of size `p + q`; its density is
/// proportional to `det(I − A A*)^{q−p}`.
pub fn haar_subblock_sampler<R: Rng + ?Sized>(p: usize, q: usize, rng: &mut R) -> Result<CMatrix> {
    if q < p {
        return Err(Error::BadShape(format!("q = {q} must be at least p = {p}")));
    }
    Ok(haar_of_size(p + q, rng).view((0, 0), (p, p)).into_owned())
}

/// Log-density of `Beta_p(a, b)`; `−∞` outside `0 < X < I`.
pub fn log_density_beta(p: usize, a: f64, b: f64, x: &Hermitian) -> Result<f64> {
    check_shape(p, a, "a")?;
    check_shape(p, b, "b")?;
    if x.dim() != p {
        return Err(Error::DimensionMismatch { expected: p, found: x.dim() });
    }
    let values = x.eigenvalues();
    if values.iter().any(|&v| v <= 0.0 || v >= 1.0) {
        return Ok(f64::NEG_INFINITY);
    }
    let ld = values.iter().map(|v| v.ln()).sum::<f64>();
    let ld1 = values.iter().map(|v| (1.0 - v).ln()).sum::<f64>();
    let pf = p as f64;
    Ok(-ln_multibeta(p, a, b) + (a - pf) * ld + (b - pf) * ld1)
}

/// Log-density of `W_p(a)`; `−∞` unless `X` is positive definite.
pub fn log_density_wishart(p: usize, a: f64, x: &Hermitian) -> Result<f64> {
    check_shape(p, a, "a")?;
    if x.dim() != p {
        return Err(Error::DimensionMismatch { expected: p, found: x.dim() });
    }
    match log_det_cholesky(x.matrix()) {
        Some(ld) => Ok(-ln_multigamma(p, a) + (a - p as f64) * ld - x.trace()),
        None => Ok(f64::NEG_INFINITY),
    }
}

/// `log c` where `c = ∫_{‖A‖<1} det(I − A*A)^m dA = π^{p²} 𝓑_p(p, m+p) / Γ_p(p)`,
/// the normalizer of the circle canonical-moment density with exponent `m`.
pub fn ln_circle_normalizer(p: usize, m: f64) -> f64 {
    let pf = p as f64;
    pf * pf * PI.ln() + ln_multibeta(p, pf, m + pf) - ln_multigamma(p, pf)
}

/// Log-density of `A_k` for a uniform point of the `n`-th circle moment
/// space: `det(I − A*A)^{2p(n−k)} / c`. `−∞` off the open unit ball.
pub fn log_density_circle_canonical(p: usize, n: usize, k: usize, a: &CMatrix) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::BadShape(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let m = (2 * p * (n - k)) as f64;
    match log_det_cholesky(&(identity(p) - a.adjoint() * a)) {
        Some(ld) => Ok(m * ld - ln_circle_normalizer(p, m)),
        None => Ok(f64::NEG_INFINITY),
    }
}

/// Rate of `W_p(an)/n` at `X`: `tr X − a log det X − ap(1 − log a)`.
pub fn wishart_rate(x: &Hermitian, a: f64) -> f64 {
    let p = x.dim() as f64;
    match log_det_cholesky(x.matrix()) {
        Some(ld) => x.trace() - a * ld - a * p * (1.0 - a.ln()),
        None => f64::INFINITY,
    }
}

fn open_unit_interval_eigenvalues(b: &Hermitian) -> Option<Vec<f64>> {
    let values = b.eigenvalues();
    values.iter().all(|&v| v > 0.0 && v < 1.0).then_some(values)
}

/// `−a log det(B − B²) − 2ap log 2` on `0 < B < I`, else `+∞`.
pub fn beta_rate_symmetric(b: &Hermitian, a: f64) -> f64 {
    match open_unit_interval_eigenvalues(b) {
        Some(values) => {
            -a * values.iter().map(|v| (v * (1.0 - v)).ln()).sum::<f64>() - 2.0 * a * b.dim() as f64 * LN_2
        }
        None => f64::INFINITY,
    }
}

/// `−a log det(I − B)` on `0 < B < I`, else `+∞`.
pub fn beta_rate_asymmetric(b: &Hermitian, a: f64) -> f64 {
    match open_unit_interval_eigenvalues(b) {
        Some(values) => -a * values.iter().map(|v| (1.0 - v).ln()).sum::<f64>(),
        None => f64::INFINITY,
    }
}

/// `tr X` on positive semidefinite `X`, else `+∞`.
pub fn scaled_wishart_rate(x: &Hermitian) -> f64 {
    let values = x.eigenvalues();
    let norm = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if values.first().is_some_and(|&v| v < -TOL * norm) {
        return f64::INFINITY;
    }
    x.trace()
}

/// Log-Laplace transform `log E e^{tr(K W)} = −a log det(I − K)` of `W_p(a)`; `+∞` unless `K < I`.
pub fn wishart_laplace(k: &Hermitian, a: f64) -> f64 {
    let p = k.dim();
    match log_det_cholesky(&(identity(p) - k.matrix())) {
        Some(ld) => -a * ld,
        None => f64::INFINITY,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    Wishart,
    Beta,
    Gue,
    Ginibre,
    Haar,
    CanonicalInterval,
    CanonicalCircle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub ensemble: Ensemble,
    pub p: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// For canonical ensembles, draw only `A_1..A_k` (or `U_1..U_k`) of the `n`-th space.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl EnsembleParams {
    /// Checks that the parameters needed by the ensemble are present and in range.
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::BadShape("p must be positive".into()));
        }
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::BadShape(format!("{name} is required for {:?}", self.ensemble)))
        };
        match self.ensemble {
            Ensemble::Wishart => check_shape(self.p, need(self.a, "a")?, "a"),
            Ensemble::Beta => {
                check_shape(self.p, need(self.a, "a")?, "a")?;
                check_shape(self.p, need(self.b, "b")?, "b")
            }
            Ensemble::CanonicalInterval | Ensemble::CanonicalCircle => match (self.n, self.k) {
                (Some(n), None) if n > 0 => Ok(()),
                (Some(n), Some(k)) if n > 0 && (1..=n).contains(&k) => Ok(()),
                _ => Err(Error::BadShape("canonical ensembles need n >= 1 and 1 <= k <= n".into())),
            },
            Ensemble::Gue | Ensemble::Ginibre | Ensemble::Haar => Ok(()),
        }
    }
}

/// One draw: a single matrix, or a canonical-moment vector.
#[derive(Clone, Debug, PartialEq)]
pub enum Draw {
    Matrix(CMatrix),
    Vector(Vec<CMatrix>),
}

#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub params: EnsembleParams,
    pub draws: Vec<Draw>,
    pub provenance_seed: RngStream,
}

impl SampleBatch {
    pub fn count(&self) -> usize {
        self.draws.len()
    }
}

fn draw_one<R: Rng + ?Sized>(params: &EnsembleParams, rng: &mut R) -> Result<Draw> {
    let p = params.p;
    let a = params.a.unwrap_or(f64::NAN);
    let b = params.b.unwrap_or(f64::NAN);
    let n = params.n.unwrap_or(0);
    let k = params.k.unwrap_or(n);
    Ok(match params.ensemble {
        Ensemble::Wishart => Draw::Matrix(sample_complex_wishart(p, a, rng)?.matrix().clone()),
        Ensemble::Beta => Draw::Matrix(sample_matrix_beta(p, a, b, rng)?.into_matrix()),
        Ensemble::Gue => Draw::Matrix(sample_gue(p, rng).into_matrix()),
        Ensemble::Ginibre => Draw::Matrix(sample_ginibre(p, rng)),
        Ensemble::Haar => Draw::Matrix(sample_haar_unitary(p, rng)),
        Ensemble::CanonicalInterval => Draw::Vector(
            sample_canonical_interval_prefix(n, k, p, rng)?
                .canon()
                .iter()
                .map(|u| u.matrix().clone())
                .collect(),
        ),
        Ensemble::CanonicalCircle => Draw::Vector(sample_canonical_circle_prefix(n, k, p, rng)?.canon().to_vec()),
    })
}

/// `count` independent draws; draw `i` uses `stream.substream(i)`, so the
/// batch is identical for any thread count.
pub fn sample_batch(params: &EnsembleParams, count: usize, stream: RngStream) -> Result<SampleBatch> {
    params.validate()?;
    let draws = (0..count as u64)
        .into_par_iter()
        .map(|i| draw_one(params, &mut stream.substream(i).rng()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleBatch {
        params: params.clone(),
        draws,
        provenance_seed: stream,
    })
}

/// Maps `f` over `count` per-index substreams in parallel, preserving order.
pub fn par_draws<T: Send>(count: usize, stream: RngStream, f: impl Fn(&mut rand_chacha::ChaCha8Rng) -> T + Sync) -> Vec<T> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| f(&mut stream.substream(i).rng()))
        .collect()
}
