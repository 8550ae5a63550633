//! Moment space of matrix measures on `[0,1]`.
//!
//! A moment vector `(S_1, …, S_n)` is interior iff its two block Hankel
//! matrices are positive definite. Each `S_k` then ranges over the open
//! Loewner interval `(S⁻_k, S⁺_k)`, determined by `S_1..S_{k-1}`, and the
//! canonical moment `U_k` is the relative position of `S_k` in that range:
//!
//! ```text
//! U_k = (S⁺_k − S⁻_k)^{-1/2} (S_k − S⁻_k) (S⁺_k − S⁻_k)^{-1/2}
//! ```

use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::circle::CircleCanonicalVector;
use crate::error::{Error, Result};
use crate::hermitian::{
    assemble_blocks, cholesky_solve, hermitian_sqrt, identity, inv_sqrt, is_positive_definite,
    log_det_cholesky, CMatrix, Hermitian, Psd, TOL,
};
use crate::measure::{DensityGridMeasure, MatrixMeasure};

/// Minimum number of quadrature nodes accepted by the measure-level rate.
pub const MIN_GRID_NODES: usize = 8;

/// Moments `S_1..S_n` of a matrix measure on `[0,1]`; `S_0 = I` is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalMomentVector {
    p: usize,
    moments: Vec<Hermitian>,
}

impl IntervalMomentVector {
    pub fn new(p: usize, moments: Vec<Hermitian>) -> Result<Self> {
        check_dims(p, &moments)?;
        Ok(Self { p, moments })
    }

    pub fn from_matrices(p: usize, moments: Vec<CMatrix>) -> Result<Self> {
        let moments = moments.into_iter().map(Hermitian::new).collect::<Result<Vec<_>>>()?;
        Self::new(p, moments)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    pub fn moments(&self) -> &[Hermitian] {
        &self.moments
    }

    pub fn prefix(&self, k: usize) -> IntervalMomentVector {
        IntervalMomentVector {
            p: self.p,
            moments: self.moments[..k].to_vec(),
        }
    }

    /// `S_j`, with `S_0 = I`.
    pub fn moment(&self, j: usize) -> CMatrix {
        moment_at(self.p, &self.moments, j)
    }
}

/// Canonical moments `U_1..U_n`, each strictly between `0` and `I`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalCanonicalVector {
    p: usize,
    canon: Vec<Hermitian>,
}

impl IntervalCanonicalVector {
    pub fn new(p: usize, canon: Vec<Hermitian>) -> Result<Self> {
        check_dims(p, &canon)?;
        for (i, u) in canon.iter().enumerate() {
            if !strictly_inside_unit_interval(u) {
                return Err(Error::NotInInterior { index: i + 1 });
            }
        }
        Ok(Self { p, canon })
    }

    pub fn from_matrices(p: usize, canon: Vec<CMatrix>) -> Result<Self> {
        let canon = canon.into_iter().map(Hermitian::new).collect::<Result<Vec<_>>>()?;
        Self::new(p, canon)
    }

    /// The constant vector `(I/2, …, I/2)`: canonical moments of the arcsine law.
    pub fn arcsine(p: usize, n: usize) -> Self {
        Self {
            p,
            canon: vec![Hermitian::scaled_identity(p, 0.5); n],
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.canon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canon.is_empty()
    }

    pub fn canon(&self) -> &[Hermitian] {
        &self.canon
    }
}

/// Admissible Loewner range `(S⁻_{n+1}, S⁺_{n+1})` of the next moment.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentRange {
    pub lower: Hermitian,
    pub upper: Hermitian,
}

impl MomentRange {
    pub fn width(&self) -> Hermitian {
        &self.upper - &self.lower
    }
}

fn check_dims(p: usize, items: &[Hermitian]) -> Result<()> {
    match items.iter().find(|m| m.dim() != p) {
        Some(m) => Err(Error::DimensionMismatch {
            expected: p,
            found: m.dim(),
        }),
        None => Ok(()),
    }
}

fn moment_at(p: usize, moments: &[Hermitian], j: usize) -> CMatrix {
    if j == 0 {
        identity(p)
    } else {
        moments[j - 1].matrix().clone()
    }
}

fn strictly_inside_unit_interval(u: &Hermitian) -> bool {
    let values = u.eigenvalues();
    values.first().is_none_or(|&v| v > TOL) && values.last().is_none_or(|&v| v < 1.0 - TOL)
}

/// Block Hankel pair `(H̲_n, H̄_n)` of a moment vector of length `n ≥ 1`.
///
/// For `n = 2m`: `H̲ = (S_{i+j})_{0..=m}` and `H̄ = (S_{i+j+1} − S_{i+j+2})_{0..m}`.
/// For `n = 2m+1`: `H̲ = (S_{i+j+1})_{0..=m}` and `H̄ = (S_{i+j} − S_{i+j+1})_{0..=m}`.
pub fn hankel_pair(s: &IntervalMomentVector) -> (Hermitian, Hermitian) {
    hankel_pair_of(s.p, &s.moments)
}

fn hankel_pair_of(p: usize, moments: &[Hermitian]) -> (Hermitian, Hermitian) {
    let n = moments.len();
    let m = n / 2;
    let sm = |j: usize| moment_at(p, moments, j);
    let (lower, upper) = if n % 2 == 0 {
        (
            assemble_blocks(m + 1, m + 1, p, |i, j| sm(i + j)),
            assemble_blocks(m, m, p, |i, j| sm(i + j + 1) - sm(i + j + 2)),
        )
    } else {
        (
            assemble_blocks(m + 1, m + 1, p, |i, j| sm(i + j + 1)),
            assemble_blocks(m + 1, m + 1, p, |i, j| sm(i + j) - sm(i + j + 1)),
        )
    };
    (Hermitian::symmetrize(lower), Hermitian::symmetrize(upper))
}

/// Both block Hankel matrices positive definite (relative margin `TOL`).
pub fn is_interior_interval(s: &IntervalMomentVector) -> bool {
    interior_of(s.p, &s.moments)
}

fn interior_of(p: usize, moments: &[Hermitian]) -> bool {
    if moments.is_empty() {
        return true;
    }
    let (lower, upper) = hankel_pair_of(p, moments);
    is_positive_definite(&lower) && is_positive_definite(&upper)
}

/// Range of `S_{n+1}` given the interior vector `S_1..S_n`.
///
/// `S⁻_{n+1} = h̲* H̲_{n-1}^{-1} h̲` and `S⁺_{n+1} = S_n − h̄* H̄_{n-1}^{-1} h̄`,
/// with `S⁻_1 = 0`, `S⁺_1 = I` and `S⁺_2 = S_1`.
pub fn moment_range(s: &IntervalMomentVector) -> Result<MomentRange> {
    if !is_interior_interval(s) {
        return Err(Error::NotInterior { level: s.len() });
    }
    range_unchecked(s.p, &s.moments)
}

/// Range computation without the interiority scan; fails with `NotInterior`
/// only when a Cholesky solve breaks down.
fn range_unchecked(p: usize, moments: &[Hermitian]) -> Result<MomentRange> {
    let n = moments.len();
    if n == 0 {
        return Ok(MomentRange {
            lower: Hermitian::zeros(p),
            upper: Hermitian::identity(p),
        });
    }
    let sm = |j: usize| moment_at(p, moments, j);
    let not_interior = || Error::NotInterior { level: n };

    // Lower end: h̲ has ⌈n/2⌉ blocks S_{n-c+1..=n}; H̲_{n-1} is the lower Hankel of S_1..S_{n-1}.
    let count = n.div_ceil(2);
    let start = n - count + 1;
    let h = assemble_blocks(count, 1, p, |i, _| sm(start + i));
    let (hankel_lower, hankel_upper) = hankel_pair_of(p, &moments[..n - 1]);
    let x = cholesky_solve(hankel_lower.matrix(), &h).ok_or_else(not_interior)?;
    let lower = Hermitian::symmetrize(h.adjoint() * x);

    // Upper end: h̄ has ⌊n/2⌋ blocks S_j − S_{j+1}, j = n-c..n-1.
    let upper = if n == 1 {
        Hermitian::symmetrize(sm(1))
    } else {
        let count = n / 2;
        let start = n - count;
        let h = assemble_blocks(count, 1, p, |i, _| sm(start + i) - sm(start + i + 1));
        let x = cholesky_solve(hankel_upper.matrix(), &h).ok_or_else(not_interior)?;
        Hermitian::symmetrize(sm(n) - h.adjoint() * x)
    };
    Ok(MomentRange { lower, upper })
}

fn range_width(range: &MomentRange, level: usize) -> Result<Psd> {
    let width = Psd::new(range.width()).map_err(|_| Error::NotInterior { level })?;
    if !width.is_positive_definite() {
        return Err(Error::NotInterior { level });
    }
    Ok(width)
}

/// The canonical-moment map on the interior of the moment space.
pub fn to_canonical_interval(s: &IntervalMomentVector) -> Result<IntervalCanonicalVector> {
    if !is_interior_interval(s) {
        return Err(Error::NotInterior { level: s.len() });
    }
    let mut canon = Vec::with_capacity(s.len());
    for k in 1..=s.len() {
        let range = range_unchecked(s.p, &s.moments[..k - 1])?;
        let width = range_width(&range, k)?;
        let scale = inv_sqrt(&width).map_err(|_| Error::NotInterior { level: k })?;
        let offset = s.moments[k - 1].matrix() - range.lower.matrix();
        let u = Hermitian::symmetrize(scale.matrix() * offset * scale.matrix());
        if !strictly_inside_unit_interval(&u) {
            return Err(Error::NotInterior { level: k });
        }
        canon.push(u);
    }
    Ok(IntervalCanonicalVector { p: s.p, canon })
}

/// Inverse of [`to_canonical_interval`]: rebuilds `S_k = S⁻_k + D^{1/2} U_k D^{1/2}`
/// with `D = S⁺_k − S⁻_k`, one level at a time.
pub fn from_canonical_interval(u: &IntervalCanonicalVector) -> Result<IntervalMomentVector> {
    let p = u.p;
    let mut moments: Vec<Hermitian> = Vec::with_capacity(u.len());
    for (k, uk) in u.canon.iter().enumerate() {
        if !strictly_inside_unit_interval(uk) {
            return Err(Error::NotInInterior { index: k + 1 });
        }
        let range = range_unchecked(p, &moments)?;
        let width = range_width(&range, k + 1)?;
        let root = hermitian_sqrt(&width);
        let sk = range.lower.matrix() + root.matrix() * uk.matrix() * root.matrix();
        moments.push(Hermitian::symmetrize(sk));
    }
    Ok(IntervalMomentVector { p, moments })
}

/// `∏ det(U_i (I − U_i))`, which equals `det(S⁺_{k+1} − S⁻_{k+1})`.
pub fn range_det_identity(u: &IntervalCanonicalVector) -> f64 {
    u.canon
        .iter()
        .map(|ui| ui.eigenvalues().iter().map(|v| v * (1.0 - v)).product::<f64>())
        .product()
}

/// Moments `S_j = ∫ x^j dμ`, `j = 1..n`.
pub fn moments_of_measure(mu: &impl MatrixMeasure, n: usize) -> Result<IntervalMomentVector> {
    mu.check_normalized()?;
    let moments = (1..=n)
        .map(|j| {
            let jj = j as i32;
            Hermitian::symmetrize(mu.integrate(&|x| Complex64::new(x.powi(jj), 0.0)))
        })
        .collect();
    Ok(IntervalMomentVector { p: mu.p(), moments })
}

/// Canonical moments of `μ` computed on the circle: the Chebyshev moments
/// `Γ_j = ∫ T_j(2x − 1) dμ(x)` are the trigonometric moments of the symmetric
/// image of `μ` under `x = (1 + cos θ)/2`, whose canonical moments are `2U_j − I`.
/// Block Toeplitz systems stay well conditioned where the power-moment Hankel
/// route loses a digit per level.
pub fn canonical_interval_via_circle(mu: &impl MatrixMeasure, n: usize) -> Result<IntervalCanonicalVector> {
    let moments = chebyshev_moments(mu, n)?;
    let a = crate::circle::to_canonical_circle(&crate::circle::TrigMomentVector::new(mu.p(), moments)?)?;
    circle_interval_bridge(&a)
}

/// `∫ T_j(2x − 1) dμ(x)` for `j = 1..n`.
pub fn chebyshev_moments(mu: &impl MatrixMeasure, n: usize) -> Result<Vec<CMatrix>> {
    mu.check_normalized()?;
    Ok((1..=n)
        .map(|j| {
            let j = j as f64;
            let m = mu.integrate(&|x| Complex64::new((j * (2.0 * x - 1.0).clamp(-1.0, 1.0).acos()).cos(), 0.0));
            Hermitian::symmetrize(m).into_matrix()
        })
        .collect())
}

/// Rate of the first `k` canonical moments of a uniformly drawn moment vector:
/// `−p Σ log det(U_i − U_i²) − 2kp² log 2`, infinite off `(0, I)^k`.
pub fn rate_canonical_interval(canon: &[Hermitian]) -> f64 {
    let Some(p) = canon.first().map(Hermitian::dim) else {
        return 0.0;
    };
    let pf = p as f64;
    let mut sum = 0.0;
    for u in canon {
        let values = u.eigenvalues();
        if values.iter().any(|&v| v <= TOL || v >= 1.0 - TOL) {
            return f64::INFINITY;
        }
        sum += values.iter().map(|v| (v * (1.0 - v)).ln()).sum::<f64>();
    }
    -pf * sum - 2.0 * canon.len() as f64 * pf * pf * LN_2
}

/// Rate of the first `k` moments: `−p log det(S⁺_{k+1} − S⁻_{k+1}) − 2kp² log 2`,
/// infinite off the interior.
pub fn rate_moments_interval(s: &IntervalMomentVector) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    if !is_interior_interval(s) {
        return f64::INFINITY;
    }
    let Ok(range) = range_unchecked(s.p, &s.moments) else {
        return f64::INFINITY;
    };
    let Some(log_det) = log_det_cholesky(range.width().matrix()) else {
        return f64::INFINITY;
    };
    let pf = s.p as f64;
    -pf * log_det - 2.0 * s.len() as f64 * pf * pf * LN_2
}

/// Measure-level rate `−p ∫ log det W dν₁`, where `W` is the density of the
/// absolutely continuous part relative to the arcsine law. The quadrature
/// weights of the grid stand in for `ν₁`; any singular part is ignored.
pub fn rate_measure_interval(mu: &DensityGridMeasure) -> Result<f64> {
    if mu.len() < MIN_GRID_NODES {
        return Err(Error::GridTooCoarse {
            nodes: mu.len(),
            min: MIN_GRID_NODES,
        });
    }
    Ok(grid_log_det_rate(mu, mu.p() as f64))
}

/// `−scale · Σ w_i log det W_i`, or `+∞` if some weighted node is singular.
pub(crate) fn grid_log_det_rate(mu: &DensityGridMeasure, scale: f64) -> f64 {
    let mut acc = 0.0;
    for (w, v) in mu.quadrature_weights().iter().zip(mu.values()) {
        if !v.is_positive_definite() {
            return f64::INFINITY;
        }
        match log_det_cholesky(v.matrix()) {
            Some(ld) => acc += w * ld,
            None => return f64::INFINITY,
        }
    }
    -scale * acc
}

/// `A_i = 2U_i − I`: canonical moments of the symmetric circle measure
/// attached to the affine image of `μ` on `[-1, 1]`.
pub fn interval_circle_bridge(u: &IntervalCanonicalVector) -> CircleCanonicalVector {
    let p = u.p;
    let canon = u
        .canon
        .iter()
        .map(|ui| ui.matrix() * Complex64::new(2.0, 0.0) - identity(p))
        .collect();
    CircleCanonicalVector::new(p, canon).expect("2U - I is a strict contraction for 0 < U < I")
}

/// Inverse bridge `U_i = (A_i + I)/2`; requires Hermitian strict contractions.
pub fn circle_interval_bridge(a: &CircleCanonicalVector) -> Result<IntervalCanonicalVector> {
    let p = a.p();
    let canon = a
        .canon()
        .iter()
        .enumerate()
        .map(|(i, ai)| {
            let h = Hermitian::new(ai.clone())?;
            if crate::hermitian::frobenius_norm(&(h.matrix() - ai)) > TOL * (1.0 + crate::hermitian::frobenius_norm(ai)) {
                return Err(Error::InconsistentInputs(format!("A_{} is not Hermitian", i + 1)));
            }
            Ok(Hermitian::symmetrize((h.matrix() + identity(p)) * Complex64::new(0.5, 0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    IntervalCanonicalVector::new(p, canon)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::hermitian::{polar_decompose, real_diagonal, test_support::random_complex};
    use rand::Rng;

    /// Random `V diag(λ) V*` with eigenvalues uniform in `[lo, hi]`.
    pub fn random_between(p: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Hermitian {
        let (v, _) = polar_decompose(&random_complex(p, rng)).unwrap();
        let lambda: Vec<f64> = (0..p).map(|_| rng.random_range(lo..hi)).collect();
        Hermitian::symmetrize(&v * real_diagonal(&lambda) * v.adjoint())
    }

    pub fn random_canonical(p: usize, n: usize, rng: &mut impl Rng) -> IntervalCanonicalVector {
        let canon = (0..n).map(|_| random_between(p, 0.1, 0.9, rng)).collect();
        IntervalCanonicalVector::new(p, canon).unwrap()
    }

    /// Scalar-embedded moment vector `s_j · I`.
    pub fn scalar_embedded(p: usize, s: &[f64]) -> IntervalMomentVector {
        IntervalMomentVector::new(p, s.iter().map(|&v| Hermitian::scaled_identity(p, v)).collect()).unwrap()
    }
}
