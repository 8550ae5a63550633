//! Trigonometric moment space of matrix measures on the unit circle.
//!
//! Moments are `Γ_j = ∫ e^{ijθ} dμ(θ)` with `Γ_0 = I` and `Γ_{-j} = Γ_j*`;
//! only `Γ_1..Γ_n` are stored. Given an interior prefix, `Γ_{n+1}` ranges over
//! `M_n + L_n^{1/2} 𝔻 R_n^{1/2}`, and the canonical moment (Verblunsky
//! coefficient) is the position inside that matrix ball.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::{
    assemble_blocks, cholesky_solve, frobenius_norm, hermitian_sqrt, identity, inv_sqrt,
    is_positive_definite, is_strict_contraction, log_det_cholesky, zeros, CMatrix, Hermitian, Psd,
};
use crate::interval::grid_log_det_rate;
use crate::measure::{DensityGridMeasure, MatrixMeasure};

/// Minimum number of angular nodes accepted by the measure-level rate.
pub const MIN_GRID_NODES: usize = 8;

/// Trigonometric moments `Γ_1..Γ_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigMomentVector {
    p: usize,
    moments: Vec<CMatrix>,
}

impl TrigMomentVector {
    pub fn new(p: usize, moments: Vec<CMatrix>) -> Result<Self> {
        check_square(p, &moments)?;
        Ok(Self { p, moments })
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

    pub fn moments(&self) -> &[CMatrix] {
        &self.moments
    }

    pub fn prefix(&self, k: usize) -> TrigMomentVector {
        TrigMomentVector {
            p: self.p,
            moments: self.moments[..k].to_vec(),
        }
    }

    /// `Γ_j` for any integer `j` with `|j| ≤ n`.
    pub fn gamma(&self, j: isize) -> CMatrix {
        gamma_at(self.p, &self.moments, j)
    }
}

/// Canonical moments `A_1..A_n`, each a strict contraction.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleCanonicalVector {
    p: usize,
    canon: Vec<CMatrix>,
}

impl CircleCanonicalVector {
    pub fn new(p: usize, canon: Vec<CMatrix>) -> Result<Self> {
        check_square(p, &canon)?;
        if let Some(i) = canon.iter().position(|a| !is_strict_contraction(a)) {
            return Err(Error::NotStrictContraction { index: i + 1 });
        }
        Ok(Self { p, canon })
    }

    pub fn zeros(p: usize, n: usize) -> Self {
        Self {
            p,
            canon: vec![zeros(p); n],
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

    pub fn canon(&self) -> &[CMatrix] {
        &self.canon
    }

    pub fn scaled(&self, eps: f64) -> Result<Self> {
        let c = Complex64::new(eps, 0.0);
        Self::new(self.p, self.canon.iter().map(|a| a * c).collect())
    }
}

/// Left/right radii and centre of the range of the next moment.
#[derive(Clone, Debug)]
pub struct LrmState {
    pub l: Psd,
    pub r: Psd,
    pub m: CMatrix,
    pub level: usize,
}

impl LrmState {
    pub fn initial(p: usize) -> Self {
        LrmState {
            l: Psd::identity(p),
            r: Psd::identity(p),
            m: zeros(p),
            level: 0,
        }
    }
}

fn check_square(p: usize, items: &[CMatrix]) -> Result<()> {
    for m in items {
        if m.nrows() != p || m.ncols() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: if m.nrows() != p { m.nrows() } else { m.ncols() },
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix);
        }
    }
    Ok(())
}

fn gamma_at(p: usize, moments: &[CMatrix], j: isize) -> CMatrix {
    match j {
        0 => identity(p),
        j if j > 0 => moments[j as usize - 1].clone(),
        j => moments[(-j) as usize - 1].adjoint(),
    }
}

/// `T_n = (Γ_{i-j})_{i,j=0..n}`, an `(n+1)p` square Hermitian matrix.
pub fn block_toeplitz(g: &TrigMomentVector) -> Hermitian {
    toeplitz_of(g.p, &g.moments, false)
}

/// Block Toeplitz matrix of `Γ_1..Γ_n`; `transposed` selects `(Γ_{j-i})`,
/// the block reversal of `(Γ_{i-j})`, which has the same determinant and
/// is the orientation in which the range formulas are stated.
fn toeplitz_of(p: usize, moments: &[CMatrix], transposed: bool) -> Hermitian {
    let n = moments.len();
    let m = assemble_blocks(n + 1, n + 1, p, |i, j| {
        let d = i as isize - j as isize;
        gamma_at(p, moments, if transposed { -d } else { d })
    });
    Hermitian::symmetrize(m)
}

/// `T_n` positive definite within the module tolerance.
pub fn is_interior_circle(g: &TrigMomentVector) -> bool {
    is_positive_definite(&block_toeplitz(g))
}

/// Solves against the level-`k-1` Toeplitz matrix for the two row vectors
/// `(Γ_1..Γ_k)` and `(Γ_{-k}..Γ_{-1})`.
fn lrm_direct(p: usize, moments: &[CMatrix]) -> Result<(CMatrix, CMatrix, CMatrix)> {
    let k = moments.len();
    if k == 0 {
        return Ok((identity(p), identity(p), zeros(p)));
    }
    let row_l = assemble_blocks(1, k, p, |_, j| gamma_at(p, moments, j as isize + 1));
    let row_r = assemble_blocks(1, k, p, |_, j| gamma_at(p, moments, j as isize - k as isize));
    let t = toeplitz_of(p, &moments[..k - 1], true);
    let mut rhs = CMatrix::zeros(k * p, 2 * p);
    rhs.view_mut((0, 0), (k * p, p)).copy_from(&row_l.adjoint());
    rhs.view_mut((0, p), (k * p, p)).copy_from(&row_r.adjoint());
    let x = cholesky_solve(t.matrix(), &rhs).ok_or(Error::NotInterior { level: k })?;
    let x_l = x.columns(0, p);
    let x_r = x.columns(p, p);
    let l = identity(p) - &row_l * x_l;
    let r = identity(p) - &row_r * x_r;
    let m = &row_l * x_r;
    Ok((l, r, m))
}

/// `L_n`, `R_n`, `M_n` of an interior prefix `Γ_1..Γ_n`.
pub fn lrm_matrices(g: &TrigMomentVector) -> Result<LrmState> {
    if !is_interior_circle(g) {
        return Err(Error::NotInterior { level: g.len() });
    }
    let (l, r, m) = lrm_direct(g.p, &g.moments)?;
    let not_interior = |_| Error::NotInterior { level: g.len() };
    Ok(LrmState {
        l: Psd::from_matrix(l).map_err(not_interior)?,
        r: Psd::from_matrix(r).map_err(not_interior)?,
        m,
        level: g.len(),
    })
}

/// One step of `L_k = L^{1/2}(I − A A*)L^{1/2}`, `R_k = R^{1/2}(I − A* A)R^{1/2}`.
pub fn lr_recursion(state: &LrmState, a: &CMatrix) -> Result<(Psd, Psd)> {
    if !is_strict_contraction(a) {
        return Err(Error::NotStrictContraction { index: state.level + 1 });
    }
    let p = a.nrows();
    let step = |side: &Psd, defect: CMatrix| {
        let root = hermitian_sqrt(side);
        Psd::new(Hermitian::symmetrize(defect).congruence(root.matrix()))
    };
    let l = step(&state.l, identity(p) - a * a.adjoint())?;
    let r = step(&state.r, identity(p) - a.adjoint() * a)?;
    Ok((l, r))
}

/// Verblunsky coefficients via the direct formula at every level.
pub fn to_canonical_circle(g: &TrigMomentVector) -> Result<CircleCanonicalVector> {
    if !is_interior_circle(g) {
        return Err(Error::NotInterior { level: g.len() });
    }
    let p = g.p;
    let mut canon = Vec::with_capacity(g.len());
    for k in 1..=g.len() {
        let (l, r, m) = lrm_direct(p, &g.moments[..k - 1])?;
        let not_interior = |_| Error::NotInterior { level: k };
        let li = inv_sqrt(&Psd::from_matrix(l).map_err(not_interior)?).map_err(not_interior)?;
        let ri = inv_sqrt(&Psd::from_matrix(r).map_err(not_interior)?).map_err(not_interior)?;
        let a = li.matrix() * (&g.moments[k - 1] - m) * ri.matrix();
        if !is_strict_contraction(&a) {
            return Err(Error::NotInterior { level: k });
        }
        canon.push(a);
    }
    Ok(CircleCanonicalVector { p, canon })
}

/// Inverse of [`to_canonical_circle`]: `Γ_k = L^{1/2} A_k R^{1/2} + M`, with
/// `L`, `R` advanced by [`lr_recursion`] and `M` recomputed from the prefix.
pub fn from_canonical_circle(a: &CircleCanonicalVector) -> Result<TrigMomentVector> {
    let p = a.p;
    let mut state = LrmState::initial(p);
    let mut moments: Vec<CMatrix> = Vec::with_capacity(a.len());
    for (k, ak) in a.canon.iter().enumerate() {
        if !is_strict_contraction(ak) {
            return Err(Error::NotStrictContraction { index: k + 1 });
        }
        state.m = lrm_direct(p, &moments)?.2;
        let gk = hermitian_sqrt(&state.l).matrix() * ak * hermitian_sqrt(&state.r).matrix() + &state.m;
        let (l, r) = lr_recursion(&state, ak)?;
        state = LrmState {
            l,
            r,
            m: zeros(p),
            level: k + 1,
        };
        moments.push(gk);
    }
    Ok(TrigMomentVector { p, moments })
}

/// `det T_k / det T_{k-1}` for an interior `Γ_1..Γ_k`.
pub fn toeplitz_det_ratio(g: &TrigMomentVector) -> Result<f64> {
    log_det_ratio(g).map(f64::exp)
}

fn log_det_ratio(g: &TrigMomentVector) -> Result<f64> {
    let k = g.len();
    if k == 0 {
        return Ok(0.0);
    }
    let err = || Error::NotInterior { level: k };
    let top = log_det_cholesky(toeplitz_of(g.p, &g.moments, false).matrix()).ok_or_else(err)?;
    let below = log_det_cholesky(toeplitz_of(g.p, &g.moments[..k - 1], false).matrix()).ok_or_else(err)?;
    Ok(top - below)
}

/// `Γ_j = ∫ e^{ijθ} dμ(θ)` for `j = 1..n`.
pub fn trig_moments_of_measure(mu: &impl MatrixMeasure, n: usize) -> Result<TrigMomentVector> {
    mu.check_normalized()?;
    let moments = (1..=n)
        .map(|j| {
            let j = j as f64;
            mu.integrate(&|t| Complex64::from_polar(1.0, j * t))
        })
        .collect();
    Ok(TrigMomentVector { p: mu.p(), moments })
}

/// `−2p Σ log det(I − A_i* A_i)`, infinite unless every `A_i` is a strict contraction.
pub fn rate_canonical_circle(canon: &[CMatrix]) -> f64 {
    let Some(p) = canon.first().map(|a| a.nrows()) else {
        return 0.0;
    };
    let mut sum = 0.0;
    for a in canon {
        if !is_strict_contraction(a) {
            return f64::INFINITY;
        }
        match log_det_cholesky(&(identity(p) - a.adjoint() * a)) {
            Some(ld) => sum += ld,
            None => return f64::INFINITY,
        }
    }
    -2.0 * p as f64 * sum
}

/// `−2p log(det T_k / det T_{k-1})`, infinite off the interior.
pub fn rate_moments_circle(g: &TrigMomentVector) -> f64 {
    if g.is_empty() {
        return 0.0;
    }
    if !is_interior_circle(g) {
        return f64::INFINITY;
    }
    match log_det_ratio(g) {
        Ok(ld) => -2.0 * g.p as f64 * ld,
        Err(_) => f64::INFINITY,
    }
}

/// `−(p/π) ∫ log det W(θ) dθ` with `W` the density relative to `dθ/2π`,
/// evaluated with the grid's quadrature weights (which sum to one).
pub fn rate_measure_circle(mu: &DensityGridMeasure) -> Result<f64> {
    if mu.len() < MIN_GRID_NODES {
        return Err(Error::GridTooCoarse {
            nodes: mu.len(),
            min: MIN_GRID_NODES,
        });
    }
    Ok(grid_log_det_rate(mu, 2.0 * mu.p() as f64))
}

/// `‖ψ⁻¹(εA) − εA‖ / (ε‖A‖)` in the Frobenius norm of the stacked vector;
/// zero when `A = 0`.
pub fn linearization_residual(a: &CircleCanonicalVector, eps: f64) -> Result<f64> {
    let norm = a.canon.iter().map(|m| frobenius_norm(m).powi(2)).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let scaled = a.scaled(eps)?;
    let g = from_canonical_circle(&scaled)?;
    let diff = g
        .moments
        .iter()
        .zip(&scaled.canon)
        .map(|(x, y)| frobenius_norm(&(x - y)).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(diff / (eps * norm))
}



#[cfg(test)]
mod properties {
    use super::*;
    use crate::ensembles::test_support::contraction;
    use crate::hermitian::test_support::max_abs;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn round_trip_and_rate_agreement(seed in any::<u64>(), p in 1usize..=3, n in 1usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = CircleCanonicalVector::new(p, (0..n).map(|_| contraction(p, 0.9, &mut rng)).collect()).unwrap();
            let g = from_canonical_circle(&a).unwrap();
            prop_assert!(is_interior_circle(&g));
            let back = to_canonical_circle(&g).unwrap();
            for (x, y) in back.canon().iter().zip(a.canon()) {
                prop_assert!(max_abs(&(x - y)) < 1e-9);
            }
            let canonical = rate_canonical_circle(a.canon());
            prop_assert!(canonical >= 0.0);
            prop_assert!((canonical - rate_moments_circle(&g)).abs() < 1e-8 * (1.0 + canonical));
        }
    }
}
