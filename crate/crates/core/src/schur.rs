//! Matrix Carathéodory and Schur functions of measures on the unit circle.
//!
//! `F(z) = ∫ (e^{iθ}+z)/(e^{iθ}−z) dμ(θ)` is the Carathéodory function of `μ`
//! and `f(z) = z^{-1}(F−I)(F+I)^{-1}` its Schur function, with Schur parameters
//! `α_k` linked through
//! `f_{k} = (B^R_{k+1})^{-1}(z f_{k+1} + α_{k+1}^*)(I + z α_{k+1} f_{k+1})^{-1} B^L_{k+1}`.
//!
//! For `p ≥ 2` the parameters are not the canonical moments themselves.
//! Both normalize `Γ_k − M_{k−1}`, the canonical moments by the Hermitian
//! roots of `L_{k−1}`, `R_{k−1}` and the Schur parameters by the ordered
//! products `P_{k−1} = B^L_1⋯B^L_{k−1}` and `Q_{k−1} = B^R_{k−1}⋯B^R_1`, so
//! `A_k = (L_{k−1}^{-1/2} P_{k−1}) α_k (Q_{k−1} R_{k−1}^{-1/2})` with unitary
//! factors. They coincide for `k ≤ 2` and always share singular values. Use
//! [`schur_params_from_canonical`] and [`canonical_from_schur_params`] to convert.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::circle::{lr_recursion, CircleCanonicalVector, LrmState, TrigMomentVector, MIN_GRID_NODES};
use crate::error::{Error, Result};
use crate::hermitian::{
    contraction_status, hermitian_sqrt, identity, inverse, log_det_cholesky, spectral_norm,
    CMatrix, Hermitian, Psd, TOL,
};
use crate::measure::{uniform_angles, DensityGridMeasure, MatrixMeasure};

/// Default number of angular nodes for boundary grids.
pub const DEFAULT_BOUNDARY_NODES: usize = 512;
/// Largest modulus accepted by interior evaluations.
pub const MAX_INTERIOR_MODULUS: f64 = 1.0 - 1e-6;
/// Radius of the small circle used to evaluate `f(0)` from a Carathéodory function.
const ORIGIN_RADIUS: f64 = 1e-3;

/// Schur parameters `A_1..A_n`, all strict contractions.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurParameterSequence {
    p: usize,
    params: Vec<CMatrix>,
}

impl SchurParameterSequence {
    pub fn new(p: usize, params: Vec<CMatrix>) -> Result<Self> {
        let checked = CircleCanonicalVector::new(p, params)?;
        Ok(SchurParameterSequence {
            p,
            params: checked.canon().to_vec(),
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn params(&self) -> &[CMatrix] {
        &self.params
    }
}

/// Walks both normalizations side by side; `step` maps the input matrix at
/// level `k` to the output, given `(L^{1/2}, R^{1/2}, P, Q)`, and returns
/// `(A_k, α_k)` so the state can advance.
fn convert_levels(
    p: usize,
    input: &[CMatrix],
    step: impl Fn(&CMatrix, &CMatrix, &CMatrix, &CMatrix, &CMatrix) -> Result<(CMatrix, CMatrix)>,
) -> Result<(Vec<CMatrix>, Vec<CMatrix>)> {
    let mut state = LrmState::initial(p);
    let (mut left, mut right) = (identity(p), identity(p));
    let (mut canon, mut schur) = (Vec::with_capacity(input.len()), Vec::with_capacity(input.len()));
    for (k, x) in input.iter().enumerate() {
        let l_root = hermitian_sqrt(&state.l);
        let r_root = hermitian_sqrt(&state.r);
        let (a, alpha) = step(x, l_root.matrix(), r_root.matrix(), &left, &right)?;
        let (l, r) = lr_recursion(&state, &a)?;
        let (br, bl) = defect_matrices(&alpha)?;
        left *= bl.matrix();
        right = br.matrix() * right;
        state = LrmState { l, r, m: CMatrix::zeros(p, p), level: k + 1 };
        canon.push(a);
        schur.push(alpha);
    }
    Ok((canon, schur))
}

/// Schur parameters `α_k` of the Schur function of the measure with canonical moments `A_k`.
pub fn schur_params_from_canonical(a: &CircleCanonicalVector) -> Result<SchurParameterSequence> {
    let (_, params) = convert_levels(a.p(), a.canon(), |x, l_root, r_root, left, right| {
        let left_inv = inverse(left).ok_or(Error::Singular)?;
        let right_inv = inverse(right).ok_or(Error::Singular)?;
        Ok((x.clone(), left_inv * l_root * x * r_root * right_inv))
    })?;
    SchurParameterSequence::new(a.p(), params)
}

/// Canonical moments of the measure whose Schur function has parameters `α_k`.
pub fn canonical_from_schur_params(alpha: &SchurParameterSequence) -> Result<CircleCanonicalVector> {
    let (canon, _) = convert_levels(alpha.p, &alpha.params, |x, l_root, r_root, left, right| {
        let l_inv = inverse(l_root).ok_or(Error::Singular)?;
        let r_inv = inverse(r_root).ok_or(Error::Singular)?;
        Ok((l_inv * left * x * right * r_inv, x.clone()))
    })?;
    CircleCanonicalVector::new(alpha.p, canon)
}

/// Taylor coefficients `G_0..G_{n-1}` of a Schur function.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurTaylorCoefficients {
    pub p: usize,
    pub coeffs: Vec<CMatrix>,
}

/// Taylor coefficients `C_1..C_n` of `F(z) = I + 2 Σ C_k z^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct CaratheodoryCoefficients {
    pub p: usize,
    pub coeffs: Vec<CMatrix>,
}

/// Values of a matrix function on equispaced angles `θ_j = −π + 2πj/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryGrid<T> {
    pub nodes: Vec<f64>,
    pub values: Vec<T>,
}

/// A PSD density `W(θ)` relative to `dθ/2π`, one matrix per node.
pub type BoundaryDensityGrid = BoundaryGrid<Psd>;
/// Boundary values `f(e^{iθ})` of a Schur function.
pub type SchurBoundaryGrid = BoundaryGrid<CMatrix>;

impl<T> BoundaryGrid<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn check_resolution(&self) -> Result<()> {
        if self.nodes.len() < MIN_GRID_NODES {
            return Err(Error::GridTooCoarse {
                nodes: self.nodes.len(),
                min: MIN_GRID_NODES,
            });
        }
        Ok(())
    }
}

impl BoundaryDensityGrid {
    /// Nodes where `det W` vanishes.
    pub fn singular_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.values[i].is_positive_definite()).collect()
    }

    /// The absolutely continuous measure `W(θ) dθ/2π` on this grid.
    pub fn to_measure(&self) -> Result<DensityGridMeasure> {
        let p = self.values.first().map_or(0, |v| v.dim());
        let n = self.len();
        DensityGridMeasure::new(p, self.nodes.clone(), self.values.clone(), vec![1.0 / n as f64; n], None)
    }
}

/// `C_k = Γ_k^*`.
pub fn caratheodory_coeffs(g: &TrigMomentVector) -> CaratheodoryCoefficients {
    CaratheodoryCoefficients {
        p: g.p(),
        coeffs: g.moments().iter().map(|m| m.adjoint()).collect(),
    }
}

fn check_interior(z: Complex64) -> Result<()> {
    if !(z.norm() <= MAX_INTERIOR_MODULUS) {
        return Err(Error::TooCloseToBoundary { modulus: z.norm() });
    }
    Ok(())
}

/// Herglotz integral `F(z) = ∫ (e^{iθ}+z)/(e^{iθ}−z) dμ(θ)` for `|z| ≤ 1 − 10⁻⁶`.
pub fn caratheodory_eval(mu: &impl MatrixMeasure, z: Complex64) -> Result<CMatrix> {
    check_interior(z)?;
    Ok(mu.integrate(&|t| {
        let e = Complex64::from_polar(1.0, t);
        (e + z) / (e - z)
    }))
}

/// `F(z) = I + 2 Σ C_k z^k` from a finite coefficient list.
pub fn caratheodory_series(c: &CaratheodoryCoefficients, z: Complex64) -> CMatrix {
    let mut acc = CMatrix::zeros(c.p, c.p);
    for ck in c.coeffs.iter().rev() {
        acc = (acc + ck * Complex64::new(2.0, 0.0)) * z;
    }
    acc + identity(c.p)
}

/// `f = z^{-1}(F − I)(F + I)^{-1}`. At `z = 0` the map has a removable
/// singularity; use [`schur_eval_from_measure`] or the Taylor coefficient `G_0`.
pub fn cayley_schur_from_caratheodory(f_value: &CMatrix, z: Complex64) -> Result<CMatrix> {
    if z.norm() == 0.0 {
        return Err(Error::InconsistentInputs(
            "Cayley map is singular at z = 0; use the series value G_0".into(),
        ));
    }
    let p = f_value.nrows();
    let plus = inverse(&(f_value + identity(p))).ok_or(Error::NonInvertible)?;
    Ok((f_value - identity(p)) * plus / z)
}

/// `F = (I + z f)(I − z f)^{-1}`.
pub fn cayley_caratheodory_from_schur(f: &CMatrix, z: Complex64) -> Result<CMatrix> {
    let p = f.nrows();
    let zf = f * z;
    let minus = inverse(&(identity(p) - &zf)).ok_or(Error::NonInvertible)?;
    Ok((identity(p) + zf) * minus)
}

/// Schur function of `μ` at `z`. Near the origin it averages the Cayley map
/// over a small circle, which reproduces `f(0)` up to `O(r^8)`.
pub fn schur_eval_from_measure(mu: &impl MatrixMeasure, z: Complex64) -> Result<CMatrix> {
    if z.norm() >= ORIGIN_RADIUS {
        return cayley_schur_from_caratheodory(&caratheodory_eval(mu, z)?, z);
    }
    let points = 8;
    let mut acc = CMatrix::zeros(mu.p(), mu.p());
    for j in 0..points {
        let w = z + Complex64::from_polar(ORIGIN_RADIUS, 2.0 * PI * j as f64 / points as f64);
        acc += cayley_schur_from_caratheodory(&caratheodory_eval(mu, w)?, w)?;
    }
    Ok(acc / Complex64::new(points as f64, 0.0))
}

/// `B^R = (I − A*A)^{1/2}` and `B^L = (I − AA*)^{1/2}`.
pub fn defect_matrices(a: &CMatrix) -> Result<(Psd, Psd)> {
    if !contraction_status(a).closed {
        return Err(Error::NotContraction);
    }
    let p = a.nrows();
    let defect = |m: CMatrix| -> Result<Psd> {
        let h = Hermitian::symmetrize(identity(p) - m).map_spectrum(|v| v.max(0.0));
        Ok(hermitian_sqrt(&Psd::new(h)?))
    };
    Ok((defect(a.adjoint() * a)?, defect(a * a.adjoint())?))
}

/// Taylor coefficients `G_0..G_{n-1}` of the Schur function with parameters
/// `A_1..A_n`. `G_m` depends on `A_1..A_{m+1}` only.
pub fn schur_taylor_from_params(a: &SchurParameterSequence) -> Result<SchurTaylorCoefficients> {
    let p = a.p;
    let n = a.len();
    // Coefficients of f_k for k = n−1 down to 0; f_k has n − k of them.
    let mut shifted: Vec<CMatrix> = Vec::new();
    for k in (0..n).rev() {
        let ak = &a.params[k];
        let (br, bl) = defect_matrices(ak)?;
        let br_inv = inverse(br.matrix()).ok_or(Error::NotStrictContraction { index: k + 1 })?;
        let bl_inv = inverse(bl.matrix()).ok_or(Error::NotStrictContraction { index: k + 1 })?;
        let bl = bl.matrix();
        let twist = &bl_inv * ak;
        let mut g: Vec<CMatrix> = Vec::with_capacity(n - k);
        g.push(ak.adjoint());
        for m in 1..n - k {
            let mut rhs = &br_inv * &shifted[m - 1];
            for (j, gj) in g.iter().enumerate() {
                rhs -= gj * &twist * &shifted[m - 1 - j];
            }
            g.push(rhs * bl);
        }
        shifted = g;
    }
    Ok(SchurTaylorCoefficients { p, coeffs: shifted })
}

/// Inverse of [`schur_taylor_from_params`]: runs the Schur algorithm on the
/// coefficients, `A_1 = G_0^*` and `G(f_1)` solved level by level.
pub fn schur_params_from_taylor(g: &SchurTaylorCoefficients) -> Result<SchurParameterSequence> {
    let p = g.p;
    let mut current = g.coeffs.clone();
    let mut params = Vec::with_capacity(current.len());
    while let Some(g0) = current.first() {
        let index = params.len() + 1;
        let a = g0.adjoint();
        if !contraction_status(&a).strict {
            return Err(Error::NotStrictContraction { index });
        }
        let (br, bl) = defect_matrices(&a)?;
        let br_inv = inverse(br.matrix()).ok_or(Error::NotStrictContraction { index })?;
        let bl_inv = inverse(bl.matrix()).ok_or(Error::NotStrictContraction { index })?;
        let twist = &bl_inv * &a;
        let mut next: Vec<CMatrix> = Vec::with_capacity(current.len() - 1);
        for m in 1..current.len() {
            let mut rhs = &current[m] * &bl_inv;
            for j in 1..m {
                rhs += &current[j] * &twist * &next[m - 1 - j];
            }
            next.push(&br_inv * rhs);
        }
        params.push(a);
        current = next;
    }
    Ok(SchurParameterSequence { p, params })
}

/// `f(z)` for the Schur function whose parameters are `A_1..A_n` followed by zeros.
pub fn schur_function_eval(a: &SchurParameterSequence, z: Complex64) -> Result<CMatrix> {
    let p = a.p;
    let mut f = CMatrix::zeros(p, p);
    for (k, ak) in a.params.iter().enumerate().rev() {
        let (br, bl) = defect_matrices(ak)?;
        let br_inv = inverse(br.matrix()).ok_or(Error::NotStrictContraction { index: k + 1 })?;
        let zf = &f * z;
        let denom = inverse(&(identity(p) + ak * &zf)).ok_or(Error::NonInvertible)?;
        f = br_inv * (zf + ak.adjoint()) * denom * bl.matrix();
    }
    Ok(f)
}

/// Taylor coefficients of an analytic matrix function from `m` samples on the
/// circle of radius `r`: `c_k = r^{-k} · (1/m) Σ_j f(r ω^j) ω^{-jk}`.
pub fn fft_taylor_oracle(
    f: impl Fn(Complex64) -> CMatrix,
    p: usize,
    r: f64,
    m: usize,
    count: usize,
) -> Vec<CMatrix> {
    let samples: Vec<CMatrix> = (0..m)
        .map(|j| f(Complex64::from_polar(r, 2.0 * PI * j as f64 / m as f64)))
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(m);
    let mut coeffs = vec![CMatrix::zeros(p, p); count.min(m)];
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for row in 0..p {
        for col in 0..p {
            for (b, s) in buf.iter_mut().zip(&samples) {
                *b = s[(row, col)];
            }
            fft.process(&mut buf);
            for (k, c) in coeffs.iter_mut().enumerate() {
                c[(row, col)] = buf[k] / (m as f64 * r.powi(k as i32));
            }
        }
    }
    coeffs
}

/// Spectral norm of the lower-triangular block Toeplitz matrix `(G_{i−j})`.
pub fn taylor_toeplitz_norm(g: &[CMatrix]) -> f64 {
    let Some(p) = g.first().map(|m| m.nrows()) else {
        return 0.0;
    };
    let n = g.len();
    let mut big = CMatrix::zeros(n * p, n * p);
    for i in 0..n {
        for j in 0..=i {
            big.view_mut((i * p, j * p), (p, p)).copy_from(&g[i - j]);
        }
    }
    spectral_norm(&big)
}

/// Whether `G_0..G_{n-1}` are the leading Taylor coefficients of some Schur function.
pub fn contraction_toeplitz_test(g: &[CMatrix]) -> bool {
    taylor_toeplitz_norm(g) <= 1.0 + TOL
}

/// `f(e^{iθ})` on `nodes` equispaced angles.
pub fn schur_boundary_values(a: &SchurParameterSequence, nodes: usize) -> Result<SchurBoundaryGrid> {
    let nodes: Vec<f64> = uniform_angles(nodes).collect();
    let values = nodes
        .iter()
        .map(|&t| schur_function_eval(a, Complex64::from_polar(1.0, t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryGrid { nodes, values })
}

/// `W(θ) = (I − e^{−iθ}f*)^{-1}(I − f*f)(I − e^{iθ}f)^{-1}`, the density of the
/// measure whose Schur function has boundary values `f`.
pub fn boundary_density_from_schur(f: &SchurBoundaryGrid) -> Result<BoundaryDensityGrid> {
    if f.nodes.len() != f.values.len() {
        return Err(Error::InconsistentInputs("nodes and values differ in length".into()));
    }
    let values = f
        .nodes
        .iter()
        .zip(&f.values)
        .map(|(&t, fv)| {
            if !contraction_status(fv).closed {
                return Err(Error::NotContraction);
            }
            let p = fv.nrows();
            let y = inverse(&(identity(p) - fv * Complex64::from_polar(1.0, t))).ok_or(Error::NonInvertible)?;
            let core = identity(p) - fv.adjoint() * fv;
            Psd::new(Hermitian::symmetrize(y.adjoint() * core * y))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryGrid {
        nodes: f.nodes.clone(),
        values,
    })
}

/// `Re F(e^{iθ}) = I + Σ (C_k e^{ikθ} + C_k^* e^{−ikθ})` for a finite coefficient list.
pub fn caratheodory_boundary_real_part(c: &CaratheodoryCoefficients, nodes: usize) -> Result<BoundaryDensityGrid> {
    let nodes: Vec<f64> = uniform_angles(nodes).collect();
    let values = nodes
        .iter()
        .map(|&t| {
            let mut acc = identity(c.p);
            for (k, ck) in c.coeffs.iter().enumerate() {
                let term = ck * Complex64::from_polar(1.0, (k + 1) as f64 * t);
                acc += &term + term.adjoint();
            }
            Psd::new(Hermitian::symmetrize(acc))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryGrid { nodes, values })
}

/// Mean over the grid of `log det`, or `None` if some determinant vanishes.
fn mean_log_det<'a>(values: impl Iterator<Item = &'a CMatrix>, count: usize) -> Option<f64> {
    let mut acc = 0.0;
    for v in values {
        acc += log_det_cholesky(v)?;
    }
    Some(acc / count as f64)
}

fn grid_dim<T>(grid: &BoundaryGrid<T>, dim: impl Fn(&T) -> usize) -> usize {
    grid.values.first().map_or(0, dim)
}

/// `−(p/π) ∫ log det Re F(e^{iθ}) dθ` by the trapezoid rule.
pub fn rate_caratheodory(re_f: &BoundaryDensityGrid) -> Result<f64> {
    re_f.check_resolution()?;
    let p = grid_dim(re_f, Psd::dim) as f64;
    if !re_f.singular_nodes().is_empty() {
        return Ok(f64::INFINITY);
    }
    Ok(mean_log_det(re_f.values.iter().map(Psd::matrix), re_f.len()).map_or(f64::INFINITY, |m| -2.0 * p * m))
}

fn defect_grid(f: &SchurBoundaryGrid) -> Vec<CMatrix> {
    f.values
        .iter()
        .map(|v| identity(v.nrows()) - v.adjoint() * v)
        .collect()
}

/// `−(p/π) ∫ log det(I − f*f) dθ` by the trapezoid rule.
pub fn rate_schur(f: &SchurBoundaryGrid) -> Result<f64> {
    f.check_resolution()?;
    let p = grid_dim(f, |m| m.nrows()) as f64;
    let defects = defect_grid(f);
    Ok(mean_log_det(defects.iter(), f.len()).map_or(f64::INFINITY, |m| -2.0 * p * m))
}

/// The three normalized entropies that coincide for a Bernstein–Szegő measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SzegoTriple {
    /// `Σ log det(I − A_k A_k^*)`.
    pub canonical: f64,
    /// `∫ log det W dθ/2π`.
    pub density: f64,
    /// `∫ log det(I − f*f) dθ/2π − 2 ∫ log|det(I − e^{iθ} f)| dθ/2π`.
    pub schur: f64,
    /// The Jensen term `∫ log|det(I − e^{iθ} f)| dθ/2π`, zero when `det(I − zf)` has no zeros in the disc.
    pub jensen: f64,
    pub gap_canonical_density: f64,
    pub gap_canonical_schur: f64,
    pub gap_density_schur: f64,
}

impl SzegoTriple {
    pub fn max_gap(&self) -> f64 {
        self.gap_canonical_density
            .max(self.gap_canonical_schur)
            .max(self.gap_density_schur)
    }
}

/// Evaluates the three sides of the Szegő identity from one parameter sequence
/// and boundary grids of its density and Schur function.
pub fn szego_triple_identity(
    a: &SchurParameterSequence,
    w: &BoundaryDensityGrid,
    f: &SchurBoundaryGrid,
) -> Result<SzegoTriple> {
    if w.nodes != f.nodes || w.values.len() != f.values.len() {
        return Err(Error::InconsistentInputs("density and Schur grids differ".into()));
    }
    let p = a.p;
    if grid_dim(w, Psd::dim) != p || grid_dim(f, |m| m.nrows()) != p {
        return Err(Error::InconsistentInputs("grid dimension differs from p".into()));
    }
    w.check_resolution()?;
    let n = w.len();
    let mut canonical = 0.0;
    for (k, ak) in a.params.iter().enumerate() {
        canonical += log_det_cholesky(&(identity(p) - ak * ak.adjoint()))
            .ok_or(Error::NotStrictContraction { index: k + 1 })?;
    }
    let density = mean_log_det(w.values.iter().map(Psd::matrix), n).unwrap_or(f64::NEG_INFINITY);
    let jensen = f
        .nodes
        .iter()
        .zip(&f.values)
        .map(|(&t, v)| (identity(p) - v * Complex64::from_polar(1.0, t)).determinant().norm().ln())
        .sum::<f64>()
        / n as f64;
    let schur = mean_log_det(defect_grid(f).iter(), n).unwrap_or(f64::NEG_INFINITY) - 2.0 * jensen;
    Ok(SzegoTriple {
        canonical,
        density,
        schur,
        jensen,
        gap_canonical_density: (canonical - density).abs(),
        gap_canonical_schur: (canonical - schur).abs(),
        gap_density_schur: (density - schur).abs(),
    })
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
        fn taylor_coefficients_are_triangular(seed in any::<u64>(), p in 1usize..=3, n in 1usize..=5, extra in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<CMatrix> = (0..n + extra).map(|_| contraction(p, 0.9, &mut rng)).collect();
            let short = schur_taylor_from_params(&SchurParameterSequence::new(p, a[..n].to_vec()).unwrap()).unwrap();
            let long = schur_taylor_from_params(&SchurParameterSequence::new(p, a).unwrap()).unwrap();
            for (x, y) in short.coeffs.iter().zip(&long.coeffs) {
                prop_assert!(max_abs(&(x - y)) < 1e-12);
            }
            prop_assert!(contraction_toeplitz_test(&long.coeffs));
        }

        #[test]
        fn defect_matrices_intertwine(seed in any::<u64>(), p in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = contraction(p, 0.99, &mut rng);
            let (br, bl) = defect_matrices(&a).unwrap();
            prop_assert!(max_abs(&(a.adjoint() * bl.matrix() - br.matrix() * a.adjoint())) < 1e-12);
            prop_assert!(max_abs(&(bl.matrix() * bl.matrix() - (identity(a.nrows()) - &a * a.adjoint()))) < 1e-12);
        }
    }
}
