//! Complex square matrices, Hermitian and positive semidefinite wrappers,
//! spectral functions and the Loewner order.
//!
//! Every spectral routine goes through the Hermitian eigendecomposition.
//! Dimensions in this crate are small (p rarely exceeds 8), so the
//! decomposition is cheap and unconditionally stable.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex square matrix.
pub type CMatrix = DMatrix<Complex64>;

/// Relative tolerance for definiteness, interiority and contraction tests.
pub const TOL: f64 = 1e-10;

pub fn identity(p: usize) -> CMatrix {
    CMatrix::identity(p, p)
}

pub fn zeros(p: usize) -> CMatrix {
    CMatrix::zeros(p, p)
}

/// Diagonal matrix with the given real entries.
pub fn real_diagonal(d: &[f64]) -> CMatrix {
    let p = d.len();
    CMatrix::from_fn(p, p, |i, j| {
        if i == j {
            Complex64::new(d[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn scaled_identity(p: usize, c: f64) -> CMatrix {
    identity(p) * Complex64::new(c, 0.0)
}

fn check_square_finite(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidMatrix);
    }
    Ok(())
}

/// A Hermitian matrix, symmetrized as `(A + A*)/2` on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square_finite(&m)?;
        Ok(Self::symmetrize(m))
    }

    /// Symmetrizes without validation. Callers guarantee a square finite input.
    pub(crate) fn symmetrize(m: CMatrix) -> Self {
        let half = Complex64::new(0.5, 0.0);
        let mut h = (&m + m.adjoint()) * half;
        for i in 0..h.nrows() {
            h[(i, i)].im = 0.0;
        }
        Hermitian(h)
    }

    pub fn identity(p: usize) -> Self {
        Hermitian(identity(p))
    }

    pub fn zeros(p: usize) -> Self {
        Hermitian(zeros(p))
    }

    pub fn scaled_identity(p: usize, c: f64) -> Self {
        Hermitian(scaled_identity(p, c))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        Hermitian(real_diagonal(d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// Eigenvalues in ascending order with the matching orthonormal eigenvectors
    /// as columns.
    pub fn eigen(&self) -> (Vec<f64>, CMatrix) {
        let p = self.dim();
        if p == 0 {
            return (Vec::new(), zeros(0));
        }
        let eig = self.0.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .unwrap_or(Ordering::Equal)
        });
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(p, p, |r, c| eig.eigenvectors[(r, order[c])]);
        (values, vectors)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().0
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Applies a real function to the spectrum: `V f(Λ) V*`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Hermitian {
        let (values, vectors) = self.eigen();
        let mapped: Vec<f64> = values.into_iter().map(f).collect();
        Hermitian::symmetrize(&vectors * real_diagonal(&mapped) * vectors.adjoint())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    /// Congruence `C A C*`, which stays Hermitian.
    pub fn congruence(&self, c: &CMatrix) -> Hermitian {
        Hermitian::symmetrize(c * &self.0 * c.adjoint())
    }

    pub fn scale(&self, c: f64) -> Hermitian {
        Hermitian(&self.0 * Complex64::new(c, 0.0))
    }
}

impl Add for &Hermitian {
    type Output = Hermitian;
    fn add(self, rhs: &Hermitian) -> Hermitian {
        Hermitian(&self.0 + &rhs.0)
    }
}

impl Sub for &Hermitian {
    type Output = Hermitian;
    fn sub(self, rhs: &Hermitian) -> Hermitian {
        Hermitian(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for &Hermitian {
    type Output = Hermitian;
    fn mul(self, rhs: f64) -> Hermitian {
        self.scale(rhs)
    }
}

/// A positive semidefinite matrix with its cached smallest eigenvalue.
///
/// Eigenvalues in `[-TOL·‖A‖, 0]` are treated as zero; anything more negative
/// is rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct Psd {
    base: Hermitian,
    min_eigenvalue: f64,
    norm: f64,
}

impl Psd {
    pub fn new(base: Hermitian) -> Result<Self> {
        let values = base.eigenvalues();
        let norm = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let min = values.first().copied().unwrap_or(0.0);
        if min < -TOL * norm {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(Psd {
            base,
            min_eigenvalue: min.max(0.0),
            norm,
        })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(Hermitian::new(m)?)
    }

    pub fn identity(p: usize) -> Self {
        Psd {
            base: Hermitian::identity(p),
            min_eigenvalue: 1.0,
            norm: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn spectral_norm(&self) -> f64 {
        self.norm
    }

    pub fn is_positive_definite(&self) -> bool {
        self.norm > 0.0 && self.min_eigenvalue > TOL * self.norm
    }

    pub fn hermitian(&self) -> &Hermitian {
        &self.base
    }

    pub fn matrix(&self) -> &CMatrix {
        self.base.matrix()
    }

    pub fn into_hermitian(self) -> Hermitian {
        self.base
    }
}

/// Unique PSD square root.
pub fn hermitian_sqrt(a: &Psd) -> Psd {
    let root = a.base.map_spectrum(|v| v.max(0.0).sqrt());
    Psd::new(root).expect("square root of a PSD matrix is PSD")
}

/// Inverse of the PSD square root. Requires positive definiteness.
pub fn inv_sqrt(a: &Psd) -> Result<Psd> {
    if !a.is_positive_definite() {
        return Err(Error::Singular);
    }
    let root = a.base.map_spectrum(|v| 1.0 / v.sqrt());
    Psd::new(root)
}

/// Outcome of comparing two Hermitian matrices in the Loewner order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoewnerOrder {
    /// `B - A` is positive definite.
    LessStrict,
    /// `B - A` is positive semidefinite but singular.
    LessEq,
    Incomparable,
}

/// Classifies `A` against `B` through the spectrum of `B - A`.
pub fn loewner_compare(a: &Hermitian, b: &Hermitian) -> Result<LoewnerOrder> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let diff = b - a;
    let values = diff.eigenvalues();
    let scale = values
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(a.spectral_norm())
        .max(b.spectral_norm());
    let min = values.first().copied().unwrap_or(0.0);
    Ok(if min > TOL * scale {
        LoewnerOrder::LessStrict
    } else if min >= -TOL * scale {
        LoewnerOrder::LessEq
    } else {
        LoewnerOrder::Incomparable
    })
}

/// `log det A` from the Cholesky diagonal.
pub fn log_det(a: &Psd) -> Result<f64> {
    if !a.is_positive_definite() {
        return Err(Error::Singular);
    }
    log_det_cholesky(a.matrix()).ok_or(Error::Singular)
}

/// `log det` of a Hermitian positive definite matrix, `None` when the
/// Cholesky factorization breaks down.
pub fn log_det_cholesky(m: &CMatrix) -> Option<f64> {
    let chol = m.clone().cholesky()?;
    let l = chol.l();
    let mut sum = 0.0;
    for i in 0..l.nrows() {
        let d = l[(i, i)].re;
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        sum += d.ln();
    }
    Some(2.0 * sum)
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values in ascending order, from the eigenvalues of `M*M`.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    Hermitian::symmetrize(m.adjoint() * m)
        .eigenvalues()
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .collect()
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Membership of a matrix in the open and closed operator-norm unit balls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContractionStatus {
    pub strict: bool,
    pub closed: bool,
}

pub fn contraction_status(m: &CMatrix) -> ContractionStatus {
    let s = spectral_norm(m);
    ContractionStatus {
        strict: s < 1.0 - TOL,
        closed: s <= 1.0 + TOL,
    }
}

pub fn is_strict_contraction(m: &CMatrix) -> bool {
    contraction_status(m).strict
}

/// Polar decomposition `M = U H^{1/2}` with `H = M*M` and `U` unitary.
pub fn polar_decompose(m: &CMatrix) -> Result<(CMatrix, Psd)> {
    check_square_finite(m)?;
    let h = Psd::new(Hermitian::symmetrize(m.adjoint() * m))?;
    let sv = singular_values(m);
    let smallest = sv.first().copied().unwrap_or(0.0);
    let largest = sv.last().copied().unwrap_or(0.0);
    if largest == 0.0 || smallest <= TOL * largest {
        return Err(Error::RankDeficient { smallest });
    }
    let u = m * inv_sqrt(&h)?.matrix();
    Ok((u, h))
}

/// Assembles a `rows·p × cols·p` matrix from p×p blocks.
pub fn assemble_blocks(
    rows: usize,
    cols: usize,
    p: usize,
    block: impl Fn(usize, usize) -> CMatrix,
) -> CMatrix {
    let mut out = CMatrix::zeros(rows * p, cols * p);
    for i in 0..rows {
        for j in 0..cols {
            out.view_mut((i * p, j * p), (p, p)).copy_from(&block(i, j));
        }
    }
    out
}

/// `true` when the smallest eigenvalue exceeds `TOL` times the spectral norm.
pub fn is_positive_definite(h: &Hermitian) -> bool {
    let values = h.eigenvalues();
    let norm = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    norm > 0.0 && values[0] > TOL * norm
}

/// Solves `H X = B` for Hermitian positive definite `H`.
pub(crate) fn cholesky_solve(h: &CMatrix, b: &CMatrix) -> Option<CMatrix> {
    let chol = h.clone().cholesky()?;
    Some(chol.solve(b))
}

/// Generic matrix inverse via LU, `None` when singular.
pub(crate) fn inverse(m: &CMatrix) -> Option<CMatrix> {
    m.clone().try_inverse()
}
