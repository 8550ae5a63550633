//! Matrix-valued probability measures given by atoms or by a density sampled
//! on a quadrature grid.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::{frobenius_norm, identity, CMatrix, Psd};

/// Tolerance on `Σ weights = I` for atomic measures.
pub const ATOM_NORMALIZATION_TOL: f64 = 1e-12;
/// Tolerance on the quadrature total mass of gridded densities.
pub const GRID_NORMALIZATION_TOL: f64 = 1e-4;

/// Anything that integrates scalar functions against a matrix measure.
pub trait MatrixMeasure {
    fn p(&self) -> usize;

    /// `∫ f(x) dμ(x)`, a p×p matrix.
    fn integrate(&self, f: &dyn Fn(f64) -> Complex64) -> CMatrix;

    fn normalization_tolerance(&self) -> f64;

    /// Fails with `NotNormalized` unless the total mass is `I_p`.
    fn check_normalized(&self) -> Result<()> {
        let mass = self.integrate(&|_| Complex64::new(1.0, 0.0));
        let deviation = frobenius_norm(&(mass - identity(self.p())));
        if deviation > self.normalization_tolerance() {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Atom {
    /// A point of `[0,1]` or an angle in `(-π, π]`, depending on the use.
    pub location: f64,
    pub weight: Psd,
}

/// Finitely atomic matrix measure `Σ W_i δ_{x_i}` with `Σ W_i = I`.
#[derive(Clone, Debug)]
pub struct DiscreteMatrixMeasure {
    p: usize,
    atoms: Vec<Atom>,
}

impl DiscreteMatrixMeasure {
    pub fn new(p: usize, atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            if a.weight.dim() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    found: a.weight.dim(),
                });
            }
        }
        let mu = DiscreteMatrixMeasure { p, atoms };
        mu.check_normalized()?;
        Ok(mu)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

impl MatrixMeasure for DiscreteMatrixMeasure {
    fn p(&self) -> usize {
        self.p
    }

    fn integrate(&self, f: &dyn Fn(f64) -> Complex64) -> CMatrix {
        let mut acc = CMatrix::zeros(self.p, self.p);
        for a in &self.atoms {
            acc += a.weight.matrix() * f(a.location);
        }
        acc
    }

    fn normalization_tolerance(&self) -> f64 {
        ATOM_NORMALIZATION_TOL
    }
}

/// A measure `W(x) dρ(x) + μ^s` where the reference measure `ρ` is replaced
/// by a quadrature rule: nodes, positive weights and density values.
#[derive(Clone, Debug)]
pub struct DensityGridMeasure {
    p: usize,
    nodes: Vec<f64>,
    values: Vec<Psd>,
    quadrature_weights: Vec<f64>,
    singular_mass: Option<DiscreteMatrixMeasure>,
}

impl DensityGridMeasure {
    /// Builds a grid measure. The total mass is not checked here; moment
    /// routines check it, rate routines do not need it.
    pub fn new(
        p: usize,
        nodes: Vec<f64>,
        values: Vec<Psd>,
        quadrature_weights: Vec<f64>,
        singular_mass: Option<DiscreteMatrixMeasure>,
    ) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() != quadrature_weights.len() {
            return Err(Error::InconsistentInputs(
                "nodes, values and weights differ in length".into(),
            ));
        }
        if quadrature_weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InconsistentInputs("quadrature weights must be positive".into()));
        }
        if let Some(v) = values.iter().find(|v| v.dim() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: v.dim(),
            });
        }
        Ok(DensityGridMeasure {
            p,
            nodes,
            values,
            quadrature_weights,
            singular_mass,
        })
    }

    /// Density relative to the arcsine law on `[0,1]`, sampled at the
    /// `n`-point Gauss–Chebyshev rule `x_j = (1 + cos θ_j)/2`,
    /// `θ_j = (2j-1)π/(2n)`, each with weight `1/n`.
    pub fn arcsine_grid(p: usize, n: usize, density: impl Fn(f64) -> CMatrix) -> Result<Self> {
        let nodes: Vec<f64> = chebyshev_angles(n).map(|t| 0.5 * (1.0 + t.cos())).collect();
        let values = nodes
            .iter()
            .map(|&x| Psd::from_matrix(density(x)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(p, nodes, values, vec![1.0 / n as f64; n], None)
    }

    /// Density relative to `dθ/2π` sampled at `n` equispaced angles
    /// `θ_j = -π + 2πj/n`, each with weight `1/n`.
    pub fn circle_grid(p: usize, n: usize, density: impl Fn(f64) -> CMatrix) -> Result<Self> {
        let nodes: Vec<f64> = uniform_angles(n).collect();
        let values = nodes
            .iter()
            .map(|&t| Psd::from_matrix(density(t)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(p, nodes, values, vec![1.0 / n as f64; n], None)
    }

    pub fn with_singular_mass(mut self, mass: DiscreteMatrixMeasure) -> Result<Self> {
        if mass.p() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                found: mass.p(),
            });
        }
        self.singular_mass = Some(mass);
        Ok(self)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[Psd] {
        &self.values
    }

    pub fn quadrature_weights(&self) -> &[f64] {
        &self.quadrature_weights
    }

    pub fn singular_mass(&self) -> Option<&DiscreteMatrixMeasure> {
        self.singular_mass.as_ref()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

impl MatrixMeasure for DensityGridMeasure {
    fn p(&self) -> usize {
        self.p
    }

    fn integrate(&self, f: &dyn Fn(f64) -> Complex64) -> CMatrix {
        let mut acc = CMatrix::zeros(self.p, self.p);
        for ((x, w), v) in self.nodes.iter().zip(&self.quadrature_weights).zip(&self.values) {
            acc += v.matrix() * (f(*x) * *w);
        }
        if let Some(s) = &self.singular_mass {
            acc += s.integrate(f);
        }
        acc
    }

    fn normalization_tolerance(&self) -> f64 {
        GRID_NORMALIZATION_TOL
    }
}

/// `(1 − η)·ν + η·I dθ/2π` on the circle, with `ν` atomic. The uniform part
/// is integrated by a trapezoid rule that is exact for trigonometric
/// polynomials of degree below [`CircleMixture::LEBESGUE_NODES`].
#[derive(Clone, Debug)]
pub struct CircleMixture {
    atoms: DiscreteMatrixMeasure,
    eta: f64,
}

impl CircleMixture {
    pub const LEBESGUE_NODES: usize = 4096;

    pub fn new(atoms: DiscreteMatrixMeasure, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InconsistentInputs(format!("mixing weight {eta} outside [0, 1]")));
        }
        Ok(CircleMixture { atoms, eta })
    }

    pub fn atoms(&self) -> &DiscreteMatrixMeasure {
        &self.atoms
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

impl MatrixMeasure for CircleMixture {
    fn p(&self) -> usize {
        self.atoms.p
    }

    fn integrate(&self, f: &dyn Fn(f64) -> Complex64) -> CMatrix {
        let m = Self::LEBESGUE_NODES;
        let mean = uniform_angles(m).map(f).sum::<Complex64>() / m as f64;
        self.atoms.integrate(f) * Complex64::new(1.0 - self.eta, 0.0) + identity(self.atoms.p) * (mean * self.eta)
    }

    fn normalization_tolerance(&self) -> f64 {
        ATOM_NORMALIZATION_TOL
    }
}

/// Chebyshev angles `(2j-1)π/(2n)`, `j = 1..n`.
pub fn chebyshev_angles(n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |j| (2 * j - 1) as f64 * PI / (2 * n) as f64)
}

/// Equispaced angles `-π + 2πj/n`, `j = 0..n-1`.
pub fn uniform_angles(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| -PI + 2.0 * PI * j as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{scaled_identity, Hermitian};

    #[test]
    fn discrete_requires_unit_mass() {
        let half = Psd::new(Hermitian::scaled_identity(2, 0.5)).unwrap();
        let ok = DiscreteMatrixMeasure::new(
            2,
            vec![
                Atom { location: 0.0, weight: half.clone() },
                Atom { location: 1.0, weight: half.clone() },
            ],
        );
        assert!(ok.is_ok());
        let bad = DiscreteMatrixMeasure::new(2, vec![Atom { location: 0.0, weight: half }]);
        assert!(matches!(bad, Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn arcsine_grid_has_unit_mass_for_constant_density() {
        let mu = DensityGridMeasure::arcsine_grid(2, 64, |_| identity(2)).unwrap();
        mu.check_normalized().unwrap();
        assert!(mu.nodes().iter().all(|&x| x > 0.0 && x < 1.0));
    }

    #[test]
    fn grid_validation() {
        let v = vec![Psd::identity(1); 3];
        assert!(DensityGridMeasure::new(1, vec![0.0, 1.0], v.clone(), vec![0.5; 3], None).is_err());
        assert!(DensityGridMeasure::new(1, vec![0.0; 3], v.clone(), vec![0.5, 0.0, 0.5], None).is_err());
        assert!(DensityGridMeasure::new(2, vec![0.0; 3], v, vec![1.0 / 3.0; 3], None).is_err());
        let lebesgue = DensityGridMeasure::circle_grid(1, 16, |_| scaled_identity(1, 2.0)).unwrap();
        assert!(matches!(lebesgue.check_normalized(), Err(Error::NotNormalized { .. })));
    }
}
