//! Exact rational oracles for scalar moment problems.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

/// Determinant by fraction-exact Gaussian elimination.
pub fn det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut sign = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            sign = -sign;
        }
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &m[col][col];
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    (0..n).fold(sign, |acc, i| acc * &m[i][i])
}

/// Lower and upper Hankel matrices of the scalar moments `s_1..s_n`.
fn hankels(s: &[BigRational]) -> (Vec<Vec<BigRational>>, Vec<Vec<BigRational>>) {
    let n = s.len();
    let m = n / 2;
    let at = |j: usize| if j == 0 { BigRational::one() } else { s[j - 1].clone() };
    if n % 2 == 0 {
        (
            (0..=m).map(|i| (0..=m).map(|j| at(i + j)).collect()).collect(),
            (0..m).map(|i| (0..m).map(|j| at(i + j + 1) - at(i + j + 2)).collect()).collect(),
        )
    } else {
        (
            (0..=m).map(|i| (0..=m).map(|j| at(i + j + 1)).collect()).collect(),
            (0..=m).map(|i| (0..=m).map(|j| at(i + j) - at(i + j + 1)).collect()).collect(),
        )
    }
}

/// Scalar canonical moments of `s_1..s_n` on `[0,1]`, computed exactly.
///
/// The Hankel determinants are affine in the newest moment and vanish at the
/// ends `s⁻_k` (lower Hankel) and `s⁺_k` (upper Hankel) of its range.
pub fn interval_canonical(s: &[f64]) -> Vec<f64> {
    let s: Vec<BigRational> = s.iter().map(|&x| rat(x)).collect();
    (1..=s.len())
        .map(|k| {
            let root = |upper: bool| {
                let eval = |x: BigRational| {
                    let mut t = s[..k - 1].to_vec();
                    t.push(x);
                    let (lo, up) = hankels(&t);
                    det(if upper { up } else { lo })
                };
                let f0 = eval(BigRational::zero());
                let f1 = eval(BigRational::one());
                -f0.clone() / (f1 - f0)
            };
            let (lo, up) = (root(false), root(true));
            ((&s[k - 1] - &lo) / (up - lo)).to_f64().unwrap()
        })
        .collect()
}

/// `det(s⁺_{n+1} − s⁻_{n+1})` for scalar moments, exactly.
pub fn interval_range_width(s: &[f64]) -> f64 {
    let s: Vec<BigRational> = s.iter().map(|&x| rat(x)).collect();
    let root = |upper: bool| {
        let eval = |x: BigRational| {
            let mut t = s.clone();
            t.push(x);
            let (lo, up) = hankels(&t);
            det(if upper { up } else { lo })
        };
        let f0 = eval(BigRational::zero());
        let f1 = eval(BigRational::one());
        -f0.clone() / (f1 - f0)
    };
    (root(true) - root(false)).to_f64().unwrap()
}

/// Exact Gaussian rational `re + i·im`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        GaussRational::new(rat(re), rat(im))
    }

    pub fn zero() -> Self {
        GaussRational::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        GaussRational::new(BigRational::one(), BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRational::new(self.re.clone(), -self.im.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        GaussRational::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &Self) -> Self {
        GaussRational::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &Self) -> Self {
        GaussRational::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }

    pub fn div(&self, o: &Self) -> Self {
        let norm = &o.re * &o.re + &o.im * &o.im;
        let num = self.mul(&o.conj());
        GaussRational::new(num.re / &norm, num.im / norm)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64().unwrap(), self.im.to_f64().unwrap())
    }
}

/// Determinant over the Gaussian rationals by exact elimination.
pub fn complex_det(mut m: Vec<Vec<GaussRational>>) -> GaussRational {
    let n = m.len();
    let mut acc = GaussRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return GaussRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            acc = GaussRational::zero().sub(&acc);
        }
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].div(&m[col][col]);
            for c in col..n {
                let delta = factor.mul(&m[col][c]);
                m[r][c] = m[r][c].sub(&delta);
            }
        }
        acc = acc.mul(&m[col][col]);
    }
    acc
}

/// Scalar Verblunsky coefficients of `Γ_1..Γ_n` from exact Toeplitz determinants.
///
/// With `Γ_k = x` free, `det T_k(x) = D_{k−2}(r² − |x − M|²)`, so three evaluations fix
/// the centre `M`, one more gives `r²`, and the coefficient is `(Γ_k − M)/r`.
pub fn verblunsky(gamma: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let g: Vec<GaussRational> = gamma.iter().map(|&(re, im)| GaussRational::from_f64(re, im)).collect();
    let det_t = |moments: &[GaussRational]| -> BigRational {
        let m = moments.len() + 1;
        let at = |d: isize| match d {
            0 => GaussRational::one(),
            d if d > 0 => moments[d as usize - 1].clone(),
            d => moments[(-d) as usize - 1].conj(),
        };
        let t = (0..m).map(|i| (0..m).map(|j| at(i as isize - j as isize)).collect()).collect();
        complex_det(t).re
    };
    let two = BigRational::from_integer(2.into());
    (1..=g.len())
        .map(|k| {
            let f = |x: GaussRational| {
                let mut t = g[..k - 1].to_vec();
                t.push(x);
                det_t(&t)
            };
            let d = if k == 1 { BigRational::one() } else { det_t(&g[..k - 2]) };
            let f0 = f(GaussRational::zero());
            let f1 = f(GaussRational::one());
            let fi = f(GaussRational::new(BigRational::zero(), BigRational::one()));
            let centre = GaussRational::new(
                (BigRational::one() + (&f1 - &f0) / &d) / &two,
                (BigRational::one() + (&fi - &f0) / &d) / &two,
            );
            let r2 = f(centre.clone()) / &d;
            let r = r2.to_f64().unwrap().sqrt();
            let (re, im) = g[k - 1].sub(&centre).to_f64();
            (re / r, im / r)
        })
        .collect()
}
