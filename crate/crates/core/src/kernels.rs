//! Kernels of the operators under study, their action on atomic measures and
//! the operator norm `𝒩` as a largest singular value.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{largest_singular_value, Matrix, NormReport};
use crate::measure::{check_len, Measure1D, Measure2D};
use crate::{Error, Point, Result};

/// Targets `x` and sources `t` are plane points. Line sources sit at
/// `(t, 0)`; circle sources at `e^{iθ}`; disk points as `(re, im)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum KernelKind {
    /// `(x - t)/|x - t|²`.
    Riesz,
    /// Riesz kernel times a radial C¹ cutoff: zero on `[0, α/2]`, one on
    /// `[α, β]`, zero beyond `2β`.
    RieszTruncated { alpha: f64, beta: f64 },
    /// `R¹ + i R²`.
    Cauchy,
    /// Target `(c, ℓ)` encodes the interval of center `c` and length `ℓ`;
    /// value `ℓ/(ℓ + dist(t, I))²`.
    PoissonAverage,
    /// `x2/(y2² + (y1 - x1)² + x2²)` with `y` the source.
    TTau,
    /// `1/(y2² + x2² + (y1 - x1)²)`.
    THat,
    /// `1/(1 - w̄ z)` with `w` the source, `z` the target.
    DiskCauchy,
    /// `(1 - |z|²)/|w - z|²`.
    DiskPoisson,
    /// `2 Im(z w̄)/|w - z|²`.
    DiskConjugatePoisson,
    /// `(1 - |z|²)/|1 - z̄ w|²`, for sources inside the disk.
    DiskPoissonInterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum KernelValue {
    Scalar(f64),
    Vector([f64; 2]),
    Complex(Complex64),
}

impl KernelValue {
    /// Euclidean magnitude.
    pub fn abs(&self) -> f64 {
        match self {
            KernelValue::Scalar(v) => v.abs(),
            KernelValue::Vector([a, b]) => a.hypot(*b),
            KernelValue::Complex(z) => z.norm(),
        }
    }

    fn scaled(self, s: f64) -> Self {
        match self {
            KernelValue::Scalar(v) => KernelValue::Scalar(v * s),
            KernelValue::Vector([a, b]) => KernelValue::Vector([a * s, b * s]),
            KernelValue::Complex(z) => KernelValue::Complex(z * s),
        }
    }

    fn add(self, o: Self) -> Self {
        match (self, o) {
            (KernelValue::Scalar(a), KernelValue::Scalar(b)) => KernelValue::Scalar(a + b),
            (KernelValue::Vector([a, b]), KernelValue::Vector([c, d])) => KernelValue::Vector([a + c, b + d]),
            (KernelValue::Complex(a), KernelValue::Complex(b)) => KernelValue::Complex(a + b),
            _ => unreachable!("mixed kernel shapes"),
        }
    }

    /// Real components: 1 for scalars, 2 for vectors and complex values.
    pub fn components(&self) -> Vec<f64> {
        match self {
            KernelValue::Scalar(v) => vec![*v],
            KernelValue::Vector([a, b]) => vec![*a, *b],
            KernelValue::Complex(z) => vec![z.re, z.im],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Scalar,
    Vector,
    Complex,
}

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

/// The cutoff profile of [`KernelKind::RieszTruncated`].
pub fn ramp(rho: f64, alpha: f64, beta: f64) -> f64 {
    if rho <= 0.5 * alpha || rho >= 2.0 * beta {
        0.0
    } else if rho < alpha {
        smoothstep((rho - 0.5 * alpha) / (0.5 * alpha))
    } else if rho <= beta {
        1.0
    } else {
        1.0 - smoothstep((rho - beta) / beta)
    }
}

impl KernelKind {
    fn shape(&self) -> Shape {
        match self {
            KernelKind::Riesz | KernelKind::RieszTruncated { .. } => Shape::Vector,
            KernelKind::Cauchy | KernelKind::DiskCauchy => Shape::Complex,
            _ => Shape::Scalar,
        }
    }

    fn zero(&self) -> KernelValue {
        match self.shape() {
            Shape::Scalar => KernelValue::Scalar(0.0),
            Shape::Vector => KernelValue::Vector([0.0, 0.0]),
            Shape::Complex => KernelValue::Complex(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let KernelKind::RieszTruncated { alpha, beta } = *self {
            if !(alpha > 0.0 && beta >= alpha && beta.is_finite()) {
                return Err(Error::Invalid(format!("truncation needs 0 < α ≤ β, got α={alpha}, β={beta}")));
            }
        }
        Ok(())
    }

    /// `K(x, t)` for target `x` and source `t`.
    pub fn eval(&self, x: Point, t: Point) -> Result<KernelValue> {
        let singular = || Error::Singular(format!("{self:?} at target {x:?}, source {t:?}"));
        let d = [x[0] - t[0], x[1] - t[1]];
        let d2 = d[0] * d[0] + d[1] * d[1];
        Ok(match *self {
            KernelKind::Riesz => {
                if d2 == 0.0 {
                    return Err(singular());
                }
                KernelValue::Vector([d[0] / d2, d[1] / d2])
            }
            KernelKind::RieszTruncated { alpha, beta } => {
                let w = ramp(d2.sqrt(), alpha, beta);
                if w == 0.0 {
                    KernelValue::Vector([0.0, 0.0])
                } else {
                    KernelValue::Vector([w * d[0] / d2, w * d[1] / d2])
                }
            }
            KernelKind::Cauchy => {
                if d2 == 0.0 {
                    return Err(singular());
                }
                KernelValue::Complex(Complex64::new(d[0] / d2, d[1] / d2))
            }
            KernelKind::PoissonAverage => {
                let (c, len) = (x[0], x[1]);
                if !(len > 0.0) {
                    return Err(Error::Invalid(format!("interval length {len} must be positive")));
                }
                let dist = ((c - 0.5 * len) - t[0]).max(t[0] - (c + 0.5 * len)).max(0.0);
                KernelValue::Scalar(len / (len + dist).powi(2))
            }
            KernelKind::TTau => {
                let den = t[1] * t[1] + (t[0] - x[0]).powi(2) + x[1] * x[1];
                if den == 0.0 {
                    return Err(singular());
                }
                KernelValue::Scalar(x[1] / den)
            }
            KernelKind::THat => {
                let den = t[1] * t[1] + x[1] * x[1] + (t[0] - x[0]).powi(2);
                if den == 0.0 {
                    return Err(singular());
                }
                KernelValue::Scalar(1.0 / den)
            }
            KernelKind::DiskCauchy => {
                let z = Complex64::new(x[0], x[1]);
                let w = Complex64::new(t[0], t[1]);
                let den = 1.0 - w.conj() * z;
                if den.norm() == 0.0 {
                    return Err(singular());
                }
                KernelValue::Complex(1.0 / den)
            }
            KernelKind::DiskPoisson => {
                if d2 == 0.0 {
                    return Err(singular());
                }
                KernelValue::Scalar((1.0 - x[0] * x[0] - x[1] * x[1]) / d2)
            }
            KernelKind::DiskConjugatePoisson => {
                if d2 == 0.0 {
                    return Err(singular());
                }
                // Im(z w̄) = y_z x_w - x_z y_w
                KernelValue::Scalar(2.0 * (x[1] * t[0] - x[0] * t[1]) / d2)
            }
            KernelKind::DiskPoissonInterior => {
                let z = Complex64::new(x[0], x[1]);
                let w = Complex64::new(t[0], t[1]);
                let den = (1.0 - z.conj() * w).norm_sqr();
                if den == 0.0 {
                    return Err(singular());
                }
                KernelValue::Scalar((1.0 - z.norm_sqr()) / den)
            }
        })
    }
}

/// Atoms as plane points with masses.
#[derive(Debug, Clone, PartialEq)]
pub struct Weighted {
    pub points: Vec<Point>,
    pub masses: Vec<f64>,
}

impl Weighted {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Unit masses at the given points (for pointwise evaluation).
    pub fn unit(points: Vec<Point>) -> Self {
        let masses = vec![1.0; points.len()];
        Self { points, masses }
    }
}

impl From<&Measure1D> for Weighted {
    fn from(m: &Measure1D) -> Self {
        Self { points: m.plane_points(), masses: m.masses() }
    }
}

impl From<&Measure2D> for Weighted {
    fn from(m: &Measure2D) -> Self {
        Self { points: m.points(), masses: m.masses() }
    }
}

/// `T f(x) = ∫ K(x, t) f(t) dσ(t)` at every target point.
pub fn apply(kind: &KernelKind, sigma: &Weighted, f: &[f64], targets: &[Point]) -> Result<Vec<KernelValue>> {
    kind.validate()?;
    check_len(sigma.len(), f.len())?;
    targets
        .iter()
        .map(|&x| {
            let mut acc = kind.zero();
            for ((&t, &m), &v) in sigma.points.iter().zip(&sigma.masses).zip(f) {
                if m * v != 0.0 {
                    acc = acc.add(kind.eval(x, t)?.scaled(m * v));
                }
            }
            Ok(acc)
        })
        .collect()
}

/// `⟨T_σ f, g⟩_τ = Σ_x g(x) τ(x) Σ_t K(x, t) f(t) σ(t)`.
pub fn bilinear_form(kind: &KernelKind, sigma: &Weighted, f: &[f64], tau: &Weighted, g: &[f64]) -> Result<KernelValue> {
    check_len(tau.len(), g.len())?;
    let tf = apply(kind, sigma, f, &tau.points)?;
    Ok(tf
        .into_iter()
        .zip(tau.masses.iter().zip(g))
        .fold(kind.zero(), |acc, (v, (&m, &w))| acc.add(v.scaled(m * w))))
}

/// Real matrix whose largest singular value is the norm of
/// `L²(σ) → L²(τ)`: `D_τ^{1/2} K D_σ^{1/2}`, with vector components stacked
/// and complex kernels in real form.
pub fn weighted_matrix(kind: &KernelKind, sigma: &Weighted, tau: &Weighted) -> Result<Matrix> {
    kind.validate()?;
    let (n, m) = (tau.len(), sigma.len());
    let mut comps = vec![Matrix::zeros(n, m), Matrix::zeros(n, m)];
    for i in 0..n {
        for j in 0..m {
            let w = (tau.masses[i] * sigma.masses[j]).sqrt();
            if w == 0.0 {
                continue;
            }
            let v = kind.eval(tau.points[i], sigma.points[j])?;
            for (c, x) in v.components().into_iter().enumerate() {
                comps[c].data[i * m + j] = w * x;
            }
        }
    }
    Ok(match kind.shape() {
        Shape::Scalar => comps.swap_remove(0),
        Shape::Vector => comps[0].vstack(&comps[1]),
        Shape::Complex => Matrix::realify(&comps[0], &comps[1]),
    })
}

pub fn operator_norm(kind: &KernelKind, sigma: &Weighted, tau: &Weighted, tol: f64) -> Result<NormReport> {
    largest_singular_value(&weighted_matrix(kind, sigma, tau)?, tol)
}
