use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::{Grid, GridParams};
use crate::kernels::{operator_norm, weighted_matrix, KernelKind, Weighted};
use crate::linalg::{largest_singular_value, NormReport};
use crate::measure::{Interval, LineDomain, Measure1D, Measure2D};
use crate::{Error, Point, Result};

/// `T_τ(1_E)(x) = ∫_E x2/(y2² + (y1 - x1)² + x2²) dτ(y)` over the atoms `y`
/// accepted by `in_set`.
pub fn t_tau(tau: &Measure2D, x: Point, in_set: impl Fn(Point) -> bool) -> f64 {
    tau.atoms()
        .iter()
        .filter(|a| in_set(a.position))
        .map(|a| {
            let y = a.position;
            a.mass * x[1] / (y[1] * y[1] + (y[0] - x[0]).powi(2) + x[1] * x[1])
        })
        .sum()
}

/// `P(f σ, I) = ∫ |I|/(|I| + dist(t, I))² f dσ` over the atoms accepted by
/// `in_set`; `f ≡ 1` when `None`.
pub fn poisson_average(sigma: &Measure1D, iv: &Interval, f: Option<&[f64]>, in_set: impl Fn(f64) -> bool) -> f64 {
    let len = iv.len();
    sigma
        .atoms()
        .iter()
        .enumerate()
        .filter(|(_, a)| in_set(a.position))
        .map(|(i, a)| {
            let w = f.map_or(1.0, |f| f[i]);
            a.mass * w * len / (len + iv.dist(a.position)).powi(2)
        })
        .sum()
}

/// Intervals of the standard grid and of `n_shift` seeded random grids, at
/// every scale of the window, that contain a `σ` atom or the first
/// coordinate of a `τ` atom.
pub fn interval_family(
    sigma: &Measure1D,
    tau: &Measure2D,
    params: GridParams,
    n_shift: usize,
    seed: u64,
) -> Result<Vec<Interval>> {
    let mut grids = vec![Grid::standard(params)?];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_shift {
        grids.push(Grid::sample(params, &mut rng)?);
    }
    let mut xs = sigma.positions();
    xs.extend(tau.atoms().iter().map(|a| a.position[0]));
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for g in &grids {
        for k in params.k_min..=params.k_max {
            for iv in g.intervals_meeting(&xs, k)? {
                if seen.insert((iv.left.to_bits(), iv.right.to_bits())) {
                    out.push(iv.span());
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witnessed {
    pub value: f64,
    pub witness: Option<Interval>,
}

impl Witnessed {
    fn zero() -> Self {
        Self { value: 0.0, witness: None }
    }

    fn better(self, o: Self) -> Self {
        if o.value > self.value {
            o
        } else {
            self
        }
    }
}

/// The two products of the `A₂` functional for one interval:
/// `τ(Q_I)/|I| · ∫_{ℝ∖I} |I|/(|I| + dist(t, I))² dσ` and
/// `σ(I)/|I| · ∫_{ℝ²₊∖Q_I} |I|/(|I| + dist(x, Q_I))² dτ`.
pub fn a2_terms(sigma: &Measure1D, tau: &Measure2D, iv: &Interval) -> (f64, f64) {
    let len = iv.len();
    let tq = tau.cube_mass(iv);
    let si = sigma.mass_in(iv);
    let first = if tq > 0.0 { tq / len * poisson_average(sigma, iv, None, |t| !iv.contains(t)) } else { 0.0 };
    let second = if si > 0.0 {
        let tail: f64 = tau
            .atoms()
            .iter()
            .filter(|a| !iv.in_carleson_cube(a.position))
            .map(|a| a.mass * len / (len + iv.dist_to_cube(a.position)).powi(2))
            .sum();
        si / len * tail
    } else {
        0.0
    };
    (first, second)
}

fn check_line(sigma: &Measure1D) -> Result<()> {
    if sigma.domain() != LineDomain::Line {
        return Err(Error::DomainMismatch("expected a line measure".into()));
    }
    Ok(())
}

fn check_family(family: &[Interval]) -> Result<()> {
    if family.is_empty() {
        return Err(Error::Invalid("the interval family is empty".into()));
    }
    Ok(())
}

/// `A₂` as the maximum of both products over `family`.
pub fn a2_constant(sigma: &Measure1D, tau: &Measure2D, family: &[Interval]) -> Result<Witnessed> {
    check_line(sigma)?;
    check_family(family)?;
    // collect first so ties resolve to the earliest interval
    let vals: Vec<f64> = family
        .par_iter()
        .map(|iv| {
            let (a, b) = a2_terms(sigma, tau, iv);
            a.max(b)
        })
        .collect();
    Ok(vals
        .into_iter()
        .zip(family)
        .fold(Witnessed::zero(), |acc, (value, iv)| acc.better(Witnessed { value, witness: Some(*iv) })))
}

/// `σ` atom `t` and `τ` atom `(t, 0)` at the same place make the kernel and
/// the testing integrands singular.
pub fn common_point_mass(sigma: &Measure1D, tau: &Measure2D) -> Option<f64> {
    tau.atoms().iter().filter(|a| a.position[1] <= 1e-12).find_map(|a| {
        sigma.atoms().iter().find(|s| (s.position - a.position[0]).abs() <= 1e-12).map(|s| s.position)
    })
}

fn riesz(x: Point, t: f64) -> Result<[f64; 2]> {
    let d = [x[0] - t, x[1]];
    let d2 = d[0] * d[0] + d[1] * d[1];
    if d2 == 0.0 {
        return Err(Error::Singular(format!("σ atom {t} coincides with τ atom {x:?}")));
    }
    Ok([d[0] / d2, d[1] / d2])
}

/// `σ(I)^{-1} ∫_{Q_I} |R_σ 1_I|² dτ`.
pub fn forward_testing_sq(sigma: &Measure1D, tau: &Measure2D, iv: &Interval) -> Result<f64> {
    let (lo, hi) = sigma.index_range(iv);
    let s_atoms = &sigma.atoms()[lo..hi];
    let mass: f64 = s_atoms.iter().map(|a| a.mass).sum();
    if mass == 0.0 {
        return Ok(0.0);
    }
    let (clo, chi) = tau.column_range(iv);
    let mut total = 0.0;
    for a in &tau.atoms()[clo..chi] {
        if a.position[1] >= iv.len() {
            continue;
        }
        let mut v = [0.0, 0.0];
        for s in s_atoms {
            let k = riesz(a.position, s.position)?;
            v[0] += s.mass * k[0];
            v[1] += s.mass * k[1];
        }
        total += a.mass * (v[0] * v[0] + v[1] * v[1]);
    }
    Ok(total / mass)
}

/// `τ(Q_I)^{-1} ∫_I |R*_τ 1_{Q_I}|² dσ`.
pub fn backward_testing_sq(sigma: &Measure1D, tau: &Measure2D, iv: &Interval) -> Result<f64> {
    let (clo, chi) = tau.column_range(iv);
    let cube: Vec<_> = tau.atoms()[clo..chi].iter().filter(|a| a.position[1] < iv.len()).collect();
    let mass: f64 = cube.iter().map(|a| a.mass).sum();
    if mass == 0.0 {
        return Ok(0.0);
    }
    let (lo, hi) = sigma.index_range(iv);
    let mut total = 0.0;
    for s in &sigma.atoms()[lo..hi] {
        let mut v = [0.0, 0.0];
        for a in &cube {
            let k = riesz(a.position, s.position)?;
            v[0] += a.mass * k[0];
            v[1] += a.mass * k[1];
        }
        total += s.mass * (v[0] * v[0] + v[1] * v[1]);
    }
    Ok(total / mass)
}

/// Forward and backward testing constants (square roots of the maxima).
pub fn testing_constants(sigma: &Measure1D, tau: &Measure2D, family: &[Interval]) -> Result<(Witnessed, Witnessed)> {
    check_line(sigma)?;
    check_family(family)?;
    let per: Vec<(Witnessed, Witnessed)> = family
        .par_iter()
        .map(|iv| {
            Ok((
                Witnessed { value: forward_testing_sq(sigma, tau, iv)?, witness: Some(*iv) },
                Witnessed { value: backward_testing_sq(sigma, tau, iv)?, witness: Some(*iv) },
            ))
        })
        .collect::<Result<_>>()?;
    let (f, b) = per
        .into_iter()
        .fold((Witnessed::zero(), Witnessed::zero()), |(f, b), (x, y)| (f.better(x), b.better(y)));
    Ok((Witnessed { value: f.value.sqrt(), ..f }, Witnessed { value: b.value.sqrt(), ..b }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub a2: f64,
    pub t_forward: f64,
    pub t_backward: f64,
    /// Norm of the Cauchy transform `L²(σ) → L²(τ)` on complex functions.
    pub n_direct: f64,
    /// `√A₂ + max(t_forward, t_backward)`.
    pub r_char: f64,
    pub a2_witness: Option<Interval>,
    pub t_forward_witness: Option<Interval>,
    pub t_backward_witness: Option<Interval>,
    pub norm_iterations: usize,
    pub norm_residual: f64,
}

impl ConstantsReport {
    pub fn testing(&self) -> f64 {
        self.t_forward.max(self.t_backward)
    }

    /// `𝒩/ℛ`, or zero when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.r_char == 0.0 {
            if self.n_direct == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.n_direct / self.r_char
        }
    }
}

/// `𝒩` via the complex Cauchy kernel. For a real `f` the modulus of the
/// Cauchy transform equals the length of the Riesz vector, and on complex
/// functions this operator dominates both testing conditions exactly.
pub fn direct_norm(sigma: &Measure1D, tau: &Measure2D, tol: f64) -> Result<NormReport> {
    operator_norm(&KernelKind::Cauchy, &Weighted::from(sigma), &Weighted::from(tau), tol)
}

pub fn characterization(sigma: &Measure1D, tau: &Measure2D, family: &[Interval], tol: f64) -> Result<ConstantsReport> {
    check_line(sigma)?;
    if let Some(t) = common_point_mass(sigma, tau) {
        return Err(Error::Singular(format!("σ and τ share a point mass at {t}")));
    }
    let a2 = a2_constant(sigma, tau, family)?;
    let (tf, tb) = testing_constants(sigma, tau, family)?;
    let norm = direct_norm(sigma, tau, tol)?;
    Ok(ConstantsReport {
        a2: a2.value,
        t_forward: tf.value,
        t_backward: tb.value,
        n_direct: norm.norm,
        r_char: a2.value.sqrt() + tf.value.max(tb.value),
        a2_witness: a2.witness,
        t_forward_witness: tf.witness,
        t_backward_witness: tb.witness,
        norm_iterations: norm.iterations,
        norm_residual: norm.residual,
    })
}

/// `‖1_{Q_J} C_σ 1_I‖ / √A₂` for intervals with disjoint interiors: the
/// largest singular value of the kernel block between the atoms of `I` and
/// those of `Q_J`.
pub fn weak_boundedness_ratio(sigma: &Measure1D, tau: &Measure2D, i: &Interval, j: &Interval, a2: f64) -> Result<f64> {
    check_line(sigma)?;
    if i.left < j.right && j.left < i.right {
        return Err(Error::Hypothesis(format!("intervals {i:?} and {j:?} overlap")));
    }
    let s = sigma.restrict(&i.region())?;
    let t = tau.restrict(&j.carleson_cube())?;
    let m = weighted_matrix(&KernelKind::Cauchy, &Weighted::from(&s), &Weighted::from(&t))?;
    let norm = largest_singular_value(&m, crate::linalg::DEFAULT_TOL)?.norm;
    Ok(if norm == 0.0 {
        0.0
    } else if a2 == 0.0 {
        f64::INFINITY
    } else {
        norm / a2.sqrt()
    })
}
