//! Disk side: inner functions, Clark measures, the disk characteristic,
//! composition-operator pullbacks and compactness profiles.
//!
//! Circle measures carry angles in `[0, 2π)`; arc lengths are in radians.
//! For `τ` on the closed disk, `Pτ(z)` means `∫ (1 - |z|²)/|1 - z̄w|² dτ(w)`,
//! which is the boundary Poisson kernel when `w ∈ 𝕋`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kernels::{operator_norm, weighted_matrix, KernelKind, Weighted};
use crate::linalg::{largest_singular_value, DEFAULT_TOL};
use crate::measure::{arc_contains, normalize_angle, Atom1D, LineDomain, Measure1D, Measure2D, PlaneDomain, Region};
use crate::{Error, Point, Result};

/// Note attached to every disk report.
pub const P_TAU_CONVENTION: &str = "P tau(z) = sum tau(w) (1-|z|^2)/|1-conj(z) w|^2";

/// Clark identity tolerance.
pub const CLARK_TOL: f64 = 1e-8;

/// Samples closer than this to the origin are left out of the `A₂` sup.
pub const MIN_SAMPLE_RADIUS: f64 = 0.01;

/// Finite Blaschke product times a finitely atomic singular inner factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerFunction {
    /// Zeros in the open disk, with multiplicity.
    pub zeros: Vec<Complex64>,
    /// `(angle, mass)` of the singular measure.
    #[serde(default)]
    pub singular: Vec<(f64, f64)>,
}

fn c(p: Point) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn unit(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

impl InnerFunction {
    pub fn new(zeros: Vec<Complex64>, singular: Vec<(f64, f64)>) -> Result<Self> {
        let f = Self { zeros, singular };
        f.validate()?;
        Ok(f)
    }

    pub fn blaschke(zeros: Vec<Complex64>) -> Result<Self> {
        Self::new(zeros, Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.zeros {
            if !(a.norm() < 1.0) {
                return Err(Error::InvalidAtom(format!("zero {a} is not in the open disk")));
            }
        }
        for &(angle, mass) in &self.singular {
            if !angle.is_finite() || !mass.is_finite() || mass < 0.0 {
                return Err(Error::InvalidAtom(format!("singular atom ({angle}, {mass})")));
            }
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// `θ(z)` for `|z| ≤ 1`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() > 1.0 + 1e-12 {
            return Err(Error::Invalid(format!("{z} lies outside the closed disk")));
        }
        let mut v = Complex64::new(1.0, 0.0);
        for a in &self.zeros {
            v *= (z - a) / (1.0 - a.conj() * z);
        }
        let mut exponent = Complex64::new(0.0, 0.0);
        for &(angle, mass) in &self.singular {
            if mass == 0.0 {
                continue;
            }
            let xi = unit(angle);
            if (xi - z).norm() < 1e-14 {
                return Err(Error::Singular(format!("{z} is a singular atom of the inner function")));
            }
            exponent -= mass * (xi + z) / (xi - z);
        }
        Ok(v * exponent.exp())
    }

    /// Continuous branch of `arg θ(e^{iφ})` for a Blaschke product, with
    /// `Φ(φ + 2π) = Φ(φ) + 2πd`.
    pub fn phase(&self, phi: f64) -> f64 {
        let e = unit(phi);
        self.zeros
            .iter()
            .map(|a| phi + (1.0 - a * e.conj()).arg() - (1.0 - a.conj() * e).arg())
            .sum()
    }

    /// `Φ'(φ) = |θ'(e^{iφ})| = Σ (1 - |a|²)/|e^{iφ} - a|²`.
    pub fn phase_derivative(&self, phi: f64) -> f64 {
        let e = unit(phi);
        self.zeros.iter().map(|a| (1.0 - a.norm_sqr()) / (e - a).norm_sqr()).sum()
    }
}

/// Clark measure `σ` of a finite Blaschke product for the value 1: atoms at
/// the solutions of `θ(ζ) = 1` with masses `1/|θ'(ζ)|`. The identity
/// `(1 - |θ(z)|²)/|1 - θ(z)|² = ∫ P_z dσ` is checked on a polar grid.
pub fn clark_measure(theta: &InnerFunction) -> Result<Measure1D> {
    theta.validate()?;
    if theta.singular.iter().any(|&(_, m)| m > 0.0) {
        return Err(Error::Hypothesis("Clark measures are computed for finite Blaschke products only".into()));
    }
    let d = theta.degree();
    if d == 0 {
        return Err(Error::Hypothesis("a constant has no Clark measure".into()));
    }
    let base = theta.phase(0.0);
    let first = (base / TAU).ceil() as i64;
    let mut atoms = Vec::with_capacity(d);
    for m in first..first + d as i64 {
        let target = TAU * m as f64;
        let (mut lo, mut hi) = (0.0, TAU);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if theta.phase(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let phi = 0.5 * (lo + hi);
        atoms.push(Atom1D { position: phi, mass: 1.0 / theta.phase_derivative(phi) });
    }
    let sigma = Measure1D::new(LineDomain::Circle, atoms)?;
    if sigma.len() != d {
        return Err(Error::RootFinding(format!("found {} distinct roots of θ = 1, expected {d}", sigma.len())));
    }
    let res = clark_residual(theta, &sigma, &residual_grid())?;
    if !(res < CLARK_TOL) {
        return Err(Error::RootFinding(format!("Clark identity residual {res:e}")));
    }
    Ok(sigma)
}

/// 100 points: radii `0, 0.1, …, 0.9` times 10 angles.
pub fn residual_grid() -> Vec<Complex64> {
    (0..10)
        .flat_map(|i| (0..10).map(move |j| Complex64::from_polar(0.1 * i as f64, TAU * (j as f64 + 0.37) / 10.0)))
        .collect()
}

/// Largest relative residual `|lhs - rhs| / max(1, |lhs|)` of the Clark
/// identity over the sample points.
pub fn clark_residual(theta: &InnerFunction, sigma: &Measure1D, zs: &[Complex64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in zs {
        let t = theta.eval(z)?;
        let den = (1.0 - t).norm_sqr();
        if den == 0.0 {
            continue;
        }
        let lhs = (1.0 - t.norm_sqr()) / den;
        let rhs: f64 = sigma.atoms().iter().map(|a| a.mass * poisson(z, unit(a.position))).sum();
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    Ok(worst)
}

fn poisson(z: Complex64, w: Complex64) -> f64 {
    (1.0 - z.norm_sqr()) / (w - z).norm_sqr()
}

/// `|1 - θ|² μ`.
pub fn nu_measure(theta: &InnerFunction, mu: &Measure2D) -> Result<Measure2D> {
    check_disk(mu)?;
    let weights: Vec<f64> =
        mu.atoms().iter().map(|a| Ok((1.0 - theta.eval(c(a.position))?).norm_sqr())).collect::<Result<_>>()?;
    let atoms = mu.atoms().iter().zip(weights).map(|(a, w)| crate::measure::Atom2D { position: a.position, mass: a.mass * w });
    Measure2D::new(PlaneDomain::Disk, atoms)
}

fn check_disk(tau: &Measure2D) -> Result<()> {
    if tau.domain() != PlaneDomain::Disk {
        return Err(Error::DomainMismatch("expected a disk measure".into()));
    }
    Ok(())
}

fn check_circle(sigma: &Measure1D) -> Result<()> {
    if sigma.domain() != LineDomain::Circle {
        return Err(Error::DomainMismatch("expected a circle measure".into()));
    }
    Ok(())
}

/// Arc `[start, start + length)` of the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Self {
        Self { start: normalize_angle(start), length }
    }

    /// `I_z`: centered at `arg z`, of length `1 - |z|`.
    pub fn of_point(z: Complex64) -> Self {
        let len = 1.0 - z.norm();
        Self::new(z.arg() - 0.5 * len, len)
    }

    pub fn contains(&self, angle: f64) -> bool {
        arc_contains(self.start, self.length, angle)
    }

    pub fn region(&self) -> Region {
        Region::Arc { start: self.start, length: self.length }
    }

    /// `B_I = {ρe^{iθ} : |1 - ρ| ≤ |I|, e^{iθ} ∈ I}`.
    pub fn in_box(&self, w: Point) -> bool {
        let rho = w[0].hypot(w[1]);
        let angle = if rho == 0.0 { 0.0 } else { w[1].atan2(w[0]) };
        (1.0 - rho).abs() <= self.length && self.contains(angle)
    }

    pub fn box_region(&self) -> Region {
        Region::CarlesonBox { start: self.start, length: self.length }
    }

    pub fn disjoint(&self, o: &Arc) -> bool {
        let d = normalize_angle(o.start - self.start);
        d >= self.length && TAU - d >= o.length
    }
}

/// `Pσ(z)` restricted to the atoms accepted by `keep`.
fn p_sigma(sigma: &Measure1D, z: Complex64, keep: impl Fn(f64) -> bool) -> f64 {
    sigma.atoms().iter().filter(|a| keep(a.position)).map(|a| a.mass * poisson(z, unit(a.position))).sum()
}

/// `Pτ(z)` under the convention of this module, restricted by `keep`.
fn p_tau(tau: &Measure2D, z: Complex64, keep: impl Fn(Point) -> bool) -> f64 {
    let s = 1.0 - z.norm_sqr();
    tau.atoms()
        .iter()
        .filter(|a| keep(a.position))
        .map(|a| a.mass * s / (1.0 - z.conj() * c(a.position)).norm_sqr())
        .sum()
}

/// `P(σ1_{𝕋∖I_z})(z)·Pτ(z) + Pσ(z)·P(τ1_{𝔻̄∖B_{I_z}})(z)`, or `None` for
/// samples outside `MIN_SAMPLE_RADIUS ≤ |z| < 1`.
pub fn a2_sample(sigma: &Measure1D, tau: &Measure2D, z: Complex64) -> Option<f64> {
    let r = z.norm();
    if !(MIN_SAMPLE_RADIUS..1.0).contains(&r) {
        return None;
    }
    let iz = Arc::of_point(z);
    let a = p_sigma(sigma, z, |t| !iz.contains(t)) * p_tau(tau, z, |_| true);
    let b = p_sigma(sigma, z, |_| true) * p_tau(tau, z, |w| !iz.in_box(w));
    Some(a + b)
}

/// `σ(I)^{-1} ∫_{B_I} |C_σ 1_I|² dτ`.
pub fn disk_forward_testing_sq(sigma: &Measure1D, tau: &Measure2D, arc: &Arc) -> Result<f64> {
    let src: Vec<_> = sigma.atoms().iter().filter(|a| arc.contains(a.position)).collect();
    let mass: f64 = src.iter().map(|a| a.mass).sum();
    if mass == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for t in tau.atoms().iter().filter(|t| arc.in_box(t.position)) {
        let z = c(t.position);
        let mut v = Complex64::new(0.0, 0.0);
        for a in &src {
            let den = 1.0 - unit(a.position).conj() * z;
            if den.norm() == 0.0 {
                return Err(Error::Singular(format!("σ and τ share the boundary point {z}")));
            }
            v += a.mass / den;
        }
        total += t.mass * v.norm_sqr();
    }
    Ok(total / mass)
}

/// `τ(B_I)^{-1} ∫_I |C*_τ 1_{B_I}|² dσ`.
pub fn disk_backward_testing_sq(sigma: &Measure1D, tau: &Measure2D, arc: &Arc) -> Result<f64> {
    let src: Vec<_> = tau.atoms().iter().filter(|t| arc.in_box(t.position)).collect();
    let mass: f64 = src.iter().map(|t| t.mass).sum();
    if mass == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for a in sigma.atoms().iter().filter(|a| arc.contains(a.position)) {
        let w = unit(a.position);
        let mut v = Complex64::new(0.0, 0.0);
        for t in &src {
            let den = 1.0 - w * c(t.position).conj();
            if den.norm() == 0.0 {
                return Err(Error::Singular(format!("σ and τ share the boundary point {w}")));
            }
            v += t.mass / den;
        }
        total += a.mass * v.norm_sqr();
    }
    Ok(total / mass)
}

/// Polar grid with radii `1 - 2^{-j}`, `j = 1..=levels`, and `n_angles`
/// angles, plus the same radii along every atom direction.
pub fn default_z_samples(sigma: &Measure1D, tau: &Measure2D, levels: u32, n_angles: usize) -> Vec<Complex64> {
    let mut angles: Vec<f64> = (0..n_angles).map(|j| TAU * (j as f64 + 0.5) / n_angles as f64).collect();
    angles.extend(sigma.positions());
    angles.extend(tau.atoms().iter().filter(|a| a.position != [0.0, 0.0]).map(|a| a.position[1].atan2(a.position[0])));
    let mut out = Vec::new();
    for j in 1..=levels {
        let r = 1.0 - 0.5f64.powi(j as i32);
        out.extend(angles.iter().map(|&a| Complex64::from_polar(r, a)));
    }
    // radial samples level with each interior τ atom
    for a in tau.atoms() {
        let w = c(a.position);
        if (MIN_SAMPLE_RADIUS..1.0).contains(&w.norm()) {
            out.push(w);
        }
    }
    out
}

/// Arcs of length `2^{-j} ≤ 1/2`, `j = 1..=levels`, from the standard
/// lattice `{i 2^{-j}}` and `n_rot` seeded rotations of it, that contain an
/// atom of `σ` or the direction of an atom of `τ`.
pub fn arc_family(sigma: &Measure1D, tau: &Measure2D, levels: u32, n_rot: usize, seed: u64) -> Vec<Arc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rotations = vec![0.0];
    rotations.extend((0..n_rot).map(|_| rng.gen_range(0.0..TAU)));
    let mut angles = sigma.positions();
    angles.extend(
        tau.atoms()
            .iter()
            .filter(|a| a.position != [0.0, 0.0])
            .map(|a| normalize_angle(a.position[1].atan2(a.position[0]))),
    );
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for j in 1..=levels {
        let len = 0.5f64.powi(j as i32);
        for &rot in &rotations {
            for &a in &angles {
                let i = ((normalize_angle(a - rot)) / len).floor();
                let arc = Arc::new(rot + i * len, len);
                if seen.insert((arc.start.to_bits(), len.to_bits())) {
                    out.push(arc);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskConstantsReport {
    /// `σ(𝕋) τ(𝔻̄)`.
    pub global: f64,
    pub a2_sup: f64,
    /// `global + a2_sup`.
    pub a2: f64,
    pub t_forward: f64,
    pub t_backward: f64,
    /// Norm of `C_σ : L²(σ) → L²(τ)` on complex functions.
    pub n_direct: f64,
    /// `√A₂ + max(t_forward, t_backward)`.
    pub r_char: f64,
    pub a2_witness: Option<Complex64>,
    pub t_forward_witness: Option<Arc>,
    pub t_backward_witness: Option<Arc>,
    /// Samples left out of the `A₂` sup (near the origin or off the open disk).
    pub skipped_samples: usize,
    pub p_tau_convention: &'static str,
}

impl DiskConstantsReport {
    pub fn testing(&self) -> f64 {
        self.t_forward.max(self.t_backward)
    }
}

pub fn disk_constants(
    sigma: &Measure1D,
    tau: &Measure2D,
    z_samples: &[Complex64],
    arcs: &[Arc],
    tol: f64,
) -> Result<DiskConstantsReport> {
    check_circle(sigma)?;
    check_disk(tau)?;
    if z_samples.is_empty() || arcs.is_empty() {
        return Err(Error::Invalid("sample families must be nonempty".into()));
    }
    if arcs.iter().any(|a| !(a.length > 0.0 && a.length <= 0.5)) {
        return Err(Error::Invalid("testing arcs need 0 < |I| ≤ 1/2".into()));
    }
    let global = sigma.total_mass() * tau.total_mass();
    let vals: Vec<Option<f64>> = z_samples.par_iter().map(|&z| a2_sample(sigma, tau, z)).collect();
    let skipped = vals.iter().filter(|v| v.is_none()).count();
    let (mut a2_sup, mut a2_witness) = (0.0, None);
    for (v, &z) in vals.iter().zip(z_samples) {
        if let Some(v) = *v {
            if v > a2_sup {
                a2_sup = v;
                a2_witness = Some(z);
            }
        }
    }
    let per: Vec<(f64, f64)> = arcs
        .par_iter()
        .map(|a| Ok((disk_forward_testing_sq(sigma, tau, a)?, disk_backward_testing_sq(sigma, tau, a)?)))
        .collect::<Result<_>>()?;
    let (mut tf, mut tb, mut wf, mut wb) = (0.0, 0.0, None, None);
    for (&(f, b), a) in per.iter().zip(arcs) {
        if f > tf {
            tf = f;
            wf = Some(*a);
        }
        if b > tb {
            tb = b;
            wb = Some(*a);
        }
    }
    let (tf, tb) = (tf.sqrt(), tb.sqrt());
    let n = operator_norm(&KernelKind::DiskCauchy, &Weighted::from(sigma), &Weighted::from(tau), tol)?.norm;
    let a2 = global + a2_sup;
    Ok(DiskConstantsReport {
        global,
        a2_sup,
        a2,
        t_forward: tf,
        t_backward: tb,
        n_direct: n,
        r_char: a2.sqrt() + tf.max(tb),
        a2_witness,
        t_forward_witness: wf,
        t_backward_witness: wb,
        skipped_samples: skipped,
        p_tau_convention: P_TAU_CONVENTION,
    })
}

/// Heuristic disk analogue of the weak-boundedness ratio: the norm of the
/// Cauchy block from `σ` on `I` to `τ` on `B_{I'}`, over `√A₂`. Arcs must
/// be disjoint.
pub fn disk_weak_boundedness_ratio(sigma: &Measure1D, tau: &Measure2D, i: &Arc, j: &Arc, a2: f64) -> Result<f64> {
    check_circle(sigma)?;
    if !i.disjoint(j) {
        return Err(Error::Hypothesis(format!("arcs {i:?} and {j:?} overlap")));
    }
    let s = sigma.restrict(&i.region())?;
    let t = tau.restrict(&j.box_region())?;
    let m = weighted_matrix(&KernelKind::DiskCauchy, &Weighted::from(&s), &Weighted::from(&t))?;
    let norm = largest_singular_value(&m, DEFAULT_TOL)?.norm;
    Ok(if norm == 0.0 {
        0.0
    } else if a2 == 0.0 {
        f64::INFINITY
    } else {
        norm / a2.sqrt()
    })
}

/// Pullback of `tau_base` under the polynomial `Σ coeffs[k] z^k`.
pub fn pullback(coeffs: &[Complex64], tau_base: &Measure2D) -> Result<Measure2D> {
    check_disk(tau_base)?;
    let eval = |z: Complex64| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
    for a in tau_base.atoms() {
        let w = eval(c(a.position));
        if w.norm() > 1.0 + 1e-9 {
            return Err(Error::MapOutOfDomain([w.re, w.im]));
        }
    }
    tau_base.push_forward(|p| {
        let w = eval(c(p));
        let w = if w.norm() > 1.0 { w / w.norm() } else { w };
        [w.re, w.im]
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactnessProfile {
    /// `(r, sup_{|z| ≥ r} A₂ tail)` over the radius grid.
    pub a2: Vec<(f64, f64)>,
    /// `(ε, sup_{|I| < ε} forward testing ratio)`.
    pub forward: Vec<(f64, f64)>,
    pub backward: Vec<(f64, f64)>,
}

/// The three compactness suprema. The `A₂` entry at `r` is the sup over
/// samples on the circles of radius `r' ≥ r` from `radius_grid`, so every
/// table is nonincreasing in the limit direction. The testing entries use
/// `arcs` shorter than each `ε`.
pub fn compactness_profile(
    sigma: &Measure1D,
    tau: &Measure2D,
    radius_grid: &[f64],
    length_grid: &[f64],
    arcs: &[Arc],
    n_angles: usize,
) -> Result<CompactnessProfile> {
    check_circle(sigma)?;
    check_disk(tau)?;
    let mut angles: Vec<f64> = (0..n_angles).map(|j| TAU * j as f64 / n_angles as f64).collect();
    angles.extend(sigma.positions());
    let per_radius: Vec<f64> = radius_grid
        .par_iter()
        .map(|&r| {
            angles
                .iter()
                .filter_map(|&a| a2_sample(sigma, tau, Complex64::from_polar(r, a)))
                .fold(0.0, f64::max)
        })
        .collect();
    let mut a2 = Vec::with_capacity(radius_grid.len());
    let mut order: Vec<usize> = (0..radius_grid.len()).collect();
    order.sort_by(|&i, &j| radius_grid[j].total_cmp(&radius_grid[i]));
    let mut run = 0.0f64;
    for i in order {
        run = run.max(per_radius[i]);
        a2.push((radius_grid[i], run));
    }
    a2.reverse();
    let ratios: Vec<(f64, f64, f64)> = arcs
        .par_iter()
        .map(|a| {
            let f = disk_forward_testing_sq(sigma, tau, a)?;
            let b = disk_backward_testing_sq(sigma, tau, a)?;
            Ok((a.length, f, b))
        })
        .collect::<Result<_>>()?;
    let table = |pick: fn(&(f64, f64, f64)) -> f64| -> Vec<(f64, f64)> {
        length_grid
            .iter()
            .map(|&eps| (eps, ratios.iter().filter(|r| r.0 < eps).map(pick).fold(0.0, f64::max)))
            .collect()
    };
    Ok(CompactnessProfile { a2, forward: table(|r| r.1), backward: table(|r| r.2) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelProbe {
    pub value: f64,
    pub witness: Option<Complex64>,
}

/// `max_λ ∫ |k_λ|² dμ / ‖k_λ‖²` with `k_λ(z) = (1 - conj(θ(λ)) θ(z))/(1 - λ̄z)`,
/// a lower bound for the squared embedding constant of `K_θ` into `L²(μ)`.
pub fn kernel_probe(theta: &InnerFunction, mu: &Measure2D, lambdas: &[Complex64]) -> Result<KernelProbe> {
    check_disk(mu)?;
    let thetas: Vec<Complex64> = mu.atoms().iter().map(|a| theta.eval(c(a.position))).collect::<Result<_>>()?;
    let mut best = KernelProbe { value: 0.0, witness: None };
    for &l in lambdas {
        if !(l.norm() < 1.0) {
            return Err(Error::Invalid(format!("probe point {l} is not in the open disk")));
        }
        let tl = theta.eval(l)?;
        let norm_sq = (1.0 - tl.norm_sqr()) / (1.0 - l.norm_sqr());
        if norm_sq <= 0.0 {
            continue;
        }
        let num: f64 = mu
            .atoms()
            .iter()
            .zip(&thetas)
            .map(|(a, &t)| a.mass * ((1.0 - tl.conj() * t) / (1.0 - l.conj() * c(a.position))).norm_sqr())
            .sum();
        let v = num / norm_sq;
        if v > best.value {
            best = KernelProbe { value: v, witness: Some(l) };
        }
    }
    Ok(best)
}

/// Polar probe points `(1 - 2^{-j}) e^{2πi k/n}`.
pub fn default_lambdas(levels: u32, n_angles: usize) -> Vec<Complex64> {
    (1..=levels)
        .flat_map(|j| {
            let r = 1.0 - 0.5f64.powi(j as i32);
            (0..n_angles).map(move |k| Complex64::from_polar(r, TAU * (k as f64 + 0.25) / n_angles as f64))
        })
        .collect()
}

/// Circle measure from `(angle, mass)` pairs.
pub fn circle_measure(pairs: &[(f64, f64)]) -> Result<Measure1D> {
    Measure1D::from_pairs(LineDomain::Circle, pairs)
}

/// Disk measure from `(re, im, mass)` triples.
pub fn disk_measure(triples: &[(f64, f64, f64)]) -> Result<Measure2D> {
    Measure2D::from_triples(PlaneDomain::Disk, triples)
}

/// `1 + P_z(w) + iQ_z(w)` for `z ∈ 𝔻`, `w ∈ 𝕋`.
pub fn poisson_pair(z: Complex64, w: Complex64) -> Complex64 {
    let d = (w - z).norm_sqr();
    Complex64::new(1.0 + (1.0 - z.norm_sqr()) / d, 2.0 * (z * w.conj()).im / d)
}
