use serde::Serialize;

use super::characterization::poisson_average;
use super::energy::v_region;
use crate::dyadic::{DyadicInterval, Grid};
use crate::haar::HaarFunction;
use crate::measure::{check_len, Interval, Measure1D, Measure2D};
use crate::{Error, Point, Result};

/// Data for the first-side monotonicity displays. `phi` lives on the atoms
/// of `tau`; `f` (optional) on the atoms of `sigma`.
#[derive(Debug, Clone, Copy)]
pub struct MonotonicityI<'a> {
    pub sigma: &'a Measure1D,
    pub tau: &'a Measure2D,
    pub grid: &'a Grid,
    pub big: Interval,
    pub small: DyadicInterval,
    pub phi: &'a [f64],
    pub f: Option<&'a [f64]>,
}

/// Ratios `lhs/rhs` of each display whose hypotheses hold; `None` otherwise,
/// with the reason in `violations`.
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityIReport {
    /// `|⟨R*_τ φ, h_{J'}⟩_σ| / (T_τ φ(x_{Q_J}) ⟨t/|J|, h_{J'}⟩)` over `J' ⊂ J`.
    pub mono_i2: Option<Vec<f64>>,
    /// `|⟨R*_τ φ, h_{J'}⟩_σ| / (T_τ|φ|(x_{Q_J}) ⟨t/|J|, h_{J'}⟩)` over `J' ⊂ J`.
    pub mono: Option<Vec<f64>>,
    /// `|⟨R*_τ φ, f⟩_σ| / (T_τ|φ|(x_{Q_J}) ∫_J |f| dσ)`.
    pub mono_i1: Option<f64>,
    pub violations: Vec<String>,
}

fn riesz(x: Point, t: f64) -> Result<[f64; 2]> {
    let d = [x[0] - t, x[1]];
    let d2 = d[0] * d[0] + d[1] * d[1];
    if d2 == 0.0 {
        return Err(Error::Singular(format!("σ atom {t} coincides with τ atom {x:?}")));
    }
    Ok([d[0] / d2, d[1] / d2])
}

/// `⟨R*_τ φ, w⟩_σ` where `w` gives a weight per `σ` atom.
fn adjoint_pairing(sigma: &Measure1D, tau: &Measure2D, phi: &[f64], w: impl Fn(usize, f64) -> f64) -> Result<[f64; 2]> {
    let mut acc = [0.0, 0.0];
    for (i, s) in sigma.atoms().iter().enumerate() {
        let ws = w(i, s.position);
        if ws == 0.0 {
            continue;
        }
        for (a, &p) in tau.atoms().iter().zip(phi) {
            if p == 0.0 {
                continue;
            }
            let k = riesz(a.position, s.position)?;
            acc[0] += ws * s.mass * p * a.mass * k[0];
            acc[1] += ws * s.mass * p * a.mass * k[1];
        }
    }
    Ok(acc)
}

/// Nonzero Haar functions of intervals inside `j`, with `⟨t, h⟩`.
fn haar_below(sigma: &Measure1D, grid: &Grid, j: &DyadicInterval) -> Vec<(HaarFunction, f64)> {
    let mut out = Vec::new();
    let mut stack = vec![*j];
    while let Some(iv) = stack.pop() {
        let (lo, hi) = sigma.index_range(&iv.span());
        if hi - lo < 2 {
            continue;
        }
        let Some([l, r]) = grid.children(&iv) else { continue };
        let atoms = &sigma.atoms()[lo..hi];
        let (mut ml, mut mr, mut tl, mut tr) = (0.0, 0.0, 0.0, 0.0);
        for a in atoms {
            if a.position < r.left {
                ml += a.mass;
                tl += a.mass * a.position;
            } else {
                mr += a.mass;
                tr += a.mass * a.position;
            }
        }
        let h = HaarFunction::from_masses(iv, r.left, ml, mr);
        if !h.is_zero {
            out.push((h, h.scale * (tr / mr - tl / ml)));
        }
        stack.push(l);
        stack.push(r);
    }
    out
}

pub fn monotonicity_i(cfg: &MonotonicityI) -> Result<MonotonicityIReport> {
    let MonotonicityI { sigma, tau, grid, big, small, phi, f } = *cfg;
    check_len(tau.len(), phi.len())?;
    let js = small.span();
    if !big.contains_interval(&js.dilate(10.0)) {
        return Err(Error::Hypothesis("10·J ⊂ I".into()));
    }
    let mut violations = Vec::new();
    let off_v = tau.atoms().iter().zip(phi).all(|(a, &p)| p == 0.0 || !v_region(&big, a.position).in_v);
    let off_q = tau.atoms().iter().zip(phi).all(|(a, &p)| p == 0.0 || !big.in_carleson_cube(a.position));
    let nonneg = phi.iter().all(|&p| p >= 0.0);
    let xq = js.cube_center();
    let t_phi = t_tau_weighted(tau, xq, phi, false);
    let t_abs = t_tau_weighted(tau, xq, phi, true);
    let haar = haar_below(sigma, grid, &small);
    let lhs_for = |h: &HaarFunction| -> Result<f64> {
        let v = adjoint_pairing(sigma, tau, phi, |_, t| h.eval(t))?;
        Ok(v[0].hypot(v[1]))
    };
    let ratios = |t: f64| -> Result<Vec<f64>> {
        haar.iter().map(|(h, th)| Ok(ratio(lhs_for(h)?, t * th / js.len()))).collect()
    };

    let mono_i2 = if !off_v {
        violations.push("φ must vanish on V_I".into());
        None
    } else if !nonneg {
        violations.push("φ ≥ 0".into());
        None
    } else {
        Some(ratios(t_phi)?)
    };
    let (mono, mono_i1) = if !off_q {
        violations.push("φ must vanish on Q_I".into());
        (None, None)
    } else {
        let i1 = match f {
            None => None,
            Some(f) => {
                check_len(sigma.len(), f.len())?;
                let outside = sigma.atoms().iter().zip(f).any(|(a, &v)| v != 0.0 && !small.contains(a.position));
                let mean: f64 = sigma.atoms().iter().zip(f).map(|(a, v)| a.mass * v).sum();
                let l1: f64 = sigma.atoms().iter().zip(f).map(|(a, v)| a.mass * v.abs()).sum();
                if outside {
                    violations.push("f supported on J".into());
                    None
                } else if mean.abs() > 1e-12 * l1.max(1e-300) {
                    violations.push("∫ f dσ = 0".into());
                    None
                } else {
                    let v = adjoint_pairing(sigma, tau, phi, |i, _| f[i])?;
                    Some(ratio(v[0].hypot(v[1]), t_abs * l1))
                }
            }
        };
        (Some(ratios(t_abs)?), i1)
    };
    if mono_i2.is_none() && mono.is_none() {
        return Err(Error::Hypothesis(violations.join("; ")));
    }
    Ok(MonotonicityIReport { mono_i2, mono, mono_i1, violations })
}

fn t_tau_weighted(tau: &Measure2D, x: Point, phi: &[f64], abs: bool) -> f64 {
    tau.atoms()
        .iter()
        .zip(phi)
        .map(|(a, &p)| {
            let y = a.position;
            let w = if abs { p.abs() } else { p };
            w * a.mass * x[1] / (y[1] * y[1] + (y[0] - x[0]).powi(2) + x[1] * x[1])
        })
        .sum()
}

/// Data for the second-side displays. `f` lives on the atoms of `sigma`.
#[derive(Debug, Clone, Copy)]
pub struct MonotonicityII<'a> {
    pub sigma: &'a Measure1D,
    pub tau: &'a Measure2D,
    pub big: Interval,
    pub small: Interval,
    pub f: &'a [f64],
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityIIReport {
    /// `‖R_σ f‖_{L²₀(Q_J)} / (P(|f|σ, J) ‖x/|J|‖_{L²₀(Q_J)})`.
    pub upper: Option<f64>,
    /// `P(fσ, J) ‖x1/|J|‖_{L²₀(Q_J)} / ‖R_σ f‖_{L²₀(Q_J)}`, for `f ≥ 0`.
    pub lower: Option<f64>,
    pub violations: Vec<String>,
}

fn centered_norm(values: &[([f64; 2], f64)]) -> f64 {
    let mass: f64 = values.iter().map(|(_, m)| m).sum();
    if mass == 0.0 {
        return 0.0;
    }
    let mean = [
        values.iter().map(|(v, m)| m * v[0]).sum::<f64>() / mass,
        values.iter().map(|(v, m)| m * v[1]).sum::<f64>() / mass,
    ];
    values.iter().map(|(v, m)| m * ((v[0] - mean[0]).powi(2) + (v[1] - mean[1]).powi(2))).sum::<f64>().sqrt()
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

pub fn monotonicity_ii(cfg: &MonotonicityII) -> Result<MonotonicityIIReport> {
    let MonotonicityII { sigma, tau, big, small, f } = *cfg;
    check_len(sigma.len(), f.len())?;
    if !big.contains_interval(&small.dilate(10.0)) {
        return Err(Error::Hypothesis("10·J ⊂ I".into()));
    }
    if sigma.atoms().iter().zip(f).any(|(a, &v)| v != 0.0 && big.contains(a.position)) {
        return Err(Error::Hypothesis("f must vanish on I".into()));
    }
    let mut violations = Vec::new();
    let (lo, hi) = tau.column_range(&small);
    let cube: Vec<_> = tau.atoms()[lo..hi].iter().filter(|a| a.position[1] < small.len()).collect();
    let mut rf = Vec::with_capacity(cube.len());
    for a in &cube {
        let mut v = [0.0, 0.0];
        for (s, &w) in sigma.atoms().iter().zip(f) {
            if w != 0.0 {
                let k = riesz(a.position, s.position)?;
                v[0] += w * s.mass * k[0];
                v[1] += w * s.mass * k[1];
            }
        }
        rf.push((v, a.mass));
    }
    let r_norm = centered_norm(&rf);
    let len = small.len();
    let x_norm = centered_norm(&cube.iter().map(|a| (a.position, a.mass)).collect::<Vec<_>>()) / len;
    let x1_norm = centered_norm(&cube.iter().map(|a| ([a.position[0], 0.0], a.mass)).collect::<Vec<_>>()) / len;
    let abs_f: Vec<f64> = f.iter().map(|v| v.abs()).collect();
    let p_abs = poisson_average(sigma, &small, Some(&abs_f), |_| true);
    let upper = Some(ratio(r_norm, p_abs * x_norm));
    let lower = if f.iter().all(|&v| v >= 0.0) {
        Some(ratio(p_abs * x1_norm, r_norm))
    } else {
        violations.push("f ≥ 0".into());
        None
    };
    Ok(MonotonicityIIReport { upper, lower, violations })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiggerReport {
    pub samples: usize,
    /// Whether `sgn(t - t_J)(K¹(x, t) - K¹(x, t_J)) ≥ 0` at every sample.
    pub all_nonnegative: bool,
    /// Smallest value of that expression divided by
    /// `|t - t_J| / (|J|² + dist(x1, J)²)`.
    pub c_observed: f64,
}

/// Sign check of the first Riesz component at pairs `(t, x)` with `t ∈ J`
/// and `x ∉ V_I`, where `10·J ⊂ I`.
pub fn bigger_check(big: &Interval, small: &Interval, samples: &[(f64, Point)]) -> Result<BiggerReport> {
    if !big.contains_interval(&small.dilate(10.0)) {
        return Err(Error::Hypothesis("10·J ⊂ I".into()));
    }
    let c = small.center();
    let len = small.len();
    let mut all = true;
    let mut c_obs = f64::INFINITY;
    for &(t, x) in samples {
        if !small.contains(t) || v_region(big, x).in_v {
            return Err(Error::Hypothesis(format!("sample t={t}, x={x:?} needs t ∈ J and x ∉ V_I")));
        }
        if t == c {
            continue;
        }
        let (u, v, h) = (x[0] - t, x[0] - c, x[1]);
        let den = (u * u + h * h) * (v * v + h * h);
        if den == 0.0 {
            return Err(Error::Singular(format!("x={x:?} on the real axis at t")));
        }
        // K¹(x,t) - K¹(x,c) = (t - c)(uv - h²)/den
        let value = (t - c).abs() * (u * v - h * h) / den;
        all &= value >= 0.0;
        let shape = (t - c).abs() / (len * len + small.dist(x[0]).powi(2));
        c_obs = c_obs.min(value / shape);
    }
    Ok(BiggerReport { samples: samples.len(), all_nonnegative: all, c_observed: c_obs })
}
