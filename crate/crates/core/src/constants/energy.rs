use serde::{Deserialize, Serialize};

use super::characterization::{poisson_average, t_tau};
use crate::dyadic::{DyadicInterval, Grid};
use crate::measure::{Interval, Measure1D, Measure2D};
use crate::{Error, Point, Result};

/// `E(σ, I)² = σ(I)^{-1} Σ_{good J ⊂ I} ⟨t/|I|, h_J^σ⟩²`; returns `E(σ, I)`.
pub fn energy_line(sigma: &Measure1D, grid: &Grid, iv: &DyadicInterval) -> f64 {
    energy_line_sq(sigma, grid, iv).sqrt()
}

pub fn energy_line_sq(sigma: &Measure1D, grid: &Grid, iv: &DyadicInterval) -> f64 {
    let (lo, hi) = sigma.index_range(&iv.span());
    let atoms = &sigma.atoms()[lo..hi];
    let total: f64 = atoms.iter().map(|a| a.mass).sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut mass = vec![0.0];
    let mut moment = vec![0.0];
    for a in atoms {
        mass.push(mass.last().unwrap() + a.mass);
        moment.push(moment.last().unwrap() + a.mass * a.position);
    }
    let len = iv.len();
    let mut acc = 0.0;
    let mut stack = vec![(*iv, 0usize, atoms.len())];
    while let Some((j, lo, hi)) = stack.pop() {
        if hi - lo < 2 {
            continue;
        }
        let Some([l, r]) = grid.children(&j) else { continue };
        let mid = lo + atoms[lo..hi].partition_point(|a| a.position < r.left);
        let (ml, mr) = (mass[mid] - mass[lo], mass[hi] - mass[mid]);
        if ml > 0.0 && mr > 0.0 && grid.is_good(&j) {
            let s = (ml * mr / (ml + mr)).sqrt();
            let c = s * ((moment[hi] - moment[mid]) / mr - (moment[mid] - moment[lo]) / ml) / len;
            acc += c * c;
        }
        stack.push((l, lo, mid));
        stack.push((r, mid, hi));
    }
    acc / total
}

fn cube_atoms<'a>(tau: &'a Measure2D, iv: &Interval) -> Vec<&'a crate::measure::Atom2D> {
    let (lo, hi) = tau.column_range(iv);
    tau.atoms()[lo..hi].iter().filter(|a| a.position[1] < iv.len()).collect()
}

/// `E(τ, I)² = τ(Q_I)^{-1} ‖x/|I|‖²_{L²₀(Q_I, τ)}`, the mass-weighted
/// variance of `x/|I|` over the Carleson cube; returns `E(τ, I)`.
pub fn energy_plane(tau: &Measure2D, iv: &Interval) -> f64 {
    let atoms = cube_atoms(tau, iv);
    let mass: f64 = atoms.iter().map(|a| a.mass).sum();
    // a point mass has no spread; the mean below would leave rounding noise
    if mass == 0.0 || atoms.len() < 2 {
        return 0.0;
    }
    let mean = [
        atoms.iter().map(|a| a.mass * a.position[0]).sum::<f64>() / mass,
        atoms.iter().map(|a| a.mass * a.position[1]).sum::<f64>() / mass,
    ];
    let var: f64 =
        atoms.iter().map(|a| a.mass * ((a.position[0] - mean[0]).powi(2) + (a.position[1] - mean[1]).powi(2))).sum();
    (var / mass).sqrt() / iv.len()
}

/// Same quantity from the pair form `2‖g‖²₀ = E_Q ∫_Q |g(x) - g(x')|²`.
pub fn energy_plane_pairwise(tau: &Measure2D, iv: &Interval) -> f64 {
    let atoms = cube_atoms(tau, iv);
    let mass: f64 = atoms.iter().map(|a| a.mass).sum();
    if mass == 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    for a in &atoms {
        for b in &atoms {
            let d = [a.position[0] - b.position[0], a.position[1] - b.position[1]];
            s += a.mass * b.mass * (d[0] * d[0] + d[1] * d[1]);
        }
    }
    (s / (2.0 * mass * mass)).sqrt() / iv.len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyInequality {
    /// `Σ_I Σ_{K ∈ 𝒲I} T_τ(Q_{I0}∖Q_K)(x_{Q_K})² E(σ,K)² σ(K)` against `ℛ² τ(Q_{I0})`.
    First,
    /// `Σ_I Σ_{K ∈ 𝒲I} P(σ 1_{I0∖K}, K)² E(τ,K)² τ(Q_K)` against `ℛ² σ(I0)`.
    Second,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub lhs: f64,
    /// `τ(Q_{I0})` or `σ(I0)`.
    pub mass: f64,
    /// `lhs / (ℛ² · mass)`; zero when `lhs` vanishes.
    pub ratio: f64,
    pub contributions: Vec<(Interval, f64)>,
}

/// Left side of either energy inequality for a partition of `i0` into grid
/// intervals, divided by `ℛ²` times the relevant mass.
pub fn energy_inequality_report(
    sigma: &Measure1D,
    tau: &Measure2D,
    grid: &Grid,
    i0: &DyadicInterval,
    partition: &[DyadicInterval],
    which: EnergyInequality,
    r_char: f64,
) -> Result<EnergyReport> {
    let top = i0.span();
    let total: f64 = partition.iter().map(|p| p.len()).sum();
    if partition.iter().any(|p| !p.is_inside(i0)) || (total - top.len()).abs() > 1e-9 * top.len() {
        return Err(Error::Hypothesis("partition must tile the top interval".into()));
    }
    let mut contributions = Vec::new();
    let mut lhs = 0.0;
    for p in partition {
        for k in grid.whitney(p).members {
            let ks = k.span();
            let c = match which {
                EnergyInequality::First => {
                    let sk = sigma.mass_in(&ks);
                    if sk == 0.0 {
                        continue;
                    }
                    let t = t_tau(tau, ks.cube_center(), |y| top.in_carleson_cube(y) && !ks.in_carleson_cube(y));
                    t * t * energy_line_sq(sigma, grid, &k) * sk
                }
                EnergyInequality::Second => {
                    let tk = tau.cube_mass(&ks);
                    if tk == 0.0 {
                        continue;
                    }
                    let pa = poisson_average(sigma, &ks, None, |t| top.contains(t) && !ks.contains(t));
                    let e = energy_plane(tau, &ks);
                    pa * pa * e * e * tk
                }
            };
            lhs += c;
            contributions.push((ks, c));
        }
    }
    let mass = match which {
        EnergyInequality::First => tau.cube_mass(&top),
        EnergyInequality::Second => sigma.mass_in(&top),
    };
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / (r_char * r_char * mass) };
    Ok(EnergyReport { lhs, mass, ratio, contributions })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VRegionMembership {
    pub in_v: bool,
    pub in_top: bool,
    pub in_bottom: bool,
}

/// Membership in `V_I = ⋃_{t ∈ I} {|x1 - t| < x2}` and its split outside
/// `Q_I` into the top part (`8 x2 ≥ |I|`) and bottom part (`8 x2 < |I|`).
pub fn v_region(iv: &Interval, x: Point) -> VRegionMembership {
    let in_v = iv.dist(x[0]) < x[1];
    let outside = in_v && !iv.in_carleson_cube(x);
    let low = 8.0 * x[1] < iv.len();
    VRegionMembership { in_v, in_top: outside && !low, in_bottom: outside && low }
}

/// `max_x Σ_I 1_{V_I^bottom}(x)` over the sample points.
pub fn bottom_overlap(partition: &[Interval], samples: &[Point]) -> usize {
    samples.iter().map(|&x| partition.iter().filter(|iv| v_region(iv, x).in_bottom).count()).max().unwrap_or(0)
}
