//! Weighted Haar functions on the line and weighted martingale differences on
//! the half-plane cubes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dyadic::{DyadicCube, DyadicInterval, Grid};
use crate::measure::{check_len, LineDomain, Measure1D, Measure2D};
use crate::{Error, Point, Result};

/// `h_I^σ = sqrt(σ(I+)σ(I-)/σ(I)) (1_{I+}/σ(I+) - 1_{I-}/σ(I-))`, with `I+`
/// the right child. Zero when either child carries no mass.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HaarFunction {
    pub interval: DyadicInterval,
    pub midpoint: f64,
    pub value_plus: f64,
    pub value_minus: f64,
    /// `sqrt(σ(I+)σ(I-)/σ(I))`; `⟨f, h⟩ = scale · (E_{I+} f - E_{I-} f)`.
    pub scale: f64,
    pub is_zero: bool,
}

impl HaarFunction {
    pub fn from_masses(interval: DyadicInterval, midpoint: f64, minus: f64, plus: f64) -> Self {
        if minus <= 0.0 || plus <= 0.0 {
            return Self { interval, midpoint, value_plus: 0.0, value_minus: 0.0, scale: 0.0, is_zero: true };
        }
        let s = (minus * plus / (minus + plus)).sqrt();
        Self { interval, midpoint, value_plus: s / plus, value_minus: -s / minus, scale: s, is_zero: false }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if !self.interval.contains(t) {
            0.0
        } else if t >= self.midpoint {
            self.value_plus
        } else {
            self.value_minus
        }
    }
}

fn check_line(sigma: &Measure1D) -> Result<()> {
    if sigma.domain() != LineDomain::Line {
        return Err(Error::DomainMismatch("Haar analysis needs a line measure".into()));
    }
    Ok(())
}

pub fn haar_function(sigma: &Measure1D, grid: &Grid, iv: &DyadicInterval) -> Result<HaarFunction> {
    check_line(sigma)?;
    let [l, r] = grid.children(iv).ok_or_else(|| {
        Error::ScaleOutOfWindow { k: iv.k - 1, k_min: grid.params().k_min, k_max: grid.params().k_max }
    })?;
    Ok(HaarFunction::from_masses(*iv, r.left, sigma.mass_in(&l.span()), sigma.mass_in(&r.span())))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HaarTerm {
    pub h: HaarFunction,
    pub coefficient: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RootTerm {
    pub interval: DyadicInterval,
    pub mean: f64,
    pub mass: f64,
}

/// `f = Σ_roots E_root f · 1_root + Σ_I ⟨f, h_I⟩ h_I` in `L²(σ)`.
#[derive(Debug, Clone)]
pub struct HaarExpansion {
    pub grid: Grid,
    pub terms: BTreeMap<(i32, i64), HaarTerm>,
    pub roots: Vec<RootTerm>,
}

impl HaarExpansion {
    pub fn coefficient_energy(&self) -> f64 {
        self.terms.values().map(|t| t.coefficient * t.coefficient).sum()
    }

    pub fn mean_energy(&self) -> f64 {
        self.roots.iter().map(|r| r.mean * r.mean * r.mass).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coefficient_energy() + self.mean_energy()
    }

    pub fn synthesize(&self, positions: &[f64]) -> Result<Vec<f64>> {
        let p = *self.grid.params();
        positions
            .iter()
            .map(|&t| {
                let mut v = 0.0;
                let root = self.grid.locate(t, p.k_max)?;
                if let Some(rt) = self.roots.iter().find(|r| r.interval == root) {
                    v += rt.mean;
                }
                for k in (p.k_min + 1)..=p.k_max {
                    let iv = self.grid.locate(t, k)?;
                    if let Some(term) = self.terms.get(&iv.key()) {
                        v += term.coefficient * term.h.eval(t);
                    }
                }
                Ok(v)
            })
            .collect()
    }

    /// Keeps only the terms accepted by `keep`; roots are kept when `roots`.
    pub fn filtered(&self, keep: impl Fn(&HaarTerm) -> bool, roots: bool) -> Self {
        Self {
            grid: self.grid.clone(),
            terms: self.terms.iter().filter(|(_, t)| keep(t)).map(|(k, t)| (*k, *t)).collect(),
            roots: if roots { self.roots.clone() } else { Vec::new() },
        }
    }
}

/// Prefix sums of mass and of `mass·f` over sorted atoms.
struct Prefix {
    mass: Vec<f64>,
    moment: Vec<f64>,
}

impl Prefix {
    fn new(masses: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut mass = vec![0.0];
        let mut moment = vec![0.0];
        for (m, v) in masses {
            mass.push(mass.last().unwrap() + m);
            moment.push(moment.last().unwrap() + m * v);
        }
        Self { mass, moment }
    }

    fn mass(&self, lo: usize, hi: usize) -> f64 {
        self.mass[hi] - self.mass[lo]
    }

    fn moment(&self, lo: usize, hi: usize) -> f64 {
        self.moment[hi] - self.moment[lo]
    }
}

/// Haar expansion of `f` (values on the atoms of `σ`).
pub fn analyze(sigma: &Measure1D, f: &[f64], grid: &Grid) -> Result<HaarExpansion> {
    check_line(sigma)?;
    check_len(sigma.len(), f.len())?;
    if let Some(v) = grid.first_violation(sigma, &Measure2D::half_plane(&[])?) {
        return Err(Error::Inadmissible(v));
    }
    let atoms = sigma.atoms();
    let pos: Vec<f64> = atoms.iter().map(|a| a.position).collect();
    let pre = Prefix::new(atoms.iter().zip(f).map(|(a, &v)| (a.mass, v)));
    let p = *grid.params();
    let mut terms = BTreeMap::new();
    let mut roots = Vec::new();
    let mut i = 0;
    while i < atoms.len() {
        let root = grid.locate(pos[i], p.k_max)?;
        let j = i + pos[i..].partition_point(|&t| t < root.right);
        let mass = pre.mass(i, j);
        roots.push(RootTerm { interval: root, mean: pre.moment(i, j) / mass, mass });
        let mut stack = vec![(root, i, j)];
        while let Some((iv, lo, hi)) = stack.pop() {
            match grid.children(&iv) {
                None => {
                    if hi - lo > 1 {
                        return Err(Error::Unresolved(pos[lo], pos[hi - 1]));
                    }
                }
                Some([l, r]) => {
                    let mid = lo + pos[lo..hi].partition_point(|&t| t < r.left);
                    let (ml, mr) = (pre.mass(lo, mid), pre.mass(mid, hi));
                    let h = HaarFunction::from_masses(iv, r.left, ml, mr);
                    if !h.is_zero {
                        let c = h.scale * (pre.moment(mid, hi) / mr - pre.moment(lo, mid) / ml);
                        terms.insert(iv.key(), HaarTerm { h, coefficient: c });
                    }
                    if mid > lo {
                        stack.push((l, lo, mid));
                    }
                    if hi > mid {
                        stack.push((r, mid, hi));
                    }
                }
            }
        }
        i = j;
    }
    Ok(HaarExpansion { grid: grid.clone(), terms, roots })
}

/// `Δ_Q g = Σ_{children Q', τ(Q') > 0} E_{Q'} g 1_{Q'} - E_Q g 1_Q`, stored as
/// the per-child constants `E_{Q'} g - E_Q g` (zero on uncharged children).
/// Children are ordered left-bottom, right-bottom, left-top, right-top.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MartingaleDifference {
    pub cube: DyadicCube,
    pub children: [DyadicCube; 4],
    pub child_values: [f64; 4],
    pub child_masses: [f64; 4],
    pub is_zero: bool,
}

impl MartingaleDifference {
    pub fn eval(&self, x: Point) -> f64 {
        self.children.iter().zip(&self.child_values).find(|(c, _)| c.contains(x)).map_or(0.0, |(_, v)| *v)
    }

    pub fn norm_sq(&self) -> f64 {
        self.child_values.iter().zip(&self.child_masses).map(|(v, m)| v * v * m).sum()
    }

    fn from_sums(cube: DyadicCube, children: [DyadicCube; 4], masses: [f64; 4], moments: [f64; 4]) -> Self {
        let total: f64 = masses.iter().sum();
        let charged = masses.iter().filter(|&&m| m > 0.0).count();
        let mut values = [0.0; 4];
        if charged >= 2 {
            let mean = moments.iter().sum::<f64>() / total;
            for c in 0..4 {
                if masses[c] > 0.0 {
                    values[c] = moments[c] / masses[c] - mean;
                }
            }
        }
        Self { cube, children, child_values: values, child_masses: masses, is_zero: charged < 2 }
    }
}

pub fn martingale_difference_cube(
    tau: &Measure2D,
    grid: &Grid,
    cube: &DyadicCube,
    g: &[f64],
) -> Result<MartingaleDifference> {
    check_len(tau.len(), g.len())?;
    let children = grid.cube_children(cube).ok_or_else(|| Error::ScaleOutOfWindow {
        k: cube.interval.k - 1,
        k_min: grid.params().k_min,
        k_max: grid.params().k_max,
    })?;
    let mut masses = [0.0; 4];
    let mut moments = [0.0; 4];
    for (a, &v) in tau.atoms().iter().zip(g) {
        if let Some(c) = children.iter().position(|c| c.contains(a.position)) {
            masses[c] += a.mass;
            moments[c] += a.mass * v;
        }
    }
    Ok(MartingaleDifference::from_sums(*cube, children, masses, moments))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CubeRoot {
    pub cube: DyadicCube,
    pub mean: f64,
    pub mass: f64,
}

/// `g = Σ_roots E_root g · 1_root + Σ_Q Δ_Q g` in `L²(τ)`.
#[derive(Debug, Clone)]
pub struct PlaneExpansion {
    pub grid: Grid,
    pub terms: BTreeMap<(i32, i64, u64), MartingaleDifference>,
    pub roots: Vec<CubeRoot>,
}

impl PlaneExpansion {
    pub fn difference_energy(&self) -> f64 {
        self.terms.values().map(|d| d.norm_sq()).sum()
    }

    pub fn mean_energy(&self) -> f64 {
        self.roots.iter().map(|r| r.mean * r.mean * r.mass).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.difference_energy() + self.mean_energy()
    }

    pub fn synthesize(&self, points: &[Point]) -> Result<Vec<f64>> {
        let p = *self.grid.params();
        points
            .iter()
            .map(|&x| {
                let mut v = 0.0;
                let root = self.grid.locate_cube(x, p.k_max)?;
                if let Some(rt) = self.roots.iter().find(|r| r.cube == root) {
                    v += rt.mean;
                }
                for k in (p.k_min + 1)..=p.k_max {
                    let q = self.grid.locate_cube(x, k)?;
                    if let Some(d) = self.terms.get(&q.key()) {
                        v += d.eval(x);
                    }
                }
                Ok(v)
            })
            .collect()
    }

    pub fn filtered(&self, keep: impl Fn(&MartingaleDifference) -> bool, roots: bool) -> Self {
        Self {
            grid: self.grid.clone(),
            terms: self.terms.iter().filter(|(_, d)| keep(d)).map(|(k, d)| (*k, *d)).collect(),
            roots: if roots { self.roots.clone() } else { Vec::new() },
        }
    }

    /// Projection onto the differences of Carleson cubes `Q_I = I × [0, |I|)`.
    pub fn carleson_part(&self) -> Self {
        self.filtered(|d| d.cube.is_carleson(), false)
    }
}

/// Martingale-difference expansion of `g` (values on the atoms of `τ`).
pub fn analyze_plane(tau: &Measure2D, g: &[f64], grid: &Grid) -> Result<PlaneExpansion> {
    check_len(tau.len(), g.len())?;
    if let Some(v) = grid.first_violation(&Measure1D::line(&[])?, tau) {
        return Err(Error::Inadmissible(v));
    }
    let p = *grid.params();
    let mut groups: BTreeMap<(i64, u64), (DyadicCube, Vec<usize>)> = BTreeMap::new();
    for (i, a) in tau.atoms().iter().enumerate() {
        let q = grid.locate_cube(a.position, p.k_max)?;
        groups.entry((q.interval.n, q.m)).or_insert_with(|| (q, Vec::new())).1.push(i);
    }
    let atoms = tau.atoms();
    let mut terms = BTreeMap::new();
    let mut roots = Vec::new();
    for (_, (root, idx)) in groups {
        let mass: f64 = idx.iter().map(|&i| atoms[i].mass).sum();
        let moment: f64 = idx.iter().map(|&i| atoms[i].mass * g[i]).sum();
        roots.push(CubeRoot { cube: root, mean: moment / mass, mass });
        let mut stack = vec![(root, idx)];
        while let Some((q, idx)) = stack.pop() {
            let Some(children) = grid.cube_children(&q) else {
                if idx.len() > 1 {
                    let a = atoms[idx[0]].position;
                    let b = atoms[idx[1]].position;
                    return Err(Error::Unresolved(a[0] + a[1], b[0] + b[1]));
                }
                continue;
            };
            let mut parts: [Vec<usize>; 4] = Default::default();
            for i in idx {
                let c = children.iter().position(|c| c.contains(atoms[i].position)).unwrap_or_else(|| {
                    // rounding at a child edge: fall back to the nearest by y then x
                    let x = atoms[i].position;
                    let right = usize::from(x[0] >= children[1].interval.left);
                    let top = usize::from(x[1] >= children[2].bottom());
                    right + 2 * top
                });
                parts[c].push(i);
            }
            let mut masses = [0.0; 4];
            let mut moments = [0.0; 4];
            for c in 0..4 {
                for &i in &parts[c] {
                    masses[c] += atoms[i].mass;
                    moments[c] += atoms[i].mass * g[i];
                }
            }
            let d = MartingaleDifference::from_sums(q, children, masses, moments);
            if !d.is_zero {
                terms.insert(q.key(), d);
            }
            for (c, part) in parts.into_iter().enumerate() {
                if !part.is_empty() {
                    stack.push((children[c], part));
                }
            }
        }
    }
    Ok(PlaneExpansion { grid: grid.clone(), terms, roots })
}

/// Good/bad split of a line expansion; root means go with the good part.
pub fn split_good_bad(exp: &HaarExpansion) -> (HaarExpansion, HaarExpansion) {
    let g = &exp.grid;
    (exp.filtered(|t| g.is_good(&t.h.interval), true), exp.filtered(|t| !g.is_good(&t.h.interval), false))
}

/// Good/bad split of a plane expansion; root means go with the good part.
pub fn split_good_bad_plane(exp: &PlaneExpansion) -> (PlaneExpansion, PlaneExpansion) {
    let g = &exp.grid;
    (exp.filtered(|d| g.is_good_cube(&d.cube), true), exp.filtered(|d| !g.is_good_cube(&d.cube), false))
}
