//! Finitely atomic measures on the line, the circle, the closed upper
//! half-plane and the closed disk, plus the regions they are evaluated on.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::{Error, Point, Result};

/// Atoms closer than this (in every coordinate) are merged.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineDomain {
    Line,
    /// Positions are angles in `[0, 2π)`.
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlaneDomain {
    HalfPlane,
    /// Positions are `(re, im)` with modulus at most one.
    Disk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom1D {
    pub position: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom2D {
    pub position: Point,
    pub mass: f64,
}

/// Half-open interval `[left, right)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub left: f64,
    pub right: f64,
}

impl Interval {
    pub fn new(left: f64, right: f64) -> Self {
        Self { left, right }
    }

    pub fn len(&self) -> f64 {
        self.right - self.left
    }

    pub fn is_empty(&self) -> bool {
        self.right <= self.left
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.left + self.right)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.left <= t && t < self.right
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.left <= other.left && other.right <= self.right
    }

    /// Distance from `t` to the closed interval.
    pub fn dist(&self, t: f64) -> f64 {
        (self.left - t).max(t - self.right).max(0.0)
    }

    /// Same center, `factor` times the length.
    pub fn dilate(&self, factor: f64) -> Interval {
        let c = self.center();
        let h = 0.5 * factor * self.len();
        Interval::new(c - h, c + h)
    }

    /// Center of the Carleson cube `Q_I`, i.e. `(center, |I|/2)`.
    pub fn cube_center(&self) -> Point {
        [self.center(), 0.5 * self.len()]
    }

    pub fn in_carleson_cube(&self, x: Point) -> bool {
        self.contains(x[0]) && 0.0 <= x[1] && x[1] < self.len()
    }

    /// Euclidean distance from `x` to the closed Carleson cube.
    pub fn dist_to_cube(&self, x: Point) -> f64 {
        let dx = self.dist(x[0]);
        let dy = (x[1] - self.len()).max(-x[1]).max(0.0);
        dx.hypot(dy)
    }

    pub fn region(&self) -> Region {
        Region::Interval { left: self.left, right: self.right }
    }

    pub fn carleson_cube(&self) -> Region {
        Region::Rect { x: (self.left, self.right), y: (0.0, self.len()) }
    }
}

/// Sets that masses can be evaluated on. One-dimensional variants apply to
/// line and circle measures, two-dimensional ones to half-plane and disk
/// measures; `Everything` and the set operations apply to both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    Everything,
    /// `[left, right)` on the line.
    Interval { left: f64, right: f64 },
    /// Arc of the circle starting at angle `start`, counterclockwise, of
    /// angular length `length`; half-open.
    Arc { start: f64, length: f64 },
    /// `[x.0, x.1) × [y.0, y.1)` in the half-plane.
    Rect { x: (f64, f64), y: (f64, f64) },
    /// `⋃_{t ∈ [left, right)} {x : |x1 - t| < x2}`.
    VRegion { left: f64, right: f64 },
    /// Disk box `{ρ e^{iθ} : 1 - ρ ≤ length, θ in the arc}`.
    CarlesonBox { start: f64, length: f64 },
    Complement(Box<Region>),
    Intersection(Vec<Region>),
    Union(Vec<Region>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Any,
    Line,
    Circle,
    HalfPlane,
    Disk,
}

impl Kind {
    fn meet(self, other: Kind) -> Option<Kind> {
        match (self, other) {
            (Kind::Any, k) | (k, Kind::Any) => Some(k),
            (a, b) if a == b => Some(a),
            _ => None,
        }
    }
}

/// Angle reduced to `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

pub fn arc_contains(start: f64, length: f64, angle: f64) -> bool {
    if length >= TAU {
        return true;
    }
    let d = normalize_angle(angle - start);
    d < length
}

impl Region {
    pub fn interval(left: f64, right: f64) -> Self {
        Region::Interval { left, right }
    }

    pub fn carleson_cube(left: f64, right: f64) -> Self {
        Interval::new(left, right).carleson_cube()
    }

    pub fn complement(self) -> Self {
        Region::Complement(Box::new(self))
    }

    fn kind(&self) -> Option<Kind> {
        match self {
            Region::Everything => Some(Kind::Any),
            Region::Interval { .. } => Some(Kind::Line),
            Region::Arc { .. } => Some(Kind::Circle),
            Region::Rect { .. } | Region::VRegion { .. } => Some(Kind::HalfPlane),
            Region::CarlesonBox { .. } => Some(Kind::Disk),
            Region::Complement(r) => r.kind(),
            Region::Intersection(v) | Region::Union(v) => {
                v.iter().try_fold(Kind::Any, |acc, r| acc.meet(r.kind()?))
            }
        }
    }

    fn check(&self, want: Kind) -> Result<()> {
        match self.kind().and_then(|k| k.meet(want)) {
            Some(_) => Ok(()),
            None => Err(Error::DomainMismatch(format!(
                "region {self:?} cannot be evaluated on a {want:?} measure"
            ))),
        }
    }

    fn contains_1d(&self, t: f64) -> bool {
        match self {
            Region::Everything => true,
            Region::Interval { left, right } => *left <= t && t < *right,
            Region::Arc { start, length } => arc_contains(*start, *length, t),
            Region::Complement(r) => !r.contains_1d(t),
            Region::Intersection(v) => v.iter().all(|r| r.contains_1d(t)),
            Region::Union(v) => v.iter().any(|r| r.contains_1d(t)),
            _ => false,
        }
    }

    fn contains_2d(&self, x: Point) -> bool {
        match self {
            Region::Everything => true,
            Region::Rect { x: (a, b), y: (c, d) } => *a <= x[0] && x[0] < *b && *c <= x[1] && x[1] < *d,
            Region::VRegion { left, right } => {
                Interval::new(*left, *right).dist(x[0]) < x[1]
            }
            Region::CarlesonBox { start, length } => {
                let rho = x[0].hypot(x[1]);
                let theta = if rho == 0.0 { 0.0 } else { x[1].atan2(x[0]) };
                (1.0 - rho).abs() <= *length && arc_contains(*start, *length, theta)
            }
            Region::Complement(r) => !r.contains_2d(x),
            Region::Intersection(v) => v.iter().all(|r| r.contains_2d(x)),
            Region::Union(v) => v.iter().any(|r| r.contains_2d(x)),
            _ => false,
        }
    }
}

/// Finitely atomic measure on the line or the circle. Atoms are kept sorted
/// by position, duplicates merged, zero masses dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure1D {
    domain: LineDomain,
    atoms: Vec<Atom1D>,
}

fn check_mass(mass: f64) -> Result<()> {
    if !mass.is_finite() || mass < 0.0 {
        return Err(Error::InvalidAtom(format!("mass {mass} must be finite and nonnegative")));
    }
    Ok(())
}

impl Measure1D {
    pub fn new(domain: LineDomain, atoms: impl IntoIterator<Item = Atom1D>) -> Result<Self> {
        let mut v = Vec::new();
        for mut a in atoms {
            check_mass(a.mass)?;
            if !a.position.is_finite() {
                return Err(Error::InvalidAtom(format!("position {} is not finite", a.position)));
            }
            if domain == LineDomain::Circle {
                a.position = normalize_angle(a.position);
            }
            if a.mass > 0.0 {
                v.push(a);
            }
        }
        v.sort_by(|a, b| a.position.total_cmp(&b.position));
        let mut merged: Vec<Atom1D> = Vec::with_capacity(v.len());
        for a in v {
            match merged.last_mut() {
                Some(last) if (a.position - last.position).abs() <= MERGE_TOL => last.mass += a.mass,
                _ => merged.push(a),
            }
        }
        if domain == LineDomain::Circle && merged.len() > 1 {
            let first = merged[0];
            let last = *merged.last().unwrap();
            if (first.position + TAU - last.position).abs() <= MERGE_TOL {
                merged[0].mass += last.mass;
                merged.pop();
            }
        }
        Ok(Self { domain, atoms: merged })
    }

    /// Convenience constructor from `(position, mass)` pairs.
    pub fn from_pairs(domain: LineDomain, pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(domain, pairs.iter().map(|&(position, mass)| Atom1D { position, mass }))
    }

    pub fn line(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::from_pairs(LineDomain::Line, pairs)
    }

    pub fn domain(&self) -> LineDomain {
        self.domain
    }

    pub fn atoms(&self) -> &[Atom1D] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.position).collect()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.mass).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Source points in the plane: `(t, 0)` on the line, `e^{iθ}` on the
    /// circle.
    pub fn plane_points(&self) -> Vec<Point> {
        self.atoms
            .iter()
            .map(|a| match self.domain {
                LineDomain::Line => [a.position, 0.0],
                LineDomain::Circle => [a.position.cos(), a.position.sin()],
            })
            .collect()
    }

    fn kind(&self) -> Kind {
        match self.domain {
            LineDomain::Line => Kind::Line,
            LineDomain::Circle => Kind::Circle,
        }
    }

    pub fn mass_on(&self, region: &Region) -> Result<f64> {
        region.check(self.kind())?;
        Ok(self.atoms.iter().filter(|a| region.contains_1d(a.position)).map(|a| a.mass).sum())
    }

    pub fn membership(&self, region: &Region) -> Result<Vec<bool>> {
        region.check(self.kind())?;
        Ok(self.atoms.iter().map(|a| region.contains_1d(a.position)).collect())
    }

    pub fn restrict(&self, region: &Region) -> Result<Self> {
        region.check(self.kind())?;
        Ok(Self {
            domain: self.domain,
            atoms: self.atoms.iter().copied().filter(|a| region.contains_1d(a.position)).collect(),
        })
    }

    /// Mass of `[left, right)` on a line measure, by binary search.
    pub fn mass_in(&self, iv: &Interval) -> f64 {
        let (lo, hi) = self.index_range(iv);
        self.atoms[lo..hi].iter().map(|a| a.mass).sum()
    }

    /// Index range of the atoms lying in `[left, right)`.
    pub fn index_range(&self, iv: &Interval) -> (usize, usize) {
        let lo = self.atoms.partition_point(|a| a.position < iv.left);
        let hi = self.atoms.partition_point(|a| a.position < iv.right);
        (lo, hi.max(lo))
    }

    pub fn reweight(&self, density: impl Fn(&Atom1D) -> f64) -> Result<Self> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let w = density(a);
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDensity(format!("density {w} at {}", a.position)));
            }
            atoms.push(Atom1D { position: a.position, mass: a.mass * w });
        }
        Self::new(self.domain, atoms)
    }

    /// Splits every atom into two half-mass atoms `gap` apart.
    pub fn split_atoms(&self, gap: f64) -> Result<Self> {
        Self::new(
            self.domain,
            self.atoms.iter().flat_map(|a| {
                let m = 0.5 * a.mass;
                [
                    Atom1D { position: a.position - 0.5 * gap, mass: m },
                    Atom1D { position: a.position + 0.5 * gap, mass: m },
                ]
            }),
        )
    }

    pub fn integrate(&self, f: &[f64]) -> Result<f64> {
        check_len(self.len(), f.len())?;
        Ok(self.atoms.iter().zip(f).map(|(a, v)| a.mass * v).sum())
    }

    pub fn l2_norm(&self, f: &[f64]) -> Result<f64> {
        check_len(self.len(), f.len())?;
        Ok(self.atoms.iter().zip(f).map(|(a, v)| a.mass * v * v).sum::<f64>().sqrt())
    }
}

/// Finitely atomic measure on the closed upper half-plane or closed disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure2D {
    domain: PlaneDomain,
    atoms: Vec<Atom2D>,
}

impl Measure2D {
    pub fn new(domain: PlaneDomain, atoms: impl IntoIterator<Item = Atom2D>) -> Result<Self> {
        let mut v = Vec::new();
        for a in atoms {
            check_mass(a.mass)?;
            let [x, y] = a.position;
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::InvalidAtom(format!("position {:?} is not finite", a.position)));
            }
            match domain {
                PlaneDomain::HalfPlane if y < 0.0 => {
                    return Err(Error::InvalidAtom(format!("{:?} lies below the real axis", a.position)))
                }
                PlaneDomain::Disk if x.hypot(y) > 1.0 + MERGE_TOL => {
                    return Err(Error::InvalidAtom(format!("{:?} lies outside the closed disk", a.position)))
                }
                _ => {}
            }
            if a.mass > 0.0 {
                v.push(a);
            }
        }
        v.sort_by(|a, b| {
            a.position[0].total_cmp(&b.position[0]).then(a.position[1].total_cmp(&b.position[1]))
        });
        let mut merged: Vec<Atom2D> = Vec::with_capacity(v.len());
        'outer: for a in v {
            for m in merged.iter_mut().rev() {
                if a.position[0] - m.position[0] > MERGE_TOL {
                    break;
                }
                if (a.position[1] - m.position[1]).abs() <= MERGE_TOL {
                    m.mass += a.mass;
                    continue 'outer;
                }
            }
            merged.push(a);
        }
        Ok(Self { domain, atoms: merged })
    }

    pub fn from_triples(domain: PlaneDomain, triples: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(domain, triples.iter().map(|&(x, y, mass)| Atom2D { position: [x, y], mass }))
    }

    pub fn half_plane(triples: &[(f64, f64, f64)]) -> Result<Self> {
        Self::from_triples(PlaneDomain::HalfPlane, triples)
    }

    pub fn domain(&self) -> PlaneDomain {
        self.domain
    }

    pub fn atoms(&self) -> &[Atom2D] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn points(&self) -> Vec<Point> {
        self.atoms.iter().map(|a| a.position).collect()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.mass).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    fn kind(&self) -> Kind {
        match self.domain {
            PlaneDomain::HalfPlane => Kind::HalfPlane,
            PlaneDomain::Disk => Kind::Disk,
        }
    }

    pub fn mass_on(&self, region: &Region) -> Result<f64> {
        region.check(self.kind())?;
        Ok(self.atoms.iter().filter(|a| region.contains_2d(a.position)).map(|a| a.mass).sum())
    }

    pub fn membership(&self, region: &Region) -> Result<Vec<bool>> {
        region.check(self.kind())?;
        Ok(self.atoms.iter().map(|a| region.contains_2d(a.position)).collect())
    }

    pub fn restrict(&self, region: &Region) -> Result<Self> {
        region.check(self.kind())?;
        Ok(Self {
            domain: self.domain,
            atoms: self.atoms.iter().copied().filter(|a| region.contains_2d(a.position)).collect(),
        })
    }

    /// Mass of the Carleson cube over `iv`.
    pub fn cube_mass(&self, iv: &Interval) -> f64 {
        let (lo, hi) = self.column_range(iv);
        self.atoms[lo..hi].iter().filter(|a| a.position[1] < iv.len()).map(|a| a.mass).sum()
    }

    /// Index range of atoms whose first coordinate lies in `[left, right)`.
    pub fn column_range(&self, iv: &Interval) -> (usize, usize) {
        let lo = self.atoms.partition_point(|a| a.position[0] < iv.left);
        let hi = self.atoms.partition_point(|a| a.position[0] < iv.right);
        (lo, hi.max(lo))
    }

    pub fn reweight(&self, density: impl Fn(&Atom2D) -> f64) -> Result<Self> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let w = density(a);
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDensity(format!("density {w} at {:?}", a.position)));
            }
            atoms.push(Atom2D { position: a.position, mass: a.mass * w });
        }
        Self::new(self.domain, atoms)
    }

    /// Image measure under `map`, landing in the closed disk.
    pub fn push_forward(&self, map: impl Fn(Point) -> Point) -> Result<Self> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let p = map(a.position);
            if !(p[0].hypot(p[1]) <= 1.0 + 1e-12) {
                return Err(Error::MapOutOfDomain(p));
            }
            let rho = p[0].hypot(p[1]);
            let p = if rho > 1.0 { [p[0] / rho, p[1] / rho] } else { p };
            atoms.push(Atom2D { position: p, mass: a.mass });
        }
        Self::new(PlaneDomain::Disk, atoms)
    }

    /// Splits every atom horizontally into two half-mass atoms `gap` apart.
    pub fn split_atoms(&self, gap: f64) -> Result<Self> {
        Self::new(
            self.domain,
            self.atoms.iter().flat_map(|a| {
                let m = 0.5 * a.mass;
                let [x, y] = a.position;
                [
                    Atom2D { position: [x - 0.5 * gap, y], mass: m },
                    Atom2D { position: [x + 0.5 * gap, y], mass: m },
                ]
            }),
        )
    }

    pub fn integrate(&self, g: &[f64]) -> Result<f64> {
        check_len(self.len(), g.len())?;
        Ok(self.atoms.iter().zip(g).map(|(a, v)| a.mass * v).sum())
    }

    pub fn l2_norm(&self, g: &[f64]) -> Result<f64> {
        check_len(self.len(), g.len())?;
        Ok(self.atoms.iter().zip(g).map(|(a, v)| a.mass * v * v).sum::<f64>().sqrt())
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}
