//! Randomized dyadic grids on a finite window of scales, goodness, Whitney
//! decompositions and admissibility.
//!
//! A grid is indexed by scales `k` in `[k_min, k_max]`; the interval `(k, n)`
//! is `λ·[2^k n + s(k), 2^k (n+1) + s(k))` with `s(k) = Σ_{k_min ≤ j < k} 2^j ξ_j`.
//! Since `s(k) = s(k-1) + 2^{k-1} ξ_{k-1}`, the children of `(k, n)` are
//! `(k-1, 2n + ξ_{k-1})` and `(k-1, 2n + ξ_{k-1} + 1)`.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::measure::{Interval, Measure1D, Measure2D, Region};
use crate::{Error, Point, Result};

/// Atoms this close to a grid line make the grid inadmissible.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub epsilon: f64,
    pub r: u32,
    pub k_min: i32,
    pub k_max: i32,
}

impl GridParams {
    pub fn new(epsilon: f64, r: u32, k_min: i32, k_max: i32) -> Result<Self> {
        let p = Self { epsilon, r, k_min, k_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParams(format!("epsilon {} not in (0,1)", self.epsilon)));
        }
        if self.r < 1 {
            return Err(Error::InvalidParams("r must be at least 1".into()));
        }
        if self.k_min > self.k_max {
            return Err(Error::InvalidParams(format!("k_min {} > k_max {}", self.k_min, self.k_max)));
        }
        if self.k_max - self.k_min > 60 {
            return Err(Error::InvalidParams("window wider than 60 scales".into()));
        }
        Ok(())
    }

    /// Bound on the bad-interval probability, `C ε^{-1} 2^{-εr}`.
    pub fn pbad_bound(&self, constant: f64) -> f64 {
        constant / self.epsilon * (-(self.epsilon * self.r as f64)).exp2()
    }
}

/// Interval of a specific grid. Equality, hashing and ordering use `(k, n)`
/// only, so intervals from different grids should not be mixed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub k: i32,
    pub n: i64,
    pub left: f64,
    pub right: f64,
}

impl DyadicInterval {
    pub fn span(&self) -> Interval {
        Interval::new(self.left, self.right)
    }

    pub fn len(&self) -> f64 {
        self.right - self.left
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.left + self.right)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.left <= t && t < self.right
    }

    pub fn key(&self) -> (i32, i64) {
        (self.k, self.n)
    }

    /// Whether `self ⊂ other` (as dyadic intervals of the same grid).
    pub fn is_inside(&self, other: &DyadicInterval) -> bool {
        self.k <= other.k && self.left >= other.left - 1e-15 && self.right <= other.right + 1e-15
    }

    /// `self ⋐_s other`: inside and at least `s` scales smaller.
    pub fn strongly_inside(&self, other: &DyadicInterval, s: u32) -> bool {
        self.k + s as i32 <= other.k && self.is_inside(other)
    }

    pub fn cube_center(&self) -> Point {
        self.span().cube_center()
    }

    pub fn carleson_cube(&self) -> Region {
        self.span().carleson_cube()
    }
}

impl PartialEq for DyadicInterval {
    fn eq(&self, o: &Self) -> bool {
        self.key() == o.key()
    }
}
impl Eq for DyadicInterval {}
impl Hash for DyadicInterval {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.key().hash(h)
    }
}
impl PartialOrd for DyadicInterval {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for DyadicInterval {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key().cmp(&o.key())
    }
}

/// Cube `I × |I|·[m, m+1)` of the half-plane grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub interval: DyadicInterval,
    pub m: u64,
}

impl DyadicCube {
    pub fn side(&self) -> f64 {
        self.interval.len()
    }

    pub fn bottom(&self) -> f64 {
        self.m as f64 * self.side()
    }

    pub fn top(&self) -> f64 {
        (self.m + 1) as f64 * self.side()
    }

    pub fn contains(&self, x: Point) -> bool {
        self.interval.contains(x[0]) && self.bottom() <= x[1] && x[1] < self.top()
    }

    pub fn is_carleson(&self) -> bool {
        self.m == 0
    }

    pub fn key(&self) -> (i32, i64, u64) {
        (self.interval.k, self.interval.n, self.m)
    }

    pub fn region(&self) -> Region {
        Region::Rect { x: (self.interval.left, self.interval.right), y: (self.bottom(), self.top()) }
    }
}

/// Output of [`Grid::whitney`].
#[derive(Debug, Clone, Serialize)]
pub struct Whitney {
    pub members: Vec<DyadicInterval>,
    /// Finest-scale intervals of the window left uncovered.
    pub remainder: Vec<DyadicInterval>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    params: GridParams,
    /// `xi[k - k_min]` is the digit at scale `k`.
    xi: Vec<u8>,
    lambda: f64,
    shifts: Vec<f64>,
}

impl Grid {
    /// `ξ ≡ 0`, `λ = 1`.
    pub fn standard(params: GridParams) -> Result<Self> {
        params.validate()?;
        let len = (params.k_max - params.k_min + 1) as usize;
        Self::with_shift(params, vec![0; len], 1.0)
    }

    pub fn with_shift(params: GridParams, xi: Vec<u8>, lambda: f64) -> Result<Self> {
        params.validate()?;
        let len = (params.k_max - params.k_min + 1) as usize;
        if xi.len() != len {
            return Err(Error::InvalidParams(format!("expected {len} digits, got {}", xi.len())));
        }
        if xi.iter().any(|&d| d > 1) {
            return Err(Error::InvalidParams("digits must be 0 or 1".into()));
        }
        if !(1.0..=2.0).contains(&lambda) {
            return Err(Error::InvalidParams(format!("dilation {lambda} not in [1,2]")));
        }
        let mut shifts = vec![0.0; len];
        for i in 1..len {
            let j = params.k_min + i as i32 - 1;
            shifts[i] = shifts[i - 1] + (j as f64).exp2() * xi[i - 1] as f64;
        }
        Ok(Self { params, xi, lambda, shifts })
    }

    /// Uniform digits and dilation `λ = 2^U` with `U` uniform on `[0,1)`,
    /// which has density `(1/ln 2) dλ/λ` on `[1, 2]`.
    pub fn sample<R: Rng + ?Sized>(params: GridParams, rng: &mut R) -> Result<Self> {
        params.validate()?;
        let len = (params.k_max - params.k_min + 1) as usize;
        let xi = (0..len).map(|_| rng.gen_range(0..=1u8)).collect();
        let lambda = rng.gen::<f64>().exp2();
        Self::with_shift(params, xi, lambda)
    }

    pub fn from_seed(params: GridParams, seed: u64) -> Result<Self> {
        Self::sample(params, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn params(&self) -> &GridParams {
        &self.params
    }

    pub fn xi(&self) -> &[u8] {
        &self.xi
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn digit(&self, k: i32) -> i64 {
        self.xi[(k - self.params.k_min) as usize] as i64
    }

    fn shift(&self, k: i32) -> f64 {
        self.shifts[(k - self.params.k_min) as usize]
    }

    fn check_scale(&self, k: i32) -> Result<()> {
        if k < self.params.k_min || k > self.params.k_max {
            return Err(Error::ScaleOutOfWindow { k, k_min: self.params.k_min, k_max: self.params.k_max });
        }
        Ok(())
    }

    fn make(&self, k: i32, n: i64) -> DyadicInterval {
        let h = (k as f64).exp2();
        let left = self.lambda * (h * n as f64 + self.shift(k));
        let right = self.lambda * (h * (n + 1) as f64 + self.shift(k));
        DyadicInterval { k, n, left, right }
    }

    pub fn interval(&self, k: i32, n: i64) -> Result<DyadicInterval> {
        self.check_scale(k)?;
        Ok(self.make(k, n))
    }

    /// The interval of scale `k` containing `x`.
    pub fn locate(&self, x: f64, k: i32) -> Result<DyadicInterval> {
        self.check_scale(k)?;
        let h = (k as f64).exp2();
        let mut n = ((x / self.lambda - self.shift(k)) / h).floor() as i64;
        // guard against rounding at the boundary
        let mut iv = self.make(k, n);
        if x < iv.left {
            n -= 1;
            iv = self.make(k, n);
        } else if x >= iv.right {
            n += 1;
            iv = self.make(k, n);
        }
        Ok(iv)
    }

    /// Left and right children; `None` at the finest scale.
    pub fn children(&self, iv: &DyadicInterval) -> Option<[DyadicInterval; 2]> {
        if iv.k <= self.params.k_min {
            return None;
        }
        let k = iv.k - 1;
        let base = 2 * iv.n + self.digit(k);
        Some([self.make(k, base), self.make(k, base + 1)])
    }

    pub fn parent(&self, iv: &DyadicInterval) -> Option<DyadicInterval> {
        if iv.k >= self.params.k_max {
            return None;
        }
        let n = (iv.n - self.digit(iv.k)).div_euclid(2);
        Some(self.make(iv.k + 1, n))
    }

    /// All descendants of `iv` exactly `depth` scales down (clamped to the window).
    pub fn descendants_at(&self, iv: &DyadicInterval, k: i32) -> Vec<DyadicInterval> {
        let mut level = vec![*iv];
        let stop = k.max(self.params.k_min);
        while level.first().map_or(false, |i| i.k > stop) {
            level = level.iter().filter_map(|i| self.children(i)).flatten().collect();
        }
        level
    }

    pub fn cube(&self, iv: DyadicInterval, m: u64) -> DyadicCube {
        DyadicCube { interval: iv, m }
    }

    /// Cube of scale `k` containing `x`.
    pub fn locate_cube(&self, x: Point, k: i32) -> Result<DyadicCube> {
        let iv = self.locate(x[0], k)?;
        let m = (x[1] / iv.len()).floor().max(0.0) as u64;
        Ok(DyadicCube { interval: iv, m })
    }

    /// Children ordered left-bottom, right-bottom, left-top, right-top.
    pub fn cube_children(&self, q: &DyadicCube) -> Option<[DyadicCube; 4]> {
        let [l, r] = self.children(&q.interval)?;
        let (b, t) = (2 * q.m, 2 * q.m + 1);
        Some([
            DyadicCube { interval: l, m: b },
            DyadicCube { interval: r, m: b },
            DyadicCube { interval: l, m: t },
            DyadicCube { interval: r, m: t },
        ])
    }

    /// Distance from `iv` to the nearest endpoint of the grid at scale `kj`.
    fn dist_to_lines(&self, iv: &Interval, kj: i32) -> f64 {
        let h = (kj as f64).exp2();
        let m0 = ((iv.left / self.lambda - self.shift(kj)) / h).floor();
        let e0 = self.lambda * (h * m0 + self.shift(kj));
        let e1 = self.lambda * (h * (m0 + 1.0) + self.shift(kj));
        let before = (iv.left - e0).max(0.0);
        let after = if e1 < iv.right { 0.0 } else { e1 - iv.right };
        before.min(after)
    }

    /// An interval is bad if some grid interval `J` with `|J| > 2^r |I|` and
    /// scale at most `k_max` has `dist(I, ∂J) < |I|^ε |J|^{1-ε}`.
    pub fn is_good(&self, iv: &DyadicInterval) -> bool {
        let eps = self.params.epsilon;
        let li = iv.len();
        let span = iv.span();
        let first = iv.k + self.params.r as i32 + 1;
        (first..=self.params.k_max).all(|kj| {
            let lj = self.lambda * (kj as f64).exp2();
            self.dist_to_lines(&span, kj) >= li.powf(eps) * lj.powf(1.0 - eps)
        })
    }

    /// Cube goodness: only the horizontal randomization is used, so a cube is
    /// good exactly when its base interval is good.
    pub fn is_good_cube(&self, q: &DyadicCube) -> bool {
        self.is_good(&q.interval)
    }

    /// Maximal `K ⋐_r I` with `dist(K, ∂I) ≥ |K|^ε |I|^{1-ε}`, down to `k_min`.
    pub fn whitney(&self, iv: &DyadicInterval) -> Whitney {
        let eps = self.params.epsilon;
        let li = iv.len();
        let mut members = Vec::new();
        let mut remainder = Vec::new();
        let top = iv.k - self.params.r as i32;
        if top < self.params.k_min {
            return Whitney { members, remainder: vec![*iv] };
        }
        let mut stack = self.descendants_at(iv, top);
        stack.reverse();
        while let Some(k) = stack.pop() {
            let d = (k.left - iv.left).min(iv.right - k.right);
            if d >= k.len().powf(eps) * li.powf(1.0 - eps) {
                members.push(k);
            } else if let Some([a, b]) = self.children(&k) {
                stack.push(b);
                stack.push(a);
            } else {
                remainder.push(k);
            }
        }
        Whitney { members, remainder }
    }

    /// Whether every grid line of the window avoids the atoms: no `σ` atom
    /// within tolerance of an endpoint, no `τ` atom on a vertical line
    /// `x1 = endpoint` or a horizontal line `x2 = m·2^k λ` with `m ≥ 1`.
    pub fn is_admissible(&self, sigma: &Measure1D, tau: &Measure2D) -> bool {
        self.first_violation(sigma, tau).is_none()
    }

    pub fn first_violation(&self, sigma: &Measure1D, tau: &Measure2D) -> Option<String> {
        for a in sigma.atoms() {
            if self.near_endpoint(a.position) {
                return Some(format!("σ atom at {} sits on a grid endpoint", a.position));
            }
        }
        for a in tau.atoms() {
            let [x, y] = a.position;
            if self.near_endpoint(x) {
                return Some(format!("τ atom at {:?} sits on a vertical grid line", a.position));
            }
            for k in self.params.k_min..=self.params.k_max {
                let h = self.lambda * (k as f64).exp2();
                let m = (y / h).round();
                if m >= 1.0 && (y - m * h).abs() <= BOUNDARY_TOL {
                    return Some(format!("τ atom at {:?} sits on a horizontal grid line", a.position));
                }
            }
        }
        None
    }

    fn near_endpoint(&self, x: f64) -> bool {
        (self.params.k_min..=self.params.k_max).any(|k| {
            let h = (k as f64).exp2();
            let m = ((x / self.lambda - self.shift(k)) / h).round();
            let e = self.lambda * (h * m + self.shift(k));
            (x - e).abs() <= BOUNDARY_TOL
        })
    }

    /// Distinct intervals of scale `k` containing at least one of `points`.
    pub fn intervals_meeting(&self, points: &[f64], k: i32) -> Result<Vec<DyadicInterval>> {
        let mut v: Vec<DyadicInterval> = points.iter().map(|&x| self.locate(x, k)).collect::<Result<_>>()?;
        v.sort();
        v.dedup();
        Ok(v)
    }
}

/// Fraction of `trials` random grids in which the interval `(k, 0)` is bad.
pub fn estimate_pbad(params: GridParams, k: i32, trials: usize, seed: u64) -> Result<f64> {
    params.validate()?;
    if k < params.k_min || k > params.k_max {
        return Err(Error::ScaleOutOfWindow { k, k_min: params.k_min, k_max: params.k_max });
    }
    let bad: usize = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let grid = Grid::sample(params, &mut rng).expect("validated params");
            let iv = grid.make(k, 0);
            usize::from(!grid.is_good(&iv))
        })
        .sum();
    Ok(bad as f64 / trials.max(1) as f64)
}

/// Largest number of the dilates `2^r K` covering any sample point.
pub fn whitney_overlap(members: &[DyadicInterval], r: u32, samples: &[f64]) -> usize {
    let factor = (r as f64).exp2();
    let dilated: Vec<Interval> = members.iter().map(|k| k.span().dilate(factor)).collect();
    samples.iter().map(|&t| dilated.iter().filter(|d| d.contains(t)).count()).max().unwrap_or(0)
}
