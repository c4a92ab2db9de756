//! Stopping trees, quasi-orthogonality, the size functional with its
//! stopping collections, the stopping measure `μ`, and the triangular forms.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::constants::{energy_line_sq, energy_plane, poisson_average, t_tau};
use crate::dyadic::{DyadicInterval, Grid};
use crate::haar::{analyze, analyze_plane, haar_function};
use crate::measure::{check_len, Measure1D, Measure2D};
use crate::{Error, Point, Result};

/// Large-average stopping threshold.
pub const AVERAGE_FACTOR: f64 = 10.0;
pub const DEFAULT_C0: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// Stopping on `g ∈ L²(τ)`: averages over Carleson cubes.
    G,
    /// Stopping on `f ∈ L²(σ)`: averages over intervals.
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopCause {
    Root,
    LargeAverage,
    Energy,
}

#[derive(Debug, Clone, Serialize)]
pub struct StopNode {
    pub interval: DyadicInterval,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub cause: StopCause,
    /// `E|g|` over `Q_F` (side G) or `E|f|` over `F` (side F).
    pub average: f64,
    /// The energy sum that was compared with `C0 ℛ²` times the mass.
    pub energy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StoppingTree {
    pub side: Side,
    pub c0: f64,
    pub nodes: Vec<StopNode>,
}

#[derive(Debug, Clone, Copy)]
pub struct StoppingInput<'a> {
    pub sigma: &'a Measure1D,
    pub tau: &'a Measure2D,
    pub grid: &'a Grid,
    /// Values on the atoms of `tau` (side G) or `sigma` (side F).
    pub values: &'a [f64],
    pub root: DyadicInterval,
    pub c0: f64,
    pub r_char: f64,
}

fn side_mass(side: Side, sigma: &Measure1D, tau: &Measure2D, iv: &DyadicInterval) -> f64 {
    match side {
        Side::G => tau.cube_mass(&iv.span()),
        Side::F => sigma.mass_in(&iv.span()),
    }
}

fn abs_average(side: Side, sigma: &Measure1D, tau: &Measure2D, values: &[f64], iv: &DyadicInterval) -> f64 {
    let s = iv.span();
    let (num, den) = match side {
        Side::G => {
            let (lo, hi) = tau.column_range(&s);
            tau.atoms()[lo..hi]
                .iter()
                .zip(&values[lo..hi])
                .filter(|(a, _)| a.position[1] < s.len())
                .fold((0.0, 0.0), |(n, d), (a, v)| (n + a.mass * v.abs(), d + a.mass))
        }
        Side::F => {
            let (lo, hi) = sigma.index_range(&s);
            sigma.atoms()[lo..hi]
                .iter()
                .zip(&values[lo..hi])
                .fold((0.0, 0.0), |(n, d), (a, v)| (n + a.mass * v.abs(), d + a.mass))
        }
    };
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Energy stopping sum of a candidate `iv` below the stopping interval `top`.
///
/// Side G: `Σ_{K ∈ 𝒲I} T_τ(Q_F∖Q_K)(x_{Q_K})² E(σ,K)² σ(K)`.
/// Side F: `Σ_{K ∈ 𝒲I} P(σ 1_{F∖K}, K)² E(τ,K)² τ(Q_K)`.
pub fn stopping_energy(
    side: Side,
    sigma: &Measure1D,
    tau: &Measure2D,
    grid: &Grid,
    top: &DyadicInterval,
    iv: &DyadicInterval,
) -> f64 {
    let f = top.span();
    grid.whitney(iv)
        .members
        .iter()
        .map(|k| {
            let ks = k.span();
            match side {
                Side::G => {
                    let sk = sigma.mass_in(&ks);
                    if sk == 0.0 {
                        return 0.0;
                    }
                    let t = t_tau(tau, ks.cube_center(), |y| f.in_carleson_cube(y) && !ks.in_carleson_cube(y));
                    t * t * energy_line_sq(sigma, grid, k) * sk
                }
                Side::F => {
                    let tk = tau.cube_mass(&ks);
                    if tk == 0.0 {
                        return 0.0;
                    }
                    let p = poisson_average(sigma, &ks, None, |t| f.contains(t) && !ks.contains(t));
                    let e = energy_plane(tau, &ks);
                    p * p * e * e * tk
                }
            }
        })
        .sum()
}

/// Corona decomposition: below each stopping interval `F`, the maximal
/// intervals with a large average (`≥ 10` times that of `F`) or a large
/// energy sum (`≥ C0 ℛ²` times their mass) become its children.
pub fn build_stopping_tree(side: Side, input: &StoppingInput) -> Result<StoppingTree> {
    let StoppingInput { sigma, tau, grid, values, root, c0, r_char } = *input;
    match side {
        Side::G => check_len(tau.len(), values.len())?,
        Side::F => check_len(sigma.len(), values.len())?,
    }
    let root_avg = abs_average(side, sigma, tau, values, &root);
    let mut nodes = vec![StopNode {
        interval: root,
        parent: None,
        children: Vec::new(),
        cause: StopCause::Root,
        average: root_avg,
        energy: 0.0,
    }];
    let threshold = c0 * r_char * r_char;
    let mut queue = vec![0usize];
    while let Some(idx) = queue.pop() {
        let top = nodes[idx].interval;
        let top_avg = nodes[idx].average;
        let mut stack: Vec<DyadicInterval> = grid.children(&top).map(Vec::from).unwrap_or_default();
        let mut found = Vec::new();
        while let Some(iv) = stack.pop() {
            let mass = side_mass(side, sigma, tau, &iv);
            if mass == 0.0 {
                continue;
            }
            let avg = abs_average(side, sigma, tau, values, &iv);
            let energy = stopping_energy(side, sigma, tau, grid, &top, &iv);
            let cause = if avg > 0.0 && avg >= AVERAGE_FACTOR * top_avg {
                Some(StopCause::LargeAverage)
            } else if energy > 0.0 && energy >= threshold * mass {
                Some(StopCause::Energy)
            } else {
                None
            };
            match cause {
                Some(cause) => found.push((iv, cause, avg, energy)),
                None => {
                    if let Some([l, r]) = grid.children(&iv) {
                        stack.push(r);
                        stack.push(l);
                    }
                }
            }
        }
        found.sort_by(|a, b| a.0.cmp(&b.0));
        for (iv, cause, average, energy) in found {
            let child = nodes.len();
            nodes.push(StopNode { interval: iv, parent: Some(idx), children: Vec::new(), cause, average, energy });
            nodes[idx].children.push(child);
            queue.push(child);
        }
    }
    Ok(StoppingTree { side, c0, nodes })
}

impl StoppingTree {
    fn mass(&self, sigma: &Measure1D, tau: &Measure2D, idx: usize) -> f64 {
        side_mass(self.side, sigma, tau, &self.nodes[idx].interval)
    }

    /// `max_F Σ_{children F'} mass(F') / mass(F)`.
    pub fn carleson_ratio(&self, sigma: &Measure1D, tau: &Measure2D) -> f64 {
        (0..self.nodes.len())
            .filter(|&i| !self.nodes[i].children.is_empty())
            .map(|i| {
                let s: f64 = self.nodes[i].children.iter().map(|&c| self.mass(sigma, tau, c)).sum();
                s / self.mass(sigma, tau, i)
            })
            .fold(0.0, f64::max)
    }

    /// `max_F Σ_{F' ⊊ F in the tree} mass(F') / mass(F)`, summing over all
    /// strict descendants.
    pub fn carleson_ratio_descendants(&self, sigma: &Measure1D, tau: &Measure2D) -> f64 {
        let n = self.nodes.len();
        let masses: Vec<f64> = (0..n).map(|i| self.mass(sigma, tau, i)).collect();
        // nodes are created parent-first, so a reverse sweep accumulates subtrees
        let mut below = vec![0.0; n];
        for i in (0..n).rev() {
            below[i] = self.nodes[i].children.iter().map(|&c| masses[c] + below[c]).sum();
        }
        (0..n).filter(|&i| masses[i] > 0.0).map(|i| below[i] / masses[i]).fold(0.0, f64::max)
    }

    /// Smallest stopping interval containing `iv`.
    pub fn parent_of(&self, iv: &DyadicInterval) -> Option<usize> {
        self.descend(|node| iv.is_inside(node))
    }

    /// Smallest stopping interval `F` with `iv ⋐_s F`.
    pub fn strong_parent_of(&self, iv: &DyadicInterval, s: u32) -> Option<usize> {
        self.descend(|node| iv.strongly_inside(node, s))
    }

    fn descend(&self, ok: impl Fn(&DyadicInterval) -> bool) -> Option<usize> {
        let mut cur = 0;
        if !ok(&self.nodes[0].interval) {
            return None;
        }
        'walk: loop {
            for &c in &self.nodes[cur].children {
                if ok(&self.nodes[c].interval) {
                    cur = c;
                    continue 'walk;
                }
            }
            return Some(cur);
        }
    }

    pub fn energy_children(&self, idx: usize) -> Vec<DyadicInterval> {
        self.nodes[idx]
            .children
            .iter()
            .filter(|&&c| self.nodes[c].cause == StopCause::Energy)
            .map(|&c| self.nodes[c].interval)
            .collect()
    }
}

/// `Σ_F {E|g|·mass^{1/2} + ‖H_F g‖} ‖H̃_F f‖ / (‖f‖ ‖g‖)`.
///
/// Side G: `H_F g = Σ_{π I = F} Δ_{Q_I} g` and `H̃_F f = Σ_{π̃ J = F} Δ_J f`
/// with `π̃ J` the smallest `F` such that `J ⋐_{4r} F`. Side F swaps the
/// roles: `H_F f = Δ_{π F} f + Σ_{π J = F} Δ_J f` and
/// `H̃_F g = Σ_{π I = F} Δ_{Q_I} g`.
pub fn quasi_orthogonality_ratio(
    tree: &StoppingTree,
    sigma: &Measure1D,
    tau: &Measure2D,
    grid: &Grid,
    f: &[f64],
    g: &[f64],
) -> Result<f64> {
    let fe = analyze(sigma, f, grid)?;
    let ge = analyze_plane(tau, g, grid)?;
    let r4 = 4 * grid.params().r;
    let n = tree.nodes.len();
    let mut f_parts = vec![0.0; n];
    let mut g_parts = vec![0.0; n];
    for d in ge.terms.values().filter(|d| d.cube.is_carleson()) {
        if let Some(i) = tree.parent_of(&d.cube.interval) {
            g_parts[i] += d.norm_sq();
        }
    }
    match tree.side {
        Side::G => {
            for t in fe.terms.values() {
                if let Some(i) = tree.strong_parent_of(&t.h.interval, r4) {
                    f_parts[i] += t.coefficient * t.coefficient;
                }
            }
        }
        Side::F => {
            for t in fe.terms.values() {
                if let Some(i) = tree.parent_of(&t.h.interval) {
                    f_parts[i] += t.coefficient * t.coefficient;
                }
            }
            // Δ_{πF} f joins every child of the node whose interval carries it
            for i in 0..n {
                if let Some(p) = tree.nodes[i].parent {
                    if let Some(t) = fe.terms.get(&tree.nodes[p].interval.key()) {
                        f_parts[i] += t.coefficient * t.coefficient;
                    }
                }
            }
        }
    }
    let fnorm = sigma.l2_norm(f)?;
    let gnorm = tau.l2_norm(g)?;
    if fnorm == 0.0 || gnorm == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for i in 0..n {
        let node = &tree.nodes[i];
        let (avg_side, proj_side, other) = match tree.side {
            Side::G => {
                let avg = abs_average(Side::G, sigma, tau, g, &node.interval);
                (avg * tau.cube_mass(&node.interval.span()).sqrt(), g_parts[i].sqrt(), f_parts[i].sqrt())
            }
            Side::F => {
                let avg = abs_average(Side::F, sigma, tau, f, &node.interval);
                (avg * sigma.mass_in(&node.interval.span()).sqrt(), f_parts[i].sqrt(), g_parts[i].sqrt())
            }
        };
        total += (avg_side + proj_side) * other;
    }
    Ok(total / (fnorm * gnorm))
}

/// `⟨t, h_J^σ⟩`.
pub fn t_coefficient(sigma: &Measure1D, grid: &Grid, j: &DyadicInterval) -> Result<f64> {
    let h = haar_function(sigma, grid, j)?;
    if h.is_zero {
        return Ok(0.0);
    }
    let [l, r] = grid.children(j).expect("haar_function checked the scale");
    let mean = |iv: &DyadicInterval| {
        let (lo, hi) = sigma.index_range(&iv.span());
        let a = &sigma.atoms()[lo..hi];
        a.iter().map(|x| x.mass * x.position).sum::<f64>() / a.iter().map(|x| x.mass).sum::<f64>()
    };
    Ok(h.scale * (mean(&r) - mean(&l)))
}

/// Pairs `(P1, P2)` with `P2 ⋐_{4r} P1`.
#[derive(Debug, Clone, Serialize)]
pub struct PairCollection {
    pub pairs: Vec<(DyadicInterval, DyadicInterval)>,
}

impl PairCollection {
    /// The child of `P1` containing `P2`.
    pub fn p1_tilde(&self, grid: &Grid) -> Vec<DyadicInterval> {
        let mut v: Vec<DyadicInterval> = self
            .pairs
            .iter()
            .filter_map(|(p1, p2)| grid.children(p1).and_then(|c| c.into_iter().find(|c| p2.is_inside(c))))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn p2(&self) -> Vec<DyadicInterval> {
        let s: BTreeSet<DyadicInterval> = self.pairs.iter().map(|p| p.1).collect();
        s.into_iter().collect()
    }

    /// Checks the admissibility clauses against the stopping interval `node`
    /// of `tree`: strong containment and goodness, avoidance of the
    /// energy-stopping children, and convexity in `P1`.
    pub fn validate(&self, grid: &Grid, tree: &StoppingTree, node: usize) -> Result<()> {
        let r = grid.params().r;
        let top = tree.nodes[node].interval;
        let bad = |m: String| Err(Error::InadmissibleCollection(m));
        for (p1, p2) in &self.pairs {
            if !p2.strongly_inside(p1, 4 * r) {
                return bad(format!("P2 {:?} is not ⋐_4r P1 {:?}", p2.key(), p1.key()));
            }
            if !p1.is_inside(&top) {
                return bad(format!("P1 {:?} leaves the stopping interval", p1.key()));
            }
            if !grid.is_good(p1) || !grid.is_good(p2) {
                return bad(format!("pair {:?}/{:?} is not good", p1.key(), p2.key()));
            }
        }
        let stops = tree.energy_children(node);
        for pt in self.p1_tilde(grid) {
            if let Some(s) = stops.iter().find(|s| pt.is_inside(s)) {
                return bad(format!("P̃1 {:?} lies in energy stopping interval {:?}", pt.key(), s.key()));
            }
        }
        for p2 in self.p2() {
            if let Some(s) = stops.iter().find(|s| p2.strongly_inside(s, r)) {
                return bad(format!("P2 {:?} is ⋐_r energy stopping interval {:?}", p2.key(), s.key()));
            }
        }
        let mut by_p2: BTreeMap<DyadicInterval, BTreeSet<DyadicInterval>> = BTreeMap::new();
        for (p1, p2) in &self.pairs {
            by_p2.entry(*p2).or_default().insert(*p1);
        }
        for (p2, set) in &by_p2 {
            let top_p1 = *set.iter().max_by_key(|p| p.k).unwrap();
            for p1 in set {
                let mut cur = grid.parent(p1);
                while let Some(c) = cur {
                    if c.k >= top_p1.k {
                        break;
                    }
                    if grid.is_good(&c) && !set.contains(&c) {
                        return bad(format!("P1 set of P2 {:?} is not convex at {:?}", p2.key(), c.key()));
                    }
                    cur = grid.parent(&c);
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeReport {
    pub size: f64,
    pub witness: Option<DyadicInterval>,
    /// Atoms of `λ = Σ_{P2} ⟨t, h_{P2}⟩² δ_{x_{Q_{P2}}}`.
    pub lambda: Vec<(Point, f64)>,
}

/// Maximal `K` with `10·K ⊂ iv`.
pub fn deep_subintervals(grid: &Grid, iv: &DyadicInterval) -> Vec<DyadicInterval> {
    let span = iv.span();
    let mut out = Vec::new();
    let mut stack: Vec<DyadicInterval> = grid.children(iv).map(Vec::from).unwrap_or_default();
    while let Some(k) = stack.pop() {
        if span.contains_interval(&k.span().dilate(10.0)) {
            out.push(k);
        } else if let Some([a, b]) = grid.children(&k) {
            stack.push(a);
            stack.push(b);
        }
    }
    out.sort();
    out
}

struct SizeData {
    top: DyadicInterval,
    p2: Vec<(DyadicInterval, f64)>,
}

impl SizeData {
    fn new(coll: &PairCollection, sigma: &Measure1D, grid: &Grid, top: DyadicInterval) -> Result<Self> {
        let p2 = coll
            .p2()
            .into_iter()
            .map(|j| Ok((j, t_coefficient(sigma, grid, &j)?.powi(2))))
            .collect::<Result<_>>()?;
        Ok(Self { top, p2 })
    }

    /// `λ(Saw I) = Σ_{P2 ⋐_r I} ⟨t, h_{P2}⟩²`.
    fn saw(&self, iv: &DyadicInterval, r: u32) -> f64 {
        self.p2.iter().filter(|(j, _)| j.strongly_inside(iv, r)).map(|(_, m)| m).sum()
    }

    /// `T_τ(Q_F∖Q_I)(x_{Q_I})² λ(Saw I) / |I|²`.
    fn local(&self, tau: &Measure2D, iv: &DyadicInterval, r: u32) -> f64 {
        let (f, s) = (self.top.span(), iv.span());
        let t = t_tau(tau, s.cube_center(), |y| f.in_carleson_cube(y) && !s.in_carleson_cube(y));
        t * t * self.saw(iv, r) / (s.len() * s.len())
    }
}

/// `size(𝒫)² = sup_{I ∈ 𝒯_𝒫, τ(Q_I) > 0} T_τ(Q_F∖Q_I)(x_{Q_I})² λ(Saw I)/(τ(Q_I)|I|²)`
/// where `𝒯_𝒫` collects the maximal `K` with `10·K ⊂ I` over `I ∈ P̃1`.
pub fn size_functional(
    coll: &PairCollection,
    sigma: &Measure1D,
    tau: &Measure2D,
    grid: &Grid,
    tree: &StoppingTree,
    node: usize,
) -> Result<SizeReport> {
    coll.validate(grid, tree, node)?;
    let r = grid.params().r;
    let data = SizeData::new(coll, sigma, grid, tree.nodes[node].interval)?;
    let mut tree_set = BTreeSet::new();
    for pt in coll.p1_tilde(grid) {
        tree_set.extend(deep_subintervals(grid, &pt));
    }
    let mut best = 0.0;
    let mut witness = None;
    for iv in &tree_set {
        let m = tau.cube_mass(&iv.span());
        if m == 0.0 {
            continue;
        }
        let v = data.local(tau, iv, r) / m;
        if v > best {
            best = v;
            witness = Some(*iv);
        }
    }
    let lambda = data.p2.iter().map(|(j, m)| (j.cube_center(), *m)).collect();
    Ok(SizeReport { size: best.sqrt(), witness, lambda })
}

#[derive(Debug, Clone, Serialize)]
pub struct LCollection {
    pub size: f64,
    pub layers: Vec<Vec<DyadicInterval>>,
}

fn minimal(mut v: Vec<DyadicInterval>) -> Vec<DyadicInterval> {
    v.sort();
    v.dedup();
    let keep: Vec<bool> = v.iter().map(|a| !v.iter().any(|b| b != a && b.is_inside(a))).collect();
    v.into_iter().zip(keep).filter(|(_, k)| *k).map(|(a, _)| a).collect()
}

/// `ℒ₀`: minimal `L ∈ P̃1` with `T_τ(Q_F∖Q_L)(x_{Q_L})² λ(Saw L)/|L|² ≥ c² S² τ(Q_L)`,
/// `S` the size. `ℒ_t`: minimal strict ancestors `L ⊂ F` of members of
/// `ℒ_{t-1}` with `λ(Saw L) ≥ (1 + c²) Σ_{L' ∈ ℒ_{t-1}, L' ⊊ L} λ(Saw L')`.
/// Ties count as qualifying.
pub fn select_l_collection(
    coll: &PairCollection,
    sigma: &Measure1D,
    tau: &Measure2D,
    grid: &Grid,
    tree: &StoppingTree,
    node: usize,
    c: f64,
) -> Result<LCollection> {
    let size = size_functional(coll, sigma, tau, grid, tree, node)?.size;
    let r = grid.params().r;
    let top = tree.nodes[node].interval;
    let data = SizeData::new(coll, sigma, grid, top)?;
    let c2 = c * c;
    let l0: Vec<DyadicInterval> = coll
        .p1_tilde(grid)
        .into_iter()
        .filter(|l| data.local(tau, l, r) >= c2 * size * size * tau.cube_mass(&l.span()))
        .collect();
    let mut layers = vec![minimal(l0)];
    loop {
        let prev = layers.last().unwrap();
        let mut cands = BTreeSet::new();
        for l in prev {
            let mut cur = grid.parent(l);
            while let Some(a) = cur {
                if !a.is_inside(&top) {
                    break;
                }
                cands.insert(a);
                cur = grid.parent(&a);
            }
        }
        let next: Vec<DyadicInterval> = cands
            .into_iter()
            .filter(|a| {
                let inner: f64 = prev.iter().filter(|l| l.is_inside(a) && *l != a).map(|l| data.saw(l, r)).sum();
                data.saw(a, r) >= (1.0 + c2) * inner
            })
            .collect();
        let next = minimal(next);
        if next.is_empty() {
            break;
        }
        layers.push(next);
    }
    Ok(LCollection { size, layers })
}

/// `μ = Σ_F Σ_{K ∈ 𝒲F} δ_{x_{Q_K}} Σ_{J ⊂ K, π̃J = F} ⟨t, h_J⟩²`, with `π̃`
/// the `4r`-strong parent in the tree.
pub fn stopping_measure(tree: &StoppingTree, sigma: &Measure1D, grid: &Grid) -> Result<Vec<(DyadicInterval, f64)>> {
    let exp = analyze(sigma, &sigma.positions(), grid)?;
    let r4 = 4 * grid.params().r;
    let owner: Vec<(DyadicInterval, f64, Option<usize>)> = exp
        .terms
        .values()
        .map(|t| (t.h.interval, t.coefficient * t.coefficient, tree.strong_parent_of(&t.h.interval, r4)))
        .collect();
    let mut out = Vec::new();
    for (i, node) in tree.nodes.iter().enumerate() {
        for k in grid.whitney(&node.interval).members {
            let m: f64 = owner.iter().filter(|(j, _, o)| *o == Some(i) && j.is_inside(&k)).map(|(_, c, _)| c).sum();
            if m > 0.0 {
                out.push((k, m));
            }
        }
    }
    Ok(out)
}

/// `max μ(W^k_K) / (|K|² σ(K))` over `K ∈ ⋃_F 𝒲F` and `k ≥ 0`, where
/// `W^k_K = K × [2^{-k-1}|K|, 2^{-k}|K|)`.
pub fn strip_ratio(mu: &[(DyadicInterval, f64)], tree: &StoppingTree, sigma: &Measure1D, grid: &Grid) -> f64 {
    let mut ks = BTreeSet::new();
    for node in &tree.nodes {
        ks.extend(grid.whitney(&node.interval).members);
    }
    let mut worst = 0.0f64;
    for k in ks {
        let s = sigma.mass_in(&k.span());
        for depth in 0..=(k.k - grid.params().k_min) {
            let hi = k.len() * (-(depth as f64)).exp2();
            let lo = 0.5 * hi;
            let m: f64 = mu
                .iter()
                .filter(|(j, _)| {
                    let c = j.cube_center();
                    k.contains(c[0]) && lo <= c[1] && c[1] < hi
                })
                .map(|(_, m)| m)
                .sum();
            if m > 0.0 {
                worst = worst.max(if s == 0.0 { f64::INFINITY } else { m / (k.len() * k.len() * s) });
            }
        }
    }
    worst
}

#[derive(Debug, Clone, Copy)]
pub struct TriangularInput<'a> {
    pub sigma: &'a Measure1D,
    pub tau: &'a Measure2D,
    pub grid: &'a Grid,
    pub f: &'a [f64],
    pub g: &'a [f64],
    /// Haar scales of `f` satisfy `k ≡ s_f + 1 (mod 4r)`.
    pub s_f: i32,
    /// Scales of the Carleson cubes of `g` satisfy `k ≡ s_g + 1 (mod 4r)`.
    pub s_g: i32,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TriangularReport {
    pub above: [f64; 2],
    pub below: [f64; 2],
    pub full: [f64; 2],
    pub residual: [f64; 2],
    pub residual_norm: f64,
    pub f_norm: f64,
    pub g_norm: f64,
}

fn riesz(x: Point, t: f64) -> Result<[f64; 2]> {
    let d = [x[0] - t, x[1]];
    let d2 = d[0] * d[0] + d[1] * d[1];
    if d2 == 0.0 {
        return Err(Error::Singular(format!("σ atom {t} coincides with τ atom {x:?}")));
    }
    Ok([d[0] / d2, d[1] / d2])
}

const EXPANSION_TOL: f64 = 1e-10;

/// `B_above = Σ_{J ⋐_{4r} I} E_{Q_{IJ}}(Δ_{Q_I} g) ⟨R*_τ 1_{Q_{IJ}}, Δ_J f⟩_σ`,
/// `B_below = Σ_{I ⋐_{4r} J} E_{J_I}(Δ_J f) ⟨Δ_{Q_I} g, R_σ 1_{J_I}⟩_τ`,
/// and the remainder of the full form `⟨R_σ f, g⟩_τ`.
pub fn triangular_forms(input: &TriangularInput) -> Result<TriangularReport> {
    let TriangularInput { sigma, tau, grid, f, g, s_f, s_g } = *input;
    let fe = analyze(sigma, f, grid)?;
    let ge = analyze_plane(tau, g, grid)?;
    let f_norm = sigma.l2_norm(f)?;
    let g_norm = tau.l2_norm(g)?;
    let r4 = 4 * grid.params().r as i32;
    let lac = |k: i32, s: i32| (k - s - 1).rem_euclid(r4) == 0;
    for t in fe.terms.values() {
        if t.coefficient.abs() > EXPANSION_TOL * f_norm.max(1.0) && !lac(t.h.interval.k, s_f) {
            return Err(Error::Hypothesis(format!("f has a Haar term at scale {}", t.h.interval.k)));
        }
    }
    if fe.roots.iter().any(|r| r.mean.abs() > EXPANSION_TOL * f_norm.max(1.0)) {
        return Err(Error::Hypothesis("f must have zero mean on every root interval".into()));
    }
    for d in ge.terms.values() {
        let big = d.norm_sq().sqrt() > EXPANSION_TOL * g_norm.max(1.0);
        if big && (!d.cube.is_carleson() || !lac(d.cube.interval.k, s_g)) {
            return Err(Error::Hypothesis(format!("g has a martingale difference on cube {:?}", d.cube.key())));
        }
    }
    if ge.roots.iter().any(|r| r.mean.abs() > EXPANSION_TOL * g_norm.max(1.0)) {
        return Err(Error::Hypothesis("g must have zero mean on every root cube".into()));
    }
    let s_atoms = sigma.atoms();
    let t_atoms = tau.atoms();
    let f_terms: Vec<_> = fe.terms.values().filter(|t| t.coefficient.abs() > 0.0).collect();
    let g_terms: Vec<_> = ge.terms.values().filter(|d| d.cube.is_carleson()).collect();

    let mut above = [0.0, 0.0];
    for d in &g_terms {
        let i = d.cube.interval;
        for t in &f_terms {
            let j = t.h.interval;
            if !j.strongly_inside(&i, r4 as u32) {
                continue;
            }
            // Q_{IJ}: bottom child of Q_I over the half of I containing J
            let c = if j.left >= d.children[1].interval.left { 1 } else { 0 };
            let e = d.child_values[c];
            if e == 0.0 {
                continue;
            }
            let q = d.children[c].interval.span();
            let (lo, hi) = sigma.index_range(&j.span());
            let (clo, chi) = tau.column_range(&q);
            let mut v = [0.0, 0.0];
            for s in &s_atoms[lo..hi] {
                let h = t.coefficient * t.h.eval(s.position);
                for a in t_atoms[clo..chi].iter().filter(|a| a.position[1] < q.len()) {
                    let k = riesz(a.position, s.position)?;
                    v[0] += h * s.mass * a.mass * k[0];
                    v[1] += h * s.mass * a.mass * k[1];
                }
            }
            above[0] += e * v[0];
            above[1] += e * v[1];
        }
    }

    let mut below = [0.0, 0.0];
    for t in &f_terms {
        let j = t.h.interval;
        let [jl, jr] = grid.children(&j).expect("Haar terms have children");
        for d in &g_terms {
            let i = d.cube.interval;
            if !i.strongly_inside(&j, r4 as u32) {
                continue;
            }
            let child = if i.is_inside(&jr) { jr } else { jl };
            let e = t.coefficient * t.h.eval(child.left);
            let (lo, hi) = sigma.index_range(&child.span());
            let (clo, chi) = tau.column_range(&i.span());
            let mut v = [0.0, 0.0];
            for a in t_atoms[clo..chi].iter().filter(|a| d.cube.contains(a.position)) {
                let dg = d.eval(a.position);
                if dg == 0.0 {
                    continue;
                }
                for s in &s_atoms[lo..hi] {
                    let k = riesz(a.position, s.position)?;
                    v[0] += dg * a.mass * s.mass * k[0];
                    v[1] += dg * a.mass * s.mass * k[1];
                }
            }
            below[0] += e * v[0];
            below[1] += e * v[1];
        }
    }

    let mut full = [0.0, 0.0];
    for (a, &gv) in t_atoms.iter().zip(g) {
        if gv == 0.0 {
            continue;
        }
        for (s, &fv) in s_atoms.iter().zip(f) {
            if fv == 0.0 {
                continue;
            }
            let k = riesz(a.position, s.position)?;
            full[0] += gv * a.mass * fv * s.mass * k[0];
            full[1] += gv * a.mass * fv * s.mass * k[1];
        }
    }
    let residual = [full[0] - above[0] - below[0], full[1] - above[1] - below[1]];
    Ok(TriangularReport {
        above,
        below,
        full,
        residual,
        residual_norm: residual[0].hypot(residual[1]),
        f_norm,
        g_norm,
    })
}

/// `‖R*_τ(g - P_Car g)‖_{L²(σ)} / ‖g‖_{L²(τ)}` where `P_Car` keeps the
/// martingale differences of Carleson cubes.
pub fn carleson_remainder_ratio(sigma: &Measure1D, tau: &Measure2D, grid: &Grid, g: &[f64]) -> Result<f64> {
    let ge = analyze_plane(tau, g, grid)?;
    let car = ge.carleson_part().synthesize(&tau.points())?;
    let rest: Vec<f64> = g.iter().zip(&car).map(|(a, b)| a - b).collect();
    let gnorm = tau.l2_norm(g)?;
    if gnorm == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for s in sigma.atoms() {
        let mut v = [0.0, 0.0];
        for (a, &h) in tau.atoms().iter().zip(&rest) {
            if h != 0.0 {
                let k = riesz(a.position, s.position)?;
                v[0] += a.mass * h * k[0];
                v[1] += a.mass * h * k[1];
            }
        }
        total += s.mass * (v[0] * v[0] + v[1] * v[1]);
    }
    Ok(total.sqrt() / gnorm)
}
