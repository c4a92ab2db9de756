//! Per-instance and per-family computations behind the suite verdicts.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constants::{
    bigger_check, bottom_overlap, energy_inequality_report, hardy, monotonicity_i, monotonicity_ii, EnergyInequality,
    MonotonicityI, MonotonicityII,
};
use crate::corona::{
    build_stopping_tree, quasi_orthogonality_ratio, select_l_collection, size_functional, stopping_measure,
    strip_ratio, triangular_forms, PairCollection, Side, StoppingInput, StoppingTree, TriangularInput,
};
use crate::disk::{
    arc_family, circle_measure, clark_measure, clark_residual, compactness_profile, default_lambdas,
    default_z_samples, disk_constants, disk_measure, kernel_probe, nu_measure, residual_grid, InnerFunction,
};
use crate::dyadic::{estimate_pbad, DyadicInterval, Grid, GridParams};
use crate::haar::{analyze, analyze_plane, split_good_bad};
use crate::measure::{Atom1D, Atom2D, Interval, LineDomain, Measure1D, Measure2D, PlaneDomain};
use crate::{Error, Point, Result};

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Random signs with magnitudes spread over forty octaves, so that local
/// averages vary enough to trigger stopping.
fn heavy_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            sign * rng.gen_range(0.0..40.0f64).exp2()
        })
        .collect()
}

/// `max(a, b)/min(a, b)`, one when both vanish, infinite when only one does.
pub fn spread(a: f64, b: f64) -> f64 {
    match (a == 0.0, b == 0.0) {
        (true, true) => 1.0,
        (false, false) => a.max(b) / a.min(b),
        _ => f64::INFINITY,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HaarCheck {
    /// `max |⟨h_I, h_J⟩_σ - δ_IJ|`.
    pub orthonormality: f64,
    /// `max |∫ h_I dσ|`.
    pub mean_zero: f64,
    /// `|‖f‖² - Σ coefficients² - Σ root terms| / ‖f‖²`.
    pub parseval: f64,
    /// `max |f - synthesis|`.
    pub synthesis: f64,
    pub functions: usize,
}

pub fn haar_check(sigma: &Measure1D, grid: &Grid, rng: &mut ChaCha8Rng) -> Result<HaarCheck> {
    let f = random_values(rng, sigma.len());
    let exp = analyze(sigma, &f, grid)?;
    let pos = sigma.positions();
    let masses = sigma.masses();
    let hs: Vec<Vec<f64>> =
        exp.terms.values().filter(|t| !t.h.is_zero).map(|t| pos.iter().map(|&x| t.h.eval(x)).collect()).collect();
    let mut ortho = 0.0f64;
    let mut mean = 0.0f64;
    for (i, a) in hs.iter().enumerate() {
        mean = mean.max(a.iter().zip(&masses).map(|(v, m)| v * m).sum::<f64>().abs());
        for (j, b) in hs.iter().enumerate().skip(i) {
            let ip: f64 = a.iter().zip(b).zip(&masses).map(|((x, y), m)| x * y * m).sum();
            ortho = ortho.max((ip - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    let norm2: f64 = f.iter().zip(&masses).map(|(v, m)| v * v * m).sum();
    let parseval = (norm2 - exp.norm_sq()).abs() / norm2;
    let synth = exp.synthesize(&pos)?;
    let synthesis = f.iter().zip(&synth).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(HaarCheck { orthonormality: ortho, mean_zero: mean, parseval, synthesis, functions: hs.len() })
}

/// Top interval holding the most `σ` mass.
pub fn top_interval(sigma: &Measure1D, grid: &Grid) -> Result<DyadicInterval> {
    let k = grid.params().k_max;
    let mut best: Option<(DyadicInterval, f64)> = None;
    for iv in grid.intervals_meeting(&sigma.positions(), k)? {
        let m = sigma.mass_in(&iv.span());
        if best.map_or(true, |(_, b)| m > b) {
            best = Some((iv, m));
        }
    }
    best.map(|b| b.0).ok_or_else(|| Error::Invalid("σ has no atoms".into()))
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyCheck {
    pub pieces: usize,
    pub first: f64,
    pub first_refined: f64,
    pub second: f64,
    pub second_refined: f64,
    /// Largest `max/min` of the two ratios before and after refinement.
    pub spread: f64,
    pub overlap: usize,
}

fn random_partition(grid: &Grid, top: DyadicInterval, rng: &mut ChaCha8Rng) -> Vec<DyadicInterval> {
    let floor = grid.params().k_min + grid.params().r as i32 + 1;
    let mut out = Vec::new();
    let mut stack = vec![(top, 0)];
    while let Some((iv, depth)) = stack.pop() {
        let split = depth < 5 && iv.k - 1 >= floor && rng.gen_bool(0.6);
        match grid.children(&iv) {
            Some([a, b]) if split => {
                stack.push((b, depth + 1));
                stack.push((a, depth + 1));
            }
            _ => out.push(iv),
        }
    }
    out
}

pub fn energy_check(
    sigma: &Measure1D,
    tau: &Measure2D,
    grid: &Grid,
    r_char: f64,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<EnergyCheck> {
    let top = top_interval(sigma, grid)?;
    let part = random_partition(grid, top, rng);
    let refined: Vec<DyadicInterval> =
        part.iter().flat_map(|p| grid.children(p).map(Vec::from).unwrap_or_else(|| vec![*p])).collect();
    let run = |p: &[DyadicInterval], w| energy_inequality_report(sigma, tau, grid, &top, p, w, r_char).map(|r| r.ratio);
    let first = run(&part, EnergyInequality::First)?;
    let first_refined = run(&refined, EnergyInequality::First)?;
    let second = run(&part, EnergyInequality::Second)?;
    let second_refined = run(&refined, EnergyInequality::Second)?;
    let span = top.span();
    let pts: Vec<Point> = (0..samples)
        .map(|_| {
            let x1 = rng.gen_range(span.left - span.len()..span.right + span.len());
            let x2 = span.len() * (-rng.gen_range(0.0..30.0f64)).exp2();
            [x1, x2]
        })
        .collect();
    let spans: Vec<Interval> = part.iter().map(|p| p.span()).collect();
    Ok(EnergyCheck {
        pieces: part.len(),
        first,
        first_refined,
        second,
        second_refined,
        spread: spread(first, first_refined).max(spread(second, second_refined)),
        overlap: bottom_overlap(&spans, &pts),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CoronaCheck {
    pub nodes_g: usize,
    pub nodes_f: usize,
    /// Children sums over parent mass, the displayed Carleson condition.
    pub carleson_g: f64,
    pub carleson_f: f64,
    /// Same with all strict descendants.
    pub carleson_g_descendants: f64,
    pub carleson_f_descendants: f64,
    pub quasi_g: f64,
    pub quasi_f: f64,
    /// `max size(𝒫)/ℛ` over the stopping intervals of the `g` tree.
    pub size_ratio: f64,
    pub pairs: usize,
    pub l_layers: usize,
    /// `|residual| / (ℛ ‖f‖ ‖g‖)` for the triangular decomposition.
    pub triangular_ratio: f64,
    pub strip_ratio: f64,
}

/// Every pair `(A, J)` with `J` a good Haar interval below the stopping
/// interval and `A` a good ancestor with `J ⋐_{4r} A`, minus the pairs that
/// touch energy stopping children.
pub fn pair_collection(grid: &Grid, tree: &StoppingTree, node: usize, js: &[DyadicInterval]) -> PairCollection {
    let top = tree.nodes[node].interval;
    let r = grid.params().r;
    let stops = tree.energy_children(node);
    let mut pairs = Vec::new();
    for j in js {
        if !j.is_inside(&top) || !grid.is_good(j) || stops.iter().any(|s| j.strongly_inside(s, r)) {
            continue;
        }
        let mut cur = grid.parent(j);
        while let Some(a) = cur {
            if !a.is_inside(&top) {
                break;
            }
            if j.strongly_inside(&a, 4 * r) && grid.is_good(&a) {
                let child = grid.children(&a).and_then(|c| c.into_iter().find(|c| j.is_inside(c)));
                if let Some(child) = child {
                    if !stops.iter().any(|s| child.is_inside(s)) {
                        pairs.push((a, *j));
                    }
                }
            }
            cur = grid.parent(&a);
        }
    }
    PairCollection { pairs }
}

pub struct CoronaInput<'a> {
    pub sigma: &'a Measure1D,
    pub tau: &'a Measure2D,
    pub grid: &'a Grid,
    pub r_char: f64,
    pub c0: f64,
    pub c_select: f64,
}

pub fn corona_check(input: &CoronaInput, rng: &mut ChaCha8Rng) -> Result<Option<CoronaCheck>> {
    let CoronaInput { sigma, tau, grid, r_char, c0, c_select } = *input;
    let root = top_interval(sigma, grid)?;
    let span = root.span();
    let sigma = sigma.restrict(&span.region())?;
    let tau = tau.restrict(&span.carleson_cube())?;
    if sigma.is_empty() || tau.is_empty() || r_char == 0.0 {
        return Ok(None);
    }
    let f = heavy_values(rng, sigma.len());
    let g = heavy_values(rng, tau.len());
    let base = StoppingInput { sigma: &sigma, tau: &tau, grid, values: &g, root, c0, r_char };
    let tree_g = build_stopping_tree(Side::G, &base)?;
    let tree_f = build_stopping_tree(Side::F, &StoppingInput { values: &f, ..base })?;

    let exp_t = analyze(&sigma, &sigma.positions(), grid)?;
    let js: Vec<DyadicInterval> =
        exp_t.terms.values().filter(|t| t.coefficient != 0.0).map(|t| t.h.interval).collect();
    let mut size_ratio = 0.0f64;
    let mut pairs = 0;
    let mut best_node = None;
    for node in 0..tree_g.nodes.len() {
        let coll = pair_collection(grid, &tree_g, node, &js);
        if coll.pairs.is_empty() {
            continue;
        }
        pairs += coll.pairs.len();
        let s = size_functional(&coll, &sigma, &tau, grid, &tree_g, node)?.size / r_char;
        if best_node.is_none() || s > size_ratio {
            size_ratio = s;
            best_node = Some((node, coll));
        }
    }
    let l_layers = match &best_node {
        Some((node, coll)) => select_l_collection(coll, &sigma, &tau, grid, &tree_g, *node, c_select)?.layers.len(),
        None => 0,
    };

    // lacunary, good, mean-zero pieces of f and g at scales k_min + 1 + 4r·m
    let p = *grid.params();
    let s = p.k_min;
    let r4 = 4 * p.r as i32;
    let lac = |k: i32| (k - s - 1).rem_euclid(r4) == 0;
    let f_lac = split_good_bad(&analyze(&sigma, &f, grid)?)
        .0
        .filtered(|t| lac(t.h.interval.k), false)
        .synthesize(&sigma.positions())?;
    let g_lac = analyze_plane(&tau, &g, grid)?
        .filtered(|d| d.cube.is_carleson() && lac(d.cube.interval.k) && grid.is_good_cube(&d.cube), false)
        .synthesize(&tau.points())?;
    let tri = triangular_forms(&TriangularInput {
        sigma: &sigma,
        tau: &tau,
        grid,
        f: &f_lac,
        g: &g_lac,
        s_f: s,
        s_g: s,
    })?;
    let denom = r_char * tri.f_norm * tri.g_norm;
    let triangular_ratio = if tri.residual_norm == 0.0 { 0.0 } else { tri.residual_norm / denom };

    let mu = stopping_measure(&tree_g, &sigma, grid)?;
    Ok(Some(CoronaCheck {
        nodes_g: tree_g.nodes.len(),
        nodes_f: tree_f.nodes.len(),
        carleson_g: tree_g.carleson_ratio(&sigma, &tau),
        carleson_f: tree_f.carleson_ratio(&sigma, &tau),
        carleson_g_descendants: tree_g.carleson_ratio_descendants(&sigma, &tau),
        carleson_f_descendants: tree_f.carleson_ratio_descendants(&sigma, &tau),
        quasi_g: quasi_orthogonality_ratio(&tree_g, &sigma, &tau, grid, &f, &g)?,
        quasi_f: quasi_orthogonality_ratio(&tree_f, &sigma, &tau, grid, &f, &g)?,
        size_ratio,
        pairs,
        l_layers,
        triangular_ratio,
        strip_ratio: strip_ratio(&mu, &tree_g, &sigma, grid),
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct GridStats {
    pub epsilon: f64,
    pub r: u32,
    pub trials: usize,
    pub p_bad: f64,
    /// `4 ε^{-1} 2^{-εr}`.
    pub p_bad_bound: f64,
    pub grids: usize,
    /// Average of `‖P_bad f‖² / ‖f‖²` over the grids.
    pub bad_projection: f64,
    /// `8 ε^{-1} 2^{-εr}`.
    pub bad_projection_bound: f64,
}

pub struct GridStatsInput {
    pub epsilon: f64,
    pub r: u32,
    pub window: [i32; 2],
    pub trials: usize,
    pub grids: usize,
    pub atoms: usize,
}

pub fn grid_stats(input: &GridStatsInput, seed: u64) -> Result<GridStats> {
    let GridStatsInput { epsilon, r, window, trials, grids, atoms } = *input;
    let params = GridParams::new(epsilon, r, window[0], window[1])?;
    let p_bad = estimate_pbad(params, window[0], trials, seed)?;
    let mut rng = rng_for(seed, 1);
    let sigma = Measure1D::new(
        LineDomain::Line,
        (0..atoms).map(|_| Atom1D { position: rng.gen_range(0.0..1.0), mass: rng.gen_range(0.5..1.5) }),
    )?;
    let f = random_values(&mut rng, sigma.len());
    let norm2 = sigma.l2_norm(&f)?.powi(2);
    let empty = Measure2D::new(PlaneDomain::HalfPlane, Vec::<Atom2D>::new())?;
    let mut acc = 0.0;
    let mut used = 0;
    while used < grids {
        let g = Grid::sample(params, &mut rng)?;
        if !g.is_admissible(&sigma, &empty) {
            continue;
        }
        let exp = analyze(&sigma, &f, &g)?;
        acc += split_good_bad(&exp).1.coefficient_energy() / norm2;
        used += 1;
    }
    let base = 2f64.powf(-epsilon * r as f64) / epsilon;
    Ok(GridStats {
        epsilon,
        r,
        trials,
        p_bad,
        p_bad_bound: 4.0 * base,
        grids,
        bad_projection: acc / grids.max(1) as f64,
        bad_projection_bound: 8.0 * base,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicitySummary {
    pub configs: usize,
    /// Range of the two-sided ratios over all `J' ⊂ J`.
    pub mono_i2_min: f64,
    pub mono_i2_max: f64,
    /// Largest `LHS/RHS` of the upper bound with `|φ|`.
    pub mono_max: f64,
    /// Largest `LHS/RHS` of the reverse second-side bound.
    pub mono_ii_lower_max: f64,
    /// Largest `LHS/RHS` of the direct second-side bound.
    pub mono_ii_upper_max: f64,
    pub bigger_samples: usize,
    pub bigger_all_nonnegative: bool,
    /// Smallest observed constant over all samples.
    pub bigger_c_all: f64,
    /// Smallest observed constant on the constrained samples.
    pub bigger_c_constrained: f64,
}

/// `x ∉ V_I` with `|x1 - t_J| ≥ 2 x2`: outside the doubled cone over `t_J`.
pub fn in_constrained_family(big: &Interval, small: &Interval, x: Point) -> bool {
    big.dist(x[0]) >= x[1] && (x[0] - small.center()).abs() >= 2.0 * x[1]
}

/// `x ∉ V_I`, `x2` log-uniform in `[|J|/64, 2|I|]`, horizontal offset from
/// `I` in `[x2, x2 + 2|I|]` on a random side.
fn outside_v(big: &Interval, small: &Interval, rng: &mut ChaCha8Rng) -> Point {
    let x2 = small.len() / 64.0 * (rng.gen_range(0.0..1.0f64) * (128.0 * big.len() / small.len()).log2()).exp2();
    let d = x2 + rng.gen_range(0.0..2.0) * big.len();
    let x1 = if rng.gen_bool(0.5) { big.right + d } else { big.left - d };
    [x1, x2]
}

pub fn monotonicity_suite(params: GridParams, configs: usize, bigger: usize, seed: u64) -> Result<MonotonicitySummary> {
    let mut rng = rng_for(seed, 0);
    let mut s = MonotonicitySummary {
        configs,
        mono_i2_min: f64::INFINITY,
        mono_i2_max: 0.0,
        mono_max: 0.0,
        mono_ii_lower_max: 0.0,
        mono_ii_upper_max: 0.0,
        bigger_samples: 0,
        bigger_all_nonnegative: true,
        bigger_c_all: f64::INFINITY,
        bigger_c_constrained: f64::INFINITY,
    };
    let k0 = (params.k_min + params.k_max) / 2;
    for _ in 0..configs {
        let grid = Grid::sample(params, &mut rng)?;
        let j = grid.locate(rng.gen_range(0.0..1.0), k0)?;
        let js = j.span();
        let big = js.dilate(rng.gen_range(10.5..24.0));
        let m = rng.gen_range(8..=16);
        let sigma = Measure1D::new(
            LineDomain::Line,
            (0..m).map(|_| Atom1D { position: js.left + js.len() * rng.gen_range(0.01..0.99), mass: rng.gen_range(0.5..1.5) }),
        )?;
        let mut tp = Vec::new();
        while tp.len() < m {
            let x = outside_v(&big, &js, &mut rng);
            if in_constrained_family(&big, &js, x) {
                tp.push(Atom2D { position: x, mass: rng.gen_range(0.5..1.5) });
            }
        }
        let tau = Measure2D::new(PlaneDomain::HalfPlane, tp)?;
        let phi: Vec<f64> = (0..tau.len()).map(|_| rng.gen_range(0.1..1.0)).collect();
        let rep = monotonicity_i(&MonotonicityI { sigma: &sigma, tau: &tau, grid: &grid, big, small: j, phi: &phi, f: None })?;
        for v in rep.mono_i2.iter().flatten() {
            s.mono_i2_min = s.mono_i2_min.min(*v);
            s.mono_i2_max = s.mono_i2_max.max(*v);
        }
        for v in rep.mono.iter().flatten() {
            s.mono_max = s.mono_max.max(*v);
        }

        // second side: f ≥ 0 off I, τ inside Q_J
        let sigma2 = Measure1D::new(
            LineDomain::Line,
            (0..m).map(|_| {
                let d = rng.gen_range(0.0..2.0) * big.len() + 1e-3 * big.len();
                let t = if rng.gen_bool(0.5) { big.right + d } else { big.left - d };
                Atom1D { position: t, mass: rng.gen_range(0.5..1.5) }
            }),
        )?;
        let tau2 = Measure2D::new(
            PlaneDomain::HalfPlane,
            (0..m).map(|_| Atom2D {
                position: [js.left + js.len() * rng.gen_range(0.0..1.0), js.len() * rng.gen_range(0.01..1.0)],
                mass: rng.gen_range(0.5..1.5),
            }),
        )?;
        let f: Vec<f64> = (0..sigma2.len()).map(|_| rng.gen_range(0.1..1.0)).collect();
        let rep2 = monotonicity_ii(&MonotonicityII { sigma: &sigma2, tau: &tau2, big, small: js, f: &f })?;
        if let Some(v) = rep2.lower {
            s.mono_ii_lower_max = s.mono_ii_lower_max.max(v);
        }
        if let Some(v) = rep2.upper {
            s.mono_ii_upper_max = s.mono_ii_upper_max.max(v);
        }
    }

    // sign samples, in batches sharing one (I, J)
    let batch = 100;
    let mut done = 0;
    while done < bigger {
        let n = batch.min(bigger - done);
        let js = Interval::new(0.0, 1.0);
        let big = js.dilate(rng.gen_range(10.5..24.0));
        let samples: Vec<(f64, Point)> =
            (0..n).map(|_| (rng.gen_range(0.0..1.0), outside_v(&big, &js, &mut rng))).collect();
        let all = bigger_check(&big, &js, &samples)?;
        s.bigger_all_nonnegative &= all.all_nonnegative;
        s.bigger_c_all = s.bigger_c_all.min(all.c_observed);
        let kept: Vec<(f64, Point)> =
            samples.iter().copied().filter(|&(_, x)| in_constrained_family(&big, &js, x)).collect();
        if !kept.is_empty() {
            s.bigger_c_constrained = s.bigger_c_constrained.min(bigger_check(&big, &js, &kept)?.c_observed);
        }
        done += n;
    }
    s.bigger_samples = done;
    Ok(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct HardySummary {
    pub pairs: usize,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Smallest `direct_norm - B`.
    pub margin_min: f64,
}

pub fn hardy_suite(pairs: usize, seed: u64) -> Result<HardySummary> {
    let mut rng = rng_for(seed, 0);
    let mut s = HardySummary { pairs, ratio_min: f64::INFINITY, ratio_max: 0.0, margin_min: f64::INFINITY };
    for _ in 0..pairs {
        let draw = |rng: &mut ChaCha8Rng| {
            let n = rng.gen_range(4..=32);
            let spread = rng.gen_range(0.0..6.0);
            Measure1D::new(
                LineDomain::Line,
                (0..n).map(|_| Atom1D {
                    position: (rng.gen_range(-spread..spread) as f64).exp2(),
                    mass: (rng.gen_range(-3.0..3.0) as f64).exp2(),
                }),
            )
        };
        let w = draw(&mut rng)?;
        let sg = draw(&mut rng)?;
        let h = hardy(&w, &sg)?;
        let ratio = h.ratio();
        s.ratio_min = s.ratio_min.min(ratio);
        s.ratio_max = s.ratio_max.max(ratio);
        s.margin_min = s.margin_min.min(h.direct_norm - h.b);
    }
    Ok(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct DiskSummary {
    /// Worst Clark identity residual per degree `1..=max_degree`.
    pub clark_residuals: Vec<f64>,
    /// `θ(z) = z`: distance of the Clark measure from `δ_1`.
    pub clark_z_error: f64,
    /// `θ(z) = z²`: distance from `(δ_1 + δ_{-1})/2`.
    pub clark_z2_error: f64,
    pub instances: usize,
    /// Largest `max(t_forward, t_backward) - 𝒩`.
    pub necessity_excess: f64,
    /// Largest `probe/ℛ²` on `(σ_Clark, ν)`.
    pub c_eq: f64,
    /// Largest `probe - 𝒩²`, with `𝒩` the Clark-side Cauchy norm.
    pub probe_excess: f64,
    /// Last entries of the three compactness profiles on boundary-separated
    /// instances (largest over instances).
    pub compact_a2_tail: f64,
    pub compact_forward_tail: f64,
    pub compact_backward_tail: f64,
    /// Ratio of the last to the first `A₂` profile entry.
    pub compact_a2_decay: f64,
    /// Smallest testing profile value at the finest `ε` on boundary-accumulating
    /// instances, which should stay away from zero.
    pub accumulating_floor: f64,
}

fn random_blaschke(rng: &mut ChaCha8Rng, d: usize) -> Result<InnerFunction> {
    InnerFunction::blaschke(
        (0..d).map(|_| Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..std::f64::consts::TAU))).collect(),
    )
}

pub struct DiskInput {
    pub max_degree: usize,
    pub per_degree: usize,
    pub instances: usize,
    pub tol: f64,
}

pub fn disk_suite(input: &DiskInput, seed: u64) -> Result<DiskSummary> {
    let mut rng = rng_for(seed, 0);
    let grid_z = residual_grid();
    let mut clark_residuals = Vec::new();
    for d in 1..=input.max_degree {
        let mut worst = 0.0f64;
        for _ in 0..input.per_degree {
            let theta = random_blaschke(&mut rng, d)?;
            let sigma = clark_measure(&theta)?;
            worst = worst.max(clark_residual(&theta, &sigma, &grid_z)?);
        }
        clark_residuals.push(worst);
    }
    let z = clark_measure(&InnerFunction::blaschke(vec![Complex64::new(0.0, 0.0)])?)?;
    let clark_z_error = match z.atoms() {
        [a] => (a.position - 0.0).abs().min((a.position - std::f64::consts::TAU).abs()).max((a.mass - 1.0).abs()),
        _ => f64::INFINITY,
    };
    let z2 = clark_measure(&InnerFunction::blaschke(vec![Complex64::new(0.0, 0.0); 2])?)?;
    let clark_z2_error = match z2.atoms() {
        [a, b] => a
            .position
            .abs()
            .max((b.position - std::f64::consts::PI).abs())
            .max((a.mass - 0.5).abs())
            .max((b.mass - 0.5).abs()),
        _ => f64::INFINITY,
    };

    let mut s = DiskSummary {
        clark_residuals,
        clark_z_error,
        clark_z2_error,
        instances: input.instances,
        necessity_excess: f64::NEG_INFINITY,
        c_eq: 0.0,
        probe_excess: f64::NEG_INFINITY,
        compact_a2_tail: 0.0,
        compact_forward_tail: 0.0,
        compact_backward_tail: 0.0,
        compact_a2_decay: 0.0,
        accumulating_floor: f64::INFINITY,
    };
    let radii: Vec<f64> = (1..=20).map(|j| 1.0 - (-(j as f64)).exp2()).collect();
    let lengths: Vec<f64> = (1..=14).map(|j| (-(j as f64)).exp2()).collect();
    for i in 0..input.instances {
        // boundary-separated pair: τ inside |w| ≤ 0.8
        let n = rng.gen_range(8..=24);
        let sigma = circle_measure(
            &(0..n).map(|_| (rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(0.5..1.5) / n as f64)).collect::<Vec<_>>(),
        )?;
        let tau = disk_measure(
            &(0..n)
                .map(|_| {
                    let w = Complex64::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(0.0..std::f64::consts::TAU));
                    (w.re, w.im, rng.gen_range(0.5..1.5) / n as f64)
                })
                .collect::<Vec<_>>(),
        )?;
        let zs = default_z_samples(&sigma, &tau, 12, 64);
        let arcs = arc_family(&sigma, &tau, 14, 2, seed ^ i as u64);
        let rep = disk_constants(&sigma, &tau, &zs, &arcs, input.tol)?;
        s.necessity_excess = s.necessity_excess.max(rep.testing() - rep.n_direct);
        let prof = compactness_profile(&sigma, &tau, &radii, &lengths, &arcs, 64)?;
        let last = |t: &[(f64, f64)]| t.last().map_or(0.0, |e| e.1);
        s.compact_a2_tail = s.compact_a2_tail.max(last(&prof.a2));
        s.compact_forward_tail = s.compact_forward_tail.max(last(&prof.forward));
        s.compact_backward_tail = s.compact_backward_tail.max(last(&prof.backward));
        let first = prof.a2.first().map_or(0.0, |e| e.1);
        if first > 0.0 {
            s.compact_a2_decay = s.compact_a2_decay.max(last(&prof.a2) / first);
        }

        // model space: Clark measure against ν = |1-θ|²μ
        let degree = rng.gen_range(1..=input.max_degree);
        let theta = random_blaschke(&mut rng, degree)?;
        let clark = clark_measure(&theta)?;
        let mu = disk_measure(
            &(0..n)
                .map(|_| {
                    let w = Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..std::f64::consts::TAU));
                    (w.re, w.im, rng.gen_range(0.5..1.5) / n as f64)
                })
                .collect::<Vec<_>>(),
        )?;
        let nu = nu_measure(&theta, &mu)?;
        let zs = default_z_samples(&clark, &nu, 12, 64);
        let arcs = arc_family(&clark, &nu, 14, 2, seed ^ (i as u64 + 1000));
        let rep = disk_constants(&clark, &nu, &zs, &arcs, input.tol)?;
        s.necessity_excess = s.necessity_excess.max(rep.testing() - rep.n_direct);
        let probe = kernel_probe(&theta, &mu, &default_lambdas(10, 32))?.value;
        s.probe_excess = s.probe_excess.max(probe - rep.n_direct * rep.n_direct);
        if rep.r_char > 0.0 {
            s.c_eq = s.c_eq.max(probe / (rep.r_char * rep.r_char));
        }

        // τ accumulating radially at a σ atom
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        let sigma = circle_measure(&[(a, 1.0)])?;
        let tau = disk_measure(
            &(1..=16)
                .map(|j| {
                    let h = (-(j as f64)).exp2();
                    let w = Complex64::from_polar(1.0 - h, a);
                    (w.re, w.im, h * h)
                })
                .collect::<Vec<_>>(),
        )?;
        let arcs = arc_family(&sigma, &tau, 16, 2, seed ^ (i as u64 + 2000));
        let prof = compactness_profile(&sigma, &tau, &radii, &lengths, &arcs, 16)?;
        s.accumulating_floor = s.accumulating_floor.min(last(&prof.forward));
    }
    Ok(s)
}
