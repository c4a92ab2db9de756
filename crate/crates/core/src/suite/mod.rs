//! Seeded batch verification: instance generation, per-instance checks and
//! the criterion verdicts.

mod checks;
mod instances;

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use checks::{
    corona_check, disk_suite, energy_check, grid_stats, haar_check, hardy_suite, in_constrained_family,
    monotonicity_suite, pair_collection, spread, top_interval, CoronaCheck, CoronaInput, DiskInput, DiskSummary,
    EnergyCheck, GridStats, GridStatsInput, HaarCheck, HardySummary, MonotonicitySummary,
};
pub use instances::{admissible_grid, generate, Family};

use crate::constants::{characterization, interval_family, ConstantsReport};
use crate::dyadic::{Grid, GridParams};
use crate::io::{line_to_file, plane_to_file, GridFile, MeasureFile};
use crate::measure::{Measure1D, Measure2D};
use crate::{Error, Result};
use checks::rng_for;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Power-iteration stopping tolerance.
    pub norm: f64,
    /// Slack in `t ≤ 𝒩`.
    pub necessity: f64,
    /// Orthonormality, mean zero and Parseval.
    pub haar: f64,
    /// Clark identity residual.
    pub clark: f64,
    /// Recovery of the closed-form Clark measures.
    pub recovery: f64,
    /// Slack in the strip bound `μ(W) ≤ |K|² σ(K)`.
    pub strip: f64,
    /// Largest `A₂` profile entry at the innermost radius counted as zero,
    /// relative to the outermost one.
    pub compact: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { norm: 1e-10, necessity: 1e-9, haar: 1e-10, clark: 1e-8, recovery: 1e-10, strip: 1e-12, compact: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bounds {
    /// `A₂ ≤ a2_factor · 𝒩²`.
    pub a2_factor: f64,
    /// Allowed change factor under refinement (ratio and energy).
    pub stability: f64,
    /// Carleson condition of the stopping trees.
    pub carleson: f64,
    /// Two-sided band `[1/b, b]` for the first monotonicity equivalence.
    pub mono_band: f64,
    /// Implementation constant of the reverse second-side bound.
    pub mono_ii: f64,
    /// `[low, high]` for `direct_norm/B`.
    pub hardy: [f64; 2],
    /// Overlap bound of the bottom V-regions.
    pub overlap: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Self { a2_factor: 16.0, stability: 2.0, carleson: 0.5, mono_band: 64.0, mono_ii: 2.0, hardy: [1.0, 4.0], overlap: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridStatsConfig {
    pub epsilon: f64,
    pub rs: Vec<u32>,
    pub window: [i32; 2],
    pub trials: usize,
    pub grids: usize,
    pub atoms: usize,
}

impl Default for GridStatsConfig {
    fn default() -> Self {
        Self { epsilon: 0.25, rs: vec![12, 14, 16], window: [-20, 10], trials: 10_000, grids: 200, atoms: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiskConfig {
    pub max_degree: usize,
    /// Random Blaschke products per degree for the Clark residual.
    pub per_degree: usize,
    pub instances: usize,
}

impl Default for DiskConfig {
    fn default() -> Self {
        Self { max_degree: 8, per_degree: 10, instances: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub instances: usize,
    /// Inclusive range of atoms per measure.
    pub atoms: [usize; 2],
    pub families: Vec<Family>,
    pub grid: GridParams,
    /// Random grids added to the standard one for the interval family.
    pub n_shift: usize,
    /// Energy stopping constant.
    pub c0: f64,
    /// Selection constant of the ℒ-collections.
    pub c_select: f64,
    pub haar_instances: usize,
    pub energy_instances: usize,
    /// Instances that also get stopping trees.
    pub corona_instances: usize,
    pub overlap_samples: usize,
    pub monotonicity_configs: usize,
    pub bigger_samples: usize,
    pub hardy_pairs: usize,
    pub grid_stats: GridStatsConfig,
    pub disk: DiskConfig,
    pub tolerances: Tolerances,
    pub bounds: Bounds,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            instances: 200,
            atoms: [16, 48],
            families: Family::ALL.to_vec(),
            grid: GridParams { epsilon: 0.5, r: 2, k_min: -24, k_max: 2 },
            n_shift: 4,
            c0: 64.0,
            c_select: 0.5,
            haar_instances: 50,
            energy_instances: 50,
            corona_instances: 200,
            overlap_samples: 10_000,
            monotonicity_configs: 200,
            bigger_samples: 10_000,
            hardy_pairs: 50,
            grid_stats: GridStatsConfig::default(),
            disk: DiskConfig::default(),
            tolerances: Tolerances::default(),
            bounds: Bounds::default(),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.families.is_empty() || self.atoms[0] == 0 || self.atoms[0] > self.atoms[1] {
            return Err(Error::Invalid("need a family and a nonempty atom range".into()));
        }
        Ok(())
    }
}

/// One generated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: usize,
    pub family: Family,
    pub sigma: Measure1D,
    pub tau: Measure2D,
    pub grid: Grid,
}

pub fn make_instance(config: &SuiteConfig, id: usize) -> Result<Instance> {
    let mut rng = rng_for(config.seed, id as u64);
    let family = config.families[id % config.families.len()];
    let n = rng.gen_range(config.atoms[0]..=config.atoms[1]);
    let (sigma, tau) = generate(family, n, id as u64, &mut rng)?;
    let grid = admissible_grid(config.grid, &sigma, &tau, &mut rng)?;
    Ok(Instance { id, family, sigma, tau, grid })
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub id: usize,
    pub family: Option<Family>,
    pub n_sigma: usize,
    pub n_tau: usize,
    pub grid: Option<GridFile>,
    /// Reason the instance was skipped (singular coincidence).
    pub flagged: Option<String>,
    /// Any other error.
    pub error: Option<String>,
    pub constants: Option<ConstantsReport>,
    /// `𝒩/ℛ`.
    pub ratio: Option<f64>,
    /// `𝒩/ℛ` after splitting every atom.
    pub refined_ratio: Option<f64>,
    /// `A₂/𝒩²`.
    pub a2_over_n2: Option<f64>,
    pub necessity: Option<bool>,
    pub haar: Option<HaarCheck>,
    pub energy: Option<EnergyCheck>,
    pub corona: Option<CoronaCheck>,
}

impl InstanceReport {
    fn empty(id: usize) -> Self {
        Self {
            id,
            family: None,
            n_sigma: 0,
            n_tau: 0,
            grid: None,
            flagged: None,
            error: None,
            constants: None,
            ratio: None,
            refined_ratio: None,
            a2_over_n2: None,
            necessity: None,
            haar: None,
            energy: None,
            corona: None,
        }
    }
}

/// Which of the optional checks to run on an instance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Checks {
    pub refine: bool,
    pub haar: bool,
    pub energy: bool,
    pub corona: bool,
}

fn constants_of(config: &SuiteConfig, sigma: &Measure1D, tau: &Measure2D, seed: u64) -> Result<ConstantsReport> {
    let family = interval_family(sigma, tau, config.grid, config.n_shift, seed)?;
    characterization(sigma, tau, &family, config.tolerances.norm)
}

/// Necessity, ratio and the optional checks for one `(σ, τ)`. A grid that
/// is not admissible is redrawn.
pub fn verify_instance(
    config: &SuiteConfig,
    id: usize,
    sigma: &Measure1D,
    tau: &Measure2D,
    grid: Option<&Grid>,
    checks: Checks,
) -> InstanceReport {
    let mut rep = InstanceReport::empty(id);
    rep.n_sigma = sigma.len();
    rep.n_tau = tau.len();
    if let Err(e) = run_checks(config, id, sigma, tau, grid, checks, &mut rep) {
        match e {
            Error::Singular(m) => rep.flagged = Some(m),
            e => rep.error = Some(e.to_string()),
        }
    }
    rep
}

fn run_checks(
    config: &SuiteConfig,
    id: usize,
    sigma: &Measure1D,
    tau: &Measure2D,
    grid: Option<&Grid>,
    checks: Checks,
    rep: &mut InstanceReport,
) -> Result<()> {
    let mut rng = rng_for(config.seed ^ 0x5eed, id as u64);
    let grid = match grid {
        Some(g) if g.is_admissible(sigma, tau) => g.clone(),
        _ => admissible_grid(config.grid, sigma, tau, &mut rng)?,
    };
    rep.grid = Some(GridFile::from(&grid));
    let c = constants_of(config, sigma, tau, config.seed.wrapping_add(id as u64))?;
    let n = c.n_direct;
    rep.ratio = Some(c.ratio());
    rep.a2_over_n2 = Some(if c.a2 == 0.0 { 0.0 } else { c.a2 / (n * n) });
    let slack = config.tolerances.necessity;
    rep.necessity = Some(
        c.t_forward <= n + slack && c.t_backward <= n + slack && c.a2 <= config.bounds.a2_factor * n * n + slack,
    );
    rep.constants = Some(c);
    if checks.refine {
        let gap = (config.grid.k_min as f64 - 2.0).exp2();
        let rc = constants_of(
            config,
            &sigma.split_atoms(gap)?,
            &tau.split_atoms(gap)?,
            config.seed.wrapping_add(id as u64),
        )?;
        rep.refined_ratio = Some(rc.ratio());
    }
    if checks.haar {
        rep.haar = Some(haar_check(sigma, &grid, &mut rng)?);
    }
    if checks.energy {
        rep.energy = Some(energy_check(sigma, tau, &grid, c.r_char, config.overlap_samples, &mut rng)?);
    }
    if checks.corona {
        let input = CoronaInput { sigma, tau, grid: &grid, r_char: c.r_char, c0: config.c0, c_select: config.c_select };
        rep.corona = corona_check(&input, &mut rng)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// No failures, but some instances were skipped.
    Flagged,
}

/// Instance attached to a verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub instance: usize,
    pub sigma: MeasureFile,
    pub tau: MeasureFile,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub criterion: u8,
    pub name: String,
    pub status: Status,
    pub detail: String,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Observed {
    pub max_ratio: f64,
    pub max_ratio_refined: f64,
    pub ratio_witness: Option<usize>,
    pub max_a2_over_n2: f64,
    /// Largest per-instance change of the energy ratios under refinement.
    pub max_energy_spread: f64,
    /// Change of their maxima over the instances.
    pub energy_constant_spread: f64,
    pub max_overlap: usize,
    pub max_carleson: f64,
    pub max_carleson_descendants: f64,
    /// Observed `size(𝒫)/ℛ`.
    pub c_sz: f64,
    /// Observed triangular residual over `ℛ ‖f‖ ‖g‖`.
    pub c_tri: f64,
    pub max_strip: f64,
    pub max_quasi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub verdicts: Vec<Verdict>,
    pub observed: Observed,
    pub grid_stats: Vec<GridStats>,
    pub monotonicity: Option<MonotonicitySummary>,
    pub hardy: Option<HardySummary>,
    pub disk: Option<DiskSummary>,
    pub instances: Vec<InstanceReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.status == Status::Pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Wall-clock seconds per stage; kept out of the report so that reports are
/// reproducible byte for byte.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub stages: Vec<(String, f64)>,
}

impl Timings {
    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.stages.push((name.into(), t.elapsed().as_secs_f64()));
        out
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.stages.iter().find(|s| s.0 == name).map(|s| s.1)
    }
}

fn verdict(criterion: u8, name: &str, ok: bool, flagged: bool, detail: String) -> Verdict {
    let status = if !ok {
        Status::Fail
    } else if flagged {
        Status::Flagged
    } else {
        Status::Pass
    };
    Verdict { criterion, name: name.into(), status, detail, witness: None }
}

fn fmax(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

pub fn run_suite(config: &SuiteConfig) -> Result<(SuiteReport, Timings)> {
    config.validate()?;
    let mut timings = Timings::default();
    let b = &config.bounds;
    let tol = &config.tolerances;

    let instances: Vec<Result<Instance>> = (0..config.instances).map(|i| make_instance(config, i)).collect();
    let reports: Vec<InstanceReport> = timings.time("instances", || {
        instances
            .par_iter()
            .enumerate()
            .map(|(i, inst)| match inst {
                Ok(inst) => {
                    let checks = Checks {
                        refine: true,
                        haar: i < config.haar_instances,
                        energy: i < config.energy_instances,
                        corona: i < config.corona_instances,
                    };
                    let mut r = verify_instance(config, i, &inst.sigma, &inst.tau, Some(&inst.grid), checks);
                    r.family = Some(inst.family);
                    r
                }
                Err(e) => {
                    let mut r = InstanceReport::empty(i);
                    r.error = Some(e.to_string());
                    r
                }
            })
            .collect()
    });
    let witness = |id: usize| {
        instances[id].as_ref().ok().map(|inst| Witness {
            instance: id,
            sigma: line_to_file(&inst.sigma),
            tau: plane_to_file(&inst.tau),
        })
    };
    let flagged = reports.iter().any(|r| r.flagged.is_some());
    let errored: Vec<&InstanceReport> = reports.iter().filter(|r| r.error.is_some()).collect();
    let ok: Vec<&InstanceReport> = reports.iter().filter(|r| r.constants.is_some()).collect();
    let mut verdicts = Vec::new();

    // 1. necessity
    let first_bad = reports.iter().find(|r| r.necessity == Some(false) || r.error.is_some());
    let max_a2 = fmax(ok.iter().filter_map(|r| r.a2_over_n2));
    let mut v = verdict(
        1,
        "necessity",
        first_bad.is_none() && !ok.is_empty(),
        flagged,
        format!(
            "{} instances, {} checked, {} errors; max A2/N^2 = {max_a2:.4}",
            reports.len(),
            ok.len(),
            errored.len()
        ),
    );
    v.witness = first_bad.and_then(|r| witness(r.id));
    verdicts.push(v);

    // 2. ratio stability
    let mut max_ratio = 0.0f64;
    let mut ratio_witness = None;
    for r in &ok {
        if let Some(x) = r.ratio {
            if x > max_ratio || ratio_witness.is_none() {
                max_ratio = x;
                ratio_witness = Some(r.id);
            }
        }
    }
    let max_refined = fmax(ok.iter().filter_map(|r| r.refined_ratio));
    let change = spread(max_ratio, max_refined);
    let mut v = verdict(
        2,
        "ratio stability",
        max_ratio.is_finite() && max_refined.is_finite() && change < b.stability && errored.is_empty(),
        flagged,
        format!("max N/R = {max_ratio:.4}, refined {max_refined:.4}, change x{change:.4}"),
    );
    v.witness = ratio_witness.and_then(witness);
    verdicts.push(v);

    // 3. grid statistics
    let gs = &config.grid_stats;
    let stats: Vec<GridStats> = timings.time("grid-stats", || {
        gs.rs
            .iter()
            .map(|&r| {
                grid_stats(
                    &GridStatsInput {
                        epsilon: gs.epsilon,
                        r,
                        window: gs.window,
                        trials: gs.trials,
                        grids: gs.grids,
                        atoms: gs.atoms,
                    },
                    config.seed.wrapping_add(r as u64),
                )
            })
            .collect::<Result<_>>()
    })?;
    let ok3 = stats.iter().all(|s| s.p_bad <= s.p_bad_bound && s.bad_projection <= s.bad_projection_bound);
    let detail = stats
        .iter()
        .map(|s| {
            format!(
                "r={}: p_bad {:.4} <= {:.4}, E|P_bad f|^2 {:.2e} <= {:.4}",
                s.r, s.p_bad, s.p_bad_bound, s.bad_projection, s.bad_projection_bound
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    verdicts.push(verdict(3, "grid statistics", ok3, false, detail));

    // 4. Haar system
    let haar: Vec<&HaarCheck> = reports.iter().filter_map(|r| r.haar.as_ref()).collect();
    let worst = |f: fn(&HaarCheck) -> f64| fmax(haar.iter().map(|h| f(h)));
    let (o, m, p) = (worst(|h| h.orthonormality), worst(|h| h.mean_zero), worst(|h| h.parseval));
    let s4 = worst(|h| h.synthesis);
    let want = config.haar_instances.min(config.instances);
    verdicts.push(verdict(
        4,
        "haar system",
        haar.len() == want && o <= tol.haar && m <= tol.haar && p <= tol.haar && s4 <= tol.haar,
        flagged,
        format!("{} instances; orthonormality {o:.2e}, mean {m:.2e}, Parseval {p:.2e}, synthesis {s4:.2e}", haar.len()),
    ));

    // 5. energy: each instance's two ratios before and after refining every
    // piece; the observed constants (maxima over instances) are reported too
    let en: Vec<(usize, &EnergyCheck)> = reports.iter().filter_map(|r| r.energy.as_ref().map(|e| (r.id, e))).collect();
    let emax = |f: fn(&EnergyCheck) -> f64| fmax(en.iter().map(|e| f(e.1)));
    let (c1, c1r) = (emax(|e| e.first), emax(|e| e.first_refined));
    let (c2, c2r) = (emax(|e| e.second), emax(|e| e.second_refined));
    let constant_spread = spread(c1, c1r).max(spread(c2, c2r));
    let max_spread = emax(|e| e.spread);
    let stable = en.iter().filter(|e| e.1.spread < b.stability).count();
    let max_overlap = en.iter().map(|e| e.1.overlap).max().unwrap_or(0);
    let finite = en.iter().all(|(_, e)| {
        [e.first, e.first_refined, e.second, e.second_refined].iter().all(|x| x.is_finite() && *x >= 0.0)
    });
    let want = config.energy_instances.min(config.instances);
    let mut v = verdict(
        5,
        "energy inequalities",
        en.len() == want && finite && stable == en.len() && max_overlap <= b.overlap,
        flagged,
        format!(
            "{} instances, {stable} stable within x{}; worst change x{max_spread:.3e}; observed constants first {c1:.3e} -> {c1r:.3e}, second {c2:.3e} -> {c2r:.3e} (x{constant_spread:.4}); overlap {max_overlap}",
            en.len(),
            b.stability
        ),
    );
    v.witness = en.iter().find(|e| !(e.1.spread < b.stability)).and_then(|e| witness(e.0));
    verdicts.push(v);

    // 6. monotonicity
    let mono = timings.time("monotonicity", || {
        monotonicity_suite(config.grid, config.monotonicity_configs, config.bigger_samples, config.seed ^ 6)
    })?;
    let band = b.mono_band;
    verdicts.push(verdict(
        6,
        "monotonicity",
        mono.bigger_all_nonnegative
            && mono.bigger_samples == config.bigger_samples
            && mono.mono_i2_min >= 1.0 / band
            && mono.mono_i2_max <= band
            && mono.mono_ii_lower_max <= b.mono_ii,
        false,
        format!(
            "sign holds at {} samples: {} (c_obs {:.3e} overall, {:.3e} constrained); two-sided ratios in [{:.4}, {:.4}]; reverse bound max {:.4} <= {}",
            mono.bigger_samples,
            mono.bigger_all_nonnegative,
            mono.bigger_c_all,
            mono.bigger_c_constrained,
            mono.mono_i2_min,
            mono.mono_i2_max,
            mono.mono_ii_lower_max,
            b.mono_ii
        ),
    ));

    // 7. corona
    let co: Vec<(usize, &CoronaCheck)> = reports.iter().filter_map(|r| r.corona.as_ref().map(|c| (r.id, c))).collect();
    let max_car = fmax(co.iter().map(|c| c.1.carleson_g.max(c.1.carleson_f)));
    let max_car_desc = fmax(co.iter().map(|c| c.1.carleson_g_descendants.max(c.1.carleson_f_descendants)));
    let c_sz = fmax(co.iter().map(|c| c.1.size_ratio));
    let c_tri = fmax(co.iter().map(|c| c.1.triangular_ratio));
    let max_strip = fmax(co.iter().map(|c| c.1.strip_ratio));
    let max_quasi = fmax(co.iter().map(|c| c.1.quasi_g.max(c.1.quasi_f)));
    let mut v = verdict(
        7,
        "corona",
        !co.is_empty()
            && errored.is_empty()
            && max_car <= b.carleson
            && c_sz.is_finite()
            && c_tri.is_finite()
            && max_strip <= 1.0 + tol.strip,
        flagged,
        format!(
            "{} instances; Carleson ratio {max_car:.4} (descendants {max_car_desc:.4}); C_sz {c_sz:.4}; C_tri {c_tri:.4}; strip {max_strip:.4}",
            co.len()
        ),
    );
    v.witness = co.iter().max_by(|a, b| a.1.carleson_g.max(a.1.carleson_f).total_cmp(&b.1.carleson_g.max(b.1.carleson_f))).and_then(|c| witness(c.0));
    verdicts.push(v);

    // 8. Hardy
    let hardy = timings.time("hardy", || hardy_suite(config.hardy_pairs, config.seed ^ 8))?;
    verdicts.push(verdict(
        8,
        "hardy",
        hardy.ratio_min >= b.hardy[0] - tol.necessity && hardy.ratio_max <= b.hardy[1] && hardy.margin_min >= -tol.necessity,
        false,
        format!(
            "{} pairs; direct/B in [{:.4}, {:.4}]; min(direct - B) = {:.2e}",
            hardy.pairs, hardy.ratio_min, hardy.ratio_max, hardy.margin_min
        ),
    ));

    // 9. disk
    let dc = &config.disk;
    let disk = timings.time("disk", || {
        disk_suite(
            &DiskInput {
                max_degree: dc.max_degree,
                per_degree: dc.per_degree,
                instances: dc.instances,
                tol: tol.norm,
            },
            config.seed ^ 9,
        )
    });
    let (ok9, detail9, disk) = match disk {
        Ok(d) => {
            let worst = fmax(d.clark_residuals.iter().copied());
            let ok = worst < tol.clark
                && d.clark_z_error <= tol.recovery
                && d.clark_z2_error <= tol.recovery
                && d.necessity_excess <= tol.necessity
                && d.probe_excess <= tol.necessity
                && d.compact_forward_tail == 0.0
                && d.compact_backward_tail == 0.0
                && d.compact_a2_decay <= tol.compact;
            let detail = format!(
                "Clark residual {worst:.2e}; z, z^2 recovery {:.2e}, {:.2e}; t - N {:.2e}; probe - N^2 {:.2e}; C_eq {:.4}; compactness tails A2 x{:.2e}, testing {:.1e}/{:.1e}",
                d.clark_z_error,
                d.clark_z2_error,
                d.necessity_excess,
                d.probe_excess,
                d.c_eq,
                d.compact_a2_decay,
                d.compact_forward_tail,
                d.compact_backward_tail
            );
            (ok, detail, Some(d))
        }
        Err(e) => (false, format!("error: {e}"), None),
    };
    verdicts.push(verdict(9, "disk and model space", ok9, false, detail9));

    let observed = Observed {
        max_ratio,
        max_ratio_refined: max_refined,
        ratio_witness,
        max_a2_over_n2: max_a2,
        max_energy_spread: max_spread,
        energy_constant_spread: constant_spread,
        max_overlap,
        max_carleson: max_car,
        max_carleson_descendants: max_car_desc,
        c_sz,
        c_tri,
        max_strip,
        max_quasi,
    };
    Ok((
        SuiteReport {
            config: config.clone(),
            verdicts,
            observed,
            grid_stats: stats,
            monotonicity: Some(mono),
            hardy: Some(hardy),
            disk,
            instances: reports,
        },
        timings,
    ))
}

/// One CSV row per instance.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceRow {
    pub id: usize,
    pub family: String,
    pub n_sigma: usize,
    pub n_tau: usize,
    pub a2: f64,
    pub t_forward: f64,
    pub t_backward: f64,
    pub n_direct: f64,
    pub r_char: f64,
    pub ratio: f64,
    pub refined_ratio: f64,
    pub necessity: bool,
    pub flagged: String,
    pub error: String,
}

pub fn instance_rows(report: &SuiteReport) -> Vec<InstanceRow> {
    let nan = f64::NAN;
    report
        .instances
        .iter()
        .map(|r| {
            let c = r.constants.as_ref();
            InstanceRow {
                id: r.id,
                family: r.family.map(|f| format!("{f:?}")).unwrap_or_default(),
                n_sigma: r.n_sigma,
                n_tau: r.n_tau,
                a2: c.map_or(nan, |c| c.a2),
                t_forward: c.map_or(nan, |c| c.t_forward),
                t_backward: c.map_or(nan, |c| c.t_backward),
                n_direct: c.map_or(nan, |c| c.n_direct),
                r_char: c.map_or(nan, |c| c.r_char),
                ratio: r.ratio.unwrap_or(nan),
                refined_ratio: r.refined_ratio.unwrap_or(nan),
                necessity: r.necessity.unwrap_or(false),
                flagged: r.flagged.clone().unwrap_or_default(),
                error: r.error.clone().unwrap_or_default(),
            }
        })
        .collect()
}
