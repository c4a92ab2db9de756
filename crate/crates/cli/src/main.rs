use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use twoweight::disk::{arc_family, clark_measure, clark_residual, compactness_profile, default_z_samples, disk_constants, residual_grid};
use twoweight::io::{inner_from_json, line_to_file, read_measure, read_measure_csv, write_csv, AnyMeasure};
use twoweight::kernels::{operator_norm, KernelKind, Weighted};
use twoweight::measure::{Measure1D, Measure2D};
use twoweight::suite::{grid_stats, instance_rows, run_suite, verify_instance, Checks, GridStatsInput, SuiteConfig};

#[derive(Parser)]
#[command(name = "twoweight", version, about = "Two weight inequality diagnostics for finitely atomic measures")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for grids and random families.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suite configuration (JSON); flags below override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; without it results go to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true)]
    r: Option<u32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    kmin: Option<i32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    kmax: Option<i32>,
    /// Monte Carlo trials for grid statistics.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Power-iteration tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Pair {
    /// σ: JSON measure file, or CSV `position,mass`.
    #[arg(long)]
    sigma: PathBuf,
    /// τ: JSON measure file, or CSV `x1,x2,mass`.
    #[arg(long)]
    tau: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kernel {
    Cauchy,
    Riesz,
    RieszTruncated,
    TTau,
    THat,
    DiskCauchy,
    DiskPoisson,
    DiskConjugatePoisson,
    DiskPoissonInterior,
}

#[derive(Subcommand)]
enum Command {
    /// A₂, testing constants, 𝒩 and 𝒩/ℛ for one pair.
    Constants(Pair),
    /// Operator norm of a kernel between two measures.
    Norm {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value = "cauchy")]
        kernel: Kernel,
        /// Inner cutoff of the truncated Riesz kernel.
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        /// Outer cutoff of the truncated Riesz kernel.
        #[arg(long, default_value_t = 100.0)]
        beta: f64,
    },
    /// Energy inequality ratios on a random partition and its refinement.
    Energy(Pair),
    /// Stopping trees, size, triangular forms and strip bound.
    Corona(Pair),
    /// Monte Carlo bad-interval probability and bad projection.
    GridStats {
        /// Goodness depths; defaults to the configured list.
        #[arg(long = "depth")]
        depths: Vec<u32>,
    },
    /// Clark measure of a finite Blaschke product.
    Clark {
        /// `{"zeros": [[re, im], ...]}`.
        #[arg(long)]
        inner: PathBuf,
    },
    /// Disk constants and compactness profiles (circle σ, disk τ).
    Disk(Pair),
    /// The full acceptance suite.
    Suite,
}

fn load(path: &Path, csv_domain: &str) -> Result<AnyMeasure> {
    let m = if path.extension().is_some_and(|e| e == "csv") {
        read_measure_csv(path, csv_domain)
    } else {
        read_measure(path)
    };
    m.with_context(|| format!("reading {}", path.display()))
}

fn load_pair(p: &Pair, disk: bool) -> Result<(Measure1D, Measure2D)> {
    let (ld, pd) = if disk { ("circle", "disk") } else { ("line", "half-plane") };
    Ok((load(&p.sigma, ld)?.into_line()?, load(&p.tau, pd)?.into_plane()?))
}

fn config(c: &Common) -> Result<SuiteConfig> {
    let mut cfg: SuiteConfig = match &c.config {
        Some(p) => serde_json::from_str(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => SuiteConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(e) = c.epsilon {
        cfg.grid.epsilon = e;
    }
    if let Some(r) = c.r {
        cfg.grid.r = r;
    }
    if let Some(k) = c.kmin {
        cfg.grid.k_min = k;
    }
    if let Some(k) = c.kmax {
        cfg.grid.k_max = k;
    }
    if let Some(t) = c.trials {
        cfg.grid_stats.trials = t;
    }
    if let Some(t) = c.tol {
        cfg.tolerances.norm = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Nested JSON to `(dotted key, text)` columns.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::Null => out.push((prefix.into(), String::new())),
        Value::String(s) => out.push((prefix.into(), s.clone())),
        other => out.push((prefix.into(), other.to_string())),
    }
}

fn to_csv(v: &Value) -> Result<String> {
    let rows: Vec<&Value> = match v {
        Value::Array(a) => a.iter().collect(),
        other => vec![other],
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Option<Vec<String>> = None;
    for r in rows {
        let mut cols = Vec::new();
        flatten("", r, &mut cols);
        if header.is_none() {
            let h: Vec<String> = cols.iter().map(|c| c.0.clone()).collect();
            w.write_record(&h)?;
            header = Some(h);
        }
        w.write_record(cols.iter().map(|c| &c.1))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn emit(common: &Common, name: &str, v: &impl serde::Serialize) -> Result<()> {
    let value = serde_json::to_value(v)?;
    let (text, ext) = match common.format {
        Format::Json => (serde_json::to_string_pretty(&value)? + "\n", "json"),
        Format::Csv => (to_csv(&value)?, "csv"),
    };
    match &common.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(format!("{name}.{ext}"));
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn kernel(k: Kernel, alpha: f64, beta: f64) -> KernelKind {
    match k {
        Kernel::Cauchy => KernelKind::Cauchy,
        Kernel::Riesz => KernelKind::Riesz,
        Kernel::RieszTruncated => KernelKind::RieszTruncated { alpha, beta },
        Kernel::TTau => KernelKind::TTau,
        Kernel::THat => KernelKind::THat,
        Kernel::DiskCauchy => KernelKind::DiskCauchy,
        Kernel::DiskPoisson => KernelKind::DiskPoisson,
        Kernel::DiskConjugatePoisson => KernelKind::DiskConjugatePoisson,
        Kernel::DiskPoissonInterior => KernelKind::DiskPoissonInterior,
    }
}

fn instance(cfg: &SuiteConfig, pair: &Pair, checks: Checks) -> Result<twoweight::suite::InstanceReport> {
    let (sigma, tau) = load_pair(pair, false)?;
    let rep = verify_instance(cfg, 0, &sigma, &tau, None, checks);
    if let Some(e) = &rep.error {
        bail!("{e}");
    }
    Ok(rep)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let common = &cli.common;
    let cfg = config(common)?;
    match &cli.command {
        Command::Constants(pair) => {
            let rep = instance(&cfg, pair, Checks::default())?;
            #[derive(serde::Serialize)]
            struct Out<'a> {
                constants: &'a Option<twoweight::constants::ConstantsReport>,
                ratio: Option<f64>,
                necessity: Option<bool>,
                flagged: &'a Option<String>,
            }
            emit(
                common,
                "constants",
                &Out { constants: &rep.constants, ratio: rep.ratio, necessity: rep.necessity, flagged: &rep.flagged },
            )?;
        }
        Command::Norm { pair, kernel: k, alpha, beta } => {
            let disk = matches!(k, Kernel::DiskCauchy | Kernel::DiskPoisson | Kernel::DiskConjugatePoisson | Kernel::DiskPoissonInterior);
            let (sigma, tau) = load_pair(pair, disk)?;
            let rep = operator_norm(&kernel(*k, *alpha, *beta), &Weighted::from(&sigma), &Weighted::from(&tau), cfg.tolerances.norm)?;
            emit(common, "norm", &rep)?;
        }
        Command::Energy(pair) => {
            let rep = instance(&cfg, pair, Checks { energy: true, ..Checks::default() })?;
            emit(common, "energy", &rep.energy)?;
        }
        Command::Corona(pair) => {
            let rep = instance(&cfg, pair, Checks { corona: true, ..Checks::default() })?;
            emit(common, "corona", &rep.corona)?;
        }
        Command::GridStats { depths } => {
            let gs = &cfg.grid_stats;
            let rs = if depths.is_empty() { gs.rs.clone() } else { depths.clone() };
            let epsilon = common.epsilon.unwrap_or(gs.epsilon);
            let window = [common.kmin.unwrap_or(gs.window[0]), common.kmax.unwrap_or(gs.window[1])];
            let stats = rs
                .iter()
                .map(|&r| {
                    let input = GridStatsInput { epsilon, r, window, trials: gs.trials, grids: gs.grids, atoms: gs.atoms };
                    grid_stats(&input, cfg.seed.wrapping_add(r as u64))
                })
                .collect::<twoweight::Result<Vec<_>>>()?;
            emit(common, "grid-stats", &stats)?;
        }
        Command::Clark { inner } => {
            let theta = inner_from_json(&fs::read_to_string(inner).with_context(|| format!("reading {}", inner.display()))?)?;
            let sigma = clark_measure(&theta)?;
            let residual = clark_residual(&theta, &sigma, &residual_grid())?;
            match common.format {
                Format::Json => {
                    #[derive(serde::Serialize)]
                    struct Out {
                        measure: twoweight::io::MeasureFile,
                        residual: f64,
                    }
                    emit(common, "clark", &Out { measure: line_to_file(&sigma), residual })?;
                }
                Format::Csv => {
                    #[derive(serde::Serialize)]
                    struct Row {
                        angle: f64,
                        mass: f64,
                    }
                    let rows: Vec<Row> = sigma.atoms().iter().map(|a| Row { angle: a.position, mass: a.mass }).collect();
                    let mut buf = Vec::new();
                    write_csv(&rows, &mut buf)?;
                    match &common.out {
                        Some(dir) => {
                            fs::create_dir_all(dir)?;
                            fs::write(dir.join("clark.csv"), buf)?;
                        }
                        None => std::io::stdout().write_all(&buf)?,
                    }
                }
            }
        }
        Command::Disk(pair) => {
            let (sigma, tau) = load_pair(pair, true)?;
            let zs = default_z_samples(&sigma, &tau, 14, 64);
            let arcs = arc_family(&sigma, &tau, 14, 2, cfg.seed);
            let constants = disk_constants(&sigma, &tau, &zs, &arcs, cfg.tolerances.norm)?;
            let radii: Vec<f64> = (1..=20).map(|j| 1.0 - (-(j as f64)).exp2()).collect();
            let lengths: Vec<f64> = (1..=14).map(|j| (-(j as f64)).exp2()).collect();
            let profile = compactness_profile(&sigma, &tau, &radii, &lengths, &arcs, 64)?;
            match common.format {
                Format::Json => {
                    #[derive(serde::Serialize)]
                    struct Out<'a> {
                        constants: &'a twoweight::disk::DiskConstantsReport,
                        compactness: &'a twoweight::disk::CompactnessProfile,
                    }
                    emit(common, "disk", &Out { constants: &constants, compactness: &profile })?;
                }
                Format::Csv => {
                    emit(common, "disk", &constants)?;
                    #[derive(serde::Serialize)]
                    struct Row {
                        table: &'static str,
                        parameter: f64,
                        value: f64,
                    }
                    let mut rows = Vec::new();
                    for (name, t) in [("a2", &profile.a2), ("forward", &profile.forward), ("backward", &profile.backward)] {
                        rows.extend(t.iter().map(|&(p, v)| Row { table: name, parameter: p, value: v }));
                    }
                    if let Some(dir) = &common.out {
                        let mut buf = Vec::new();
                        write_csv(&rows, &mut buf)?;
                        fs::write(dir.join("compactness.csv"), buf)?;
                    }
                }
            }
        }
        Command::Suite => {
            let (report, timings) = run_suite(&cfg)?;
            for v in &report.verdicts {
                eprintln!("criterion {} [{:?}] {}: {}", v.criterion, v.status, v.name, v.detail);
            }
            let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("suite-out"));
            fs::create_dir_all(&dir)?;
            fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
            let mut buf = Vec::new();
            write_csv(&instance_rows(&report), &mut buf)?;
            fs::write(dir.join("instances.csv"), buf)?;
            fs::write(dir.join("timings.json"), serde_json::to_string_pretty(&timings)? + "\n")?;
            eprintln!("report written to {}", dir.display());
            return Ok(ExitCode::from(report.exit_code() as u8));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
