//! File formats: measures (JSON and CSV), grids, inner functions, stopping
//! trees, pair collections and expansion dumps.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corona::{PairCollection, StopCause, StoppingTree};
use crate::disk::InnerFunction;
use crate::dyadic::{DyadicInterval, Grid, GridParams};
use crate::haar::HaarExpansion;
use crate::measure::{Atom1D, Atom2D, Interval, LineDomain, Measure1D, Measure2D, PlaneDomain};
use crate::{Error, Result};

/// `{"domain": ..., "atoms": [[pos, mass], ...]}`, or `[[x1, x2, mass], ...]`
/// for two-dimensional domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub domain: String,
    pub atoms: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyMeasure {
    Line(Measure1D),
    Plane(Measure2D),
}

impl AnyMeasure {
    pub fn into_line(self) -> Result<Measure1D> {
        match self {
            AnyMeasure::Line(m) => Ok(m),
            AnyMeasure::Plane(_) => Err(Error::DomainMismatch("expected a line or circle measure".into())),
        }
    }

    pub fn into_plane(self) -> Result<Measure2D> {
        match self {
            AnyMeasure::Plane(m) => Ok(m),
            AnyMeasure::Line(_) => Err(Error::DomainMismatch("expected a half-plane or disk measure".into())),
        }
    }
}

enum Domain {
    Line(LineDomain),
    Plane(PlaneDomain),
}

fn parse_domain(s: &str) -> Result<Domain> {
    Ok(match s {
        "line" => Domain::Line(LineDomain::Line),
        "circle" => Domain::Line(LineDomain::Circle),
        "half-plane" => Domain::Plane(PlaneDomain::HalfPlane),
        "disk" => Domain::Plane(PlaneDomain::Disk),
        _ => return Err(Error::Invalid(format!("unknown domain {s:?}"))),
    })
}

fn build(domain: &str, rows: Vec<Vec<f64>>) -> Result<AnyMeasure> {
    match parse_domain(domain)? {
        Domain::Line(d) => {
            let atoms = rows
                .into_iter()
                .map(|r| match r[..] {
                    [position, mass] => Ok(Atom1D { position, mass }),
                    _ => Err(Error::InvalidAtom(format!("expected [position, mass], got {r:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyMeasure::Line(Measure1D::new(d, atoms)?))
        }
        Domain::Plane(d) => {
            let atoms = rows
                .into_iter()
                .map(|r| match r[..] {
                    [x, y, mass] => Ok(Atom2D { position: [x, y], mass }),
                    _ => Err(Error::InvalidAtom(format!("expected [x1, x2, mass], got {r:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyMeasure::Plane(Measure2D::new(d, atoms)?))
        }
    }
}

pub fn measure_from_json(s: &str) -> Result<AnyMeasure> {
    let f: MeasureFile = serde_json::from_str(s)?;
    build(&f.domain, f.atoms)
}

pub fn line_to_file(m: &Measure1D) -> MeasureFile {
    let domain = match m.domain() {
        LineDomain::Line => "line",
        LineDomain::Circle => "circle",
    };
    MeasureFile { domain: domain.into(), atoms: m.atoms().iter().map(|a| vec![a.position, a.mass]).collect() }
}

pub fn plane_to_file(m: &Measure2D) -> MeasureFile {
    let domain = match m.domain() {
        PlaneDomain::HalfPlane => "half-plane",
        PlaneDomain::Disk => "disk",
    };
    MeasureFile {
        domain: domain.into(),
        atoms: m.atoms().iter().map(|a| vec![a.position[0], a.position[1], a.mass]).collect(),
    }
}

pub fn read_measure(path: impl AsRef<Path>) -> Result<AnyMeasure> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e == "csv") {
        return Err(Error::Invalid("CSV measures need an explicit domain; use read_measure_csv".into()));
    }
    measure_from_json(&std::fs::read_to_string(path)?)
}

/// One atom per row, `position,mass` or `x1,x2,mass`; lines starting with
/// `#` and a non-numeric header row are skipped.
pub fn measure_from_csv(reader: impl Read, domain: &str) -> Result<AnyMeasure> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::InvalidAtom(format!("row {}: {e}", i + 1))),
        }
    }
    build(domain, rows)
}

pub fn read_measure_csv(path: impl AsRef<Path>, domain: &str) -> Result<AnyMeasure> {
    measure_from_csv(std::fs::File::open(path)?, domain)
}

/// `{xi, lambda, epsilon, r, window: [k_min, k_max]}`; `xi[i]` is the digit
/// at scale `k_min + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub xi: Vec<u8>,
    pub lambda: f64,
    pub epsilon: f64,
    pub r: u32,
    pub window: [i32; 2],
}

impl From<&Grid> for GridFile {
    fn from(g: &Grid) -> Self {
        let p = g.params();
        Self { xi: g.xi().to_vec(), lambda: g.lambda(), epsilon: p.epsilon, r: p.r, window: [p.k_min, p.k_max] }
    }
}

impl TryFrom<GridFile> for Grid {
    type Error = Error;

    fn try_from(f: GridFile) -> Result<Grid> {
        let params = GridParams::new(f.epsilon, f.r, f.window[0], f.window[1])?;
        Grid::with_shift(params, f.xi, f.lambda)
    }
}

pub fn grid_to_json(g: &Grid) -> Result<String> {
    Ok(serde_json::to_string_pretty(&GridFile::from(g))?)
}

pub fn grid_from_json(s: &str) -> Result<Grid> {
    Grid::try_from(serde_json::from_str::<GridFile>(s)?)
}

pub fn inner_from_json(s: &str) -> Result<InnerFunction> {
    let f: InnerFunction = serde_json::from_str(s)?;
    f.validate()?;
    Ok(f)
}

/// Stopping tree as nested nodes.
#[derive(Debug, Clone, Serialize)]
pub struct TreeNode {
    pub k: i32,
    pub n: i64,
    pub interval: Interval,
    pub cause: StopCause,
    pub average: f64,
    pub energy: f64,
    pub children: Vec<TreeNode>,
}

pub fn nested_tree(tree: &StoppingTree) -> Vec<TreeNode> {
    fn go(tree: &StoppingTree, i: usize) -> TreeNode {
        let n = &tree.nodes[i];
        TreeNode {
            k: n.interval.k,
            n: n.interval.n,
            interval: n.interval.span(),
            cause: n.cause,
            average: n.average,
            energy: n.energy,
            children: n.children.iter().map(|&c| go(tree, c)).collect(),
        }
    }
    tree.nodes.iter().enumerate().filter(|(_, n)| n.parent.is_none()).map(|(i, _)| go(tree, i)).collect()
}

pub fn tree_to_json(tree: &StoppingTree) -> Result<String> {
    #[derive(Serialize)]
    struct Out<'a> {
        side: crate::corona::Side,
        c0: f64,
        roots: &'a [TreeNode],
    }
    let roots = nested_tree(tree);
    Ok(serde_json::to_string_pretty(&Out { side: tree.side, c0: tree.c0, roots: &roots })?)
}

/// Pair list `[[[k1, n1], [k2, n2]], ...]`.
pub fn pairs_to_json(c: &PairCollection) -> Result<String> {
    let v: Vec<[(i32, i64); 2]> = c.pairs.iter().map(|(a, b)| [a.key(), b.key()]).collect();
    Ok(serde_json::to_string(&v)?)
}

pub fn pairs_from_json(s: &str, grid: &Grid) -> Result<PairCollection> {
    let v: Vec<[(i32, i64); 2]> = serde_json::from_str(s)?;
    let get = |(k, n): (i32, i64)| -> Result<DyadicInterval> { grid.interval(k, n) };
    let pairs = v.into_iter().map(|[a, b]| Ok((get(a)?, get(b)?))).collect::<Result<_>>()?;
    Ok(PairCollection { pairs })
}

/// Rows `scale,position,coefficient`, position being the left endpoint.
pub fn write_expansion_csv(exp: &HaarExpansion, w: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["scale", "position", "coefficient"])?;
    for t in exp.terms.values() {
        wtr.serialize((t.h.interval.k, t.h.interval.left, t.coefficient))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Serializes `rows` as CSV with a header from the field names.
pub fn write_csv<T: Serialize>(rows: &[T], w: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}
