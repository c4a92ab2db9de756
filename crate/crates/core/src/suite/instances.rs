//! Seeded instance families.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::{Grid, GridParams};
use crate::measure::{Atom1D, Atom2D, LineDomain, Measure1D, Measure2D, PlaneDomain};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `σ` on `[0, 0.4]`, `τ` over `[0.6, 1]`.
    Separated,
    /// `σ` on `[0, 1]`, `τ` in the box over `[0.3, 0.7]`.
    Nested,
    /// `τ` heights shrinking geometrically towards a point of the axis.
    BoundaryAccumulating,
    /// Equal-mass discretizations of `[0, 1]` and of the box over it.
    Lebesgue,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Separated, Family::Nested, Family::BoundaryAccumulating, Family::Lebesgue];
}

/// Fractional parts of multiples of the golden ratio: offsets that never
/// land on dyadic points.
fn offset(i: u64) -> f64 {
    ((i as f64 + 1.0) * 0.618_033_988_749_894_9).fract()
}

fn masses(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.5..1.5) / n as f64).collect()
}

/// Generates `(σ, τ)` for a family with `n` atoms per measure.
pub fn generate(family: Family, n: usize, id: u64, rng: &mut ChaCha8Rng) -> Result<(Measure1D, Measure2D)> {
    if n == 0 {
        return Err(Error::Invalid("instances need at least one atom".into()));
    }
    let (sp, tp): (Vec<f64>, Vec<[f64; 2]>) = match family {
        Family::Separated => (
            (0..n).map(|_| rng.gen_range(0.0..0.4)).collect(),
            (0..n).map(|_| [rng.gen_range(0.6..1.0), rng.gen_range(0.01..0.4)]).collect(),
        ),
        Family::Nested => (
            (0..n).map(|_| rng.gen_range(0.0..1.0)).collect(),
            (0..n).map(|_| [rng.gen_range(0.3..0.7), rng.gen_range(0.01..0.4)]).collect(),
        ),
        Family::BoundaryAccumulating => {
            let p = rng.gen_range(0.3..0.7);
            let tp = (0..n)
                .map(|j| {
                    let h = 0.5 * (-(8.0 * j as f64) / n as f64).exp2();
                    let side = if j % 2 == 0 { 1.0 } else { -1.0 };
                    [p + side * h * rng.gen_range(0.0..1.0), h * rng.gen_range(0.5..1.0)]
                })
                .collect();
            ((0..n).map(|_| rng.gen_range(0.0..1.0)).collect(), tp)
        }
        Family::Lebesgue => {
            let a = offset(3 * id);
            let m = (n as f64).sqrt().ceil() as usize;
            let (b, c) = (offset(3 * id + 1), offset(3 * id + 2));
            let tp = (0..m * m).map(|k| [((k % m) as f64 + b) / m as f64, ((k / m) as f64 + c) / m as f64]).collect();
            ((0..n).map(|i| (i as f64 + a) / n as f64).collect(), tp)
        }
    };
    let sm = if family == Family::Lebesgue { vec![1.0 / n as f64; n] } else { masses(rng, n) };
    let tm = if family == Family::Lebesgue { vec![1.0 / tp.len() as f64; tp.len()] } else { masses(rng, tp.len()) };
    let sigma = Measure1D::new(LineDomain::Line, sp.into_iter().zip(sm).map(|(position, mass)| Atom1D { position, mass }))?;
    let tau =
        Measure2D::new(PlaneDomain::HalfPlane, tp.into_iter().zip(tm).map(|(position, mass)| Atom2D { position, mass }))?;
    Ok((sigma, tau))
}

/// Random grid admissible for both measures; up to 100 draws.
pub fn admissible_grid(params: GridParams, sigma: &Measure1D, tau: &Measure2D, rng: &mut ChaCha8Rng) -> Result<Grid> {
    let mut last = String::new();
    for _ in 0..100 {
        let g = Grid::sample(params, rng)?;
        match g.first_violation(sigma, tau) {
            None => return Ok(g),
            Some(v) => last = v,
        }
    }
    Err(Error::Inadmissible(last))
}
