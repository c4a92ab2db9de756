use serde::Serialize;

use crate::linalg::{largest_singular_value, Matrix, DEFAULT_TOL};
use crate::measure::Measure1D;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyReport {
    /// `B = sup_r (ŵ((r, ∞)) σ̂((0, r)))^{1/2}`.
    pub b: f64,
    /// Norm of `f ↦ ∫_{(0, x)} f dσ̂` from `L²(σ̂)` to `L²(ŵ)`.
    pub direct_norm: f64,
}

impl HardyReport {
    pub fn ratio(&self) -> f64 {
        if self.b == 0.0 {
            if self.direct_norm == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            self.direct_norm / self.b
        }
    }
}

/// Both sides of the weighted Hardy inequality on `(0, ∞)`.
pub fn hardy(w_hat: &Measure1D, sigma_hat: &Measure1D) -> Result<HardyReport> {
    for a in w_hat.atoms().iter().chain(sigma_hat.atoms()) {
        if a.position <= 0.0 {
            return Err(Error::InvalidAtom(format!("Hardy weights live on (0, ∞); atom at {}", a.position)));
        }
    }
    let mut cuts: Vec<f64> = w_hat.positions();
    cuts.extend(sigma_hat.positions());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    // r just above each atom position, plus r below all of them
    let mut best = 0.0f64;
    for &p in &cuts {
        let s: f64 = sigma_hat.atoms().iter().filter(|a| a.position <= p).map(|a| a.mass).sum();
        let w: f64 = w_hat.atoms().iter().filter(|a| a.position > p).map(|a| a.mass).sum();
        best = best.max(s * w);
    }
    let (wa, sa) = (w_hat.atoms(), sigma_hat.atoms());
    let m = Matrix::from_fn(wa.len(), sa.len(), |i, j| {
        if sa[j].position < wa[i].position {
            (wa[i].mass * sa[j].mass).sqrt()
        } else {
            0.0
        }
    });
    let direct = largest_singular_value(&m, DEFAULT_TOL)?.norm;
    Ok(HardyReport { b: best.sqrt(), direct_norm: direct })
}
