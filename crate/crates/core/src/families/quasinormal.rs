//! Spherically quasinormal shifts grown from a zeroth row.
//!
//! With `beta_(k,j) = sqrt(C^2 - alpha_(k,j)^2)` and
//! `alpha_(k,j+1) = alpha_(k,j) beta_(k+1,j) / beta_(k,j)` the result commutes,
//! satisfies `alpha^2 + beta^2 = C^2` and is fixed by the spherical transform.

use crate::error::{Error, Result};
use crate::lattice::{DiagramSpec, Point, WeightDiagram, WeightSeq};
use crate::positivity::{hankel_sweep, HankelReport};

/// Fails with the location of the first weight reaching `c`.
pub fn build_quasinormal_from_row(row: WeightSeq, c: f64) -> Result<WeightDiagram> {
    if row.sup() >= c {
        let n = row.head().len() + 8;
        let k1 = (0..n).find(|&i| row.get(i) >= c).unwrap_or(n);
        return Err(Error::ConstructionFailed { at: Point::new(k1, 0), value: row.sup(), bound: c });
    }
    WeightDiagram::from_spec(DiagramSpec::Quasinormal { row, c })
}

/// Hankel positivity of the zeroth row up to level `k`, a necessary check
/// for the row to come from a subnormal shift.
pub fn check_row(row: &WeightSeq, k: usize, u_max: usize) -> HankelReport {
    hankel_sweep(row, k, u_max)
}
