//! Region curves for the family with `omega = 1`, `x0 = x`, `a = y`.
//!
//! * `s(y) = sqrt(1 / (2 - y^2))`: subnormality;
//! * `h(y) = sqrt((1 + y^2) / 2)`: hyponormality;
//! * `CA(y) = (1 + y) / 2`: hyponormality of the toral transform;
//! * `PA(y)`: reference closed form for the spherical transform.
//!
//! A direct Six-Point computation of the spherical transform gives the
//! boundary [`spherical_threshold`], which differs from `PA` (it is the same
//! expression with the `sqrt 2` factors placed differently). Both are kept.

use serde::Serialize;

use super::fig2::build_fig2_family;
use super::measure::AtomicMeasure1D;
use crate::error::{Error, Result};
use crate::lattice::WeightDiagram;

pub fn s(y: f64) -> f64 {
    (1.0 / (2.0 - y * y)).sqrt()
}

pub fn h(y: f64) -> f64 {
    ((1.0 + y * y) / 2.0).sqrt()
}

pub fn ca(y: f64) -> f64 {
    (1.0 + y) / 2.0
}

pub fn pa(y: f64) -> f64 {
    let y2 = y * y;
    let r = (1.0 + y2).sqrt();
    2.0 * (1.0 + y2 - y2 * y2) / ((1.0 + std::f64::consts::SQRT_2) * (1.0 + y2) * (r - y2))
}

/// `(sqrt(1 + y^2) + sqrt 2 y^2) / (sqrt 2 (1 + y^2))`: the largest `x` for
/// which the spherical transform passes the Six-Point Test at the origin.
pub fn spherical_threshold(y: f64) -> f64 {
    let y2 = y * y;
    ((1.0 + y2).sqrt() + std::f64::consts::SQRT_2 * y2) / (std::f64::consts::SQRT_2 * (1.0 + y2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Curves {
    pub y: f64,
    pub s: f64,
    pub h: f64,
    pub ca: f64,
    pub pa: f64,
}

/// The four curves at `y`; defined on the closed interval `[0, 1]`.
pub fn example46(y: f64) -> Result<Curves> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::param("y", format!("{y} is outside [0, 1]")));
    }
    Ok(Curves { y, s: s(y), h: h(y), ca: ca(y), pa: pa(y) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub subnormal: bool,
    pub hyponormal: bool,
    pub toral_hyponormal: bool,
    /// `x <= PA(y)`.
    pub spherical_hyponormal: bool,
}

fn open_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} is outside (0, 1)")))
    }
}

pub fn example46_verdicts(x: f64, y: f64) -> Result<Verdicts> {
    open_unit("x", x)?;
    open_unit("y", y)?;
    Ok(Verdicts {
        subnormal: x <= s(y),
        hyponormal: x <= h(y),
        toral_hyponormal: x <= ca(y),
        spherical_hyponormal: x <= pa(y),
    })
}

/// `q` in `(0, 1)` with `CA(q) = s(q)`, by bisection to `1e-12`.
pub fn example46_crossing() -> f64 {
    let f = |y: f64| ca(y) - s(y);
    let (mut lo, mut hi) = (0.0, 1.0);
    // f(0) < 0 < f(1)
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn build_example46(x: f64, y: f64) -> Result<WeightDiagram> {
    build_fig2_family(x, y, &AtomicMeasure1D::dirac(1.0)?)
}
