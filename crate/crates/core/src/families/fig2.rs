//! The backward-extension family: zeroth row and column `(x0, omega)`,
//! all other rows and columns `(a, omega)`, with `omega` the Berger
//! weights of a measure `xi`.

use serde::Serialize;

use super::measure::AtomicMeasure1D;
use crate::error::{Error, Result};
use crate::lattice::{DiagramSpec, WeightDiagram, WeightSeq};

pub fn build_fig2_family(x0: f64, a: f64, xi: &AtomicMeasure1D) -> Result<WeightDiagram> {
    WeightDiagram::from_spec(DiagramSpec::Fig2 { x0, a, omega: WeightSeq::berger(xi.clone())? })
}

/// Parameters of the general family; see [`DiagramSpec::Fig2General`].
#[derive(Debug, Clone, PartialEq)]
pub struct Fig2General {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub a: f64,
    pub omega: WeightSeq,
    pub tau: WeightSeq,
}

/// Validates `tau_0 x1 = omega_0 y1`; verdicts are left to the positivity module.
pub fn build_fig2_general(p: Fig2General) -> Result<WeightDiagram> {
    WeightDiagram::from_spec(DiagramSpec::Fig2General {
        x0: p.x0,
        x1: p.x1,
        y0: p.y0,
        y1: p.y1,
        a: p.a,
        omega: p.omega,
        tau: p.tau,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subnormality {
    Subnormal,
    NotSubnormal,
    /// `x0^2 rho <= 1` or `a^2 rho <= 1` fails; the criterion does not apply.
    HypothesesViolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig2Subnormality {
    pub verdict: Subnormality,
    pub rho: f64,
    /// `x0^2 rho (2 - a^2 rho)`, compared against 1.
    pub value: f64,
}

fn check_params(x0: f64, a: f64) -> Result<()> {
    for (name, v) in [("x0", x0), ("a", a)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::param(name, format!("{v} is not positive")));
        }
    }
    Ok(())
}

/// Subnormal iff `x0^2 rho (2 - a^2 rho) <= 1`, given `x0^2 rho <= 1` and `a^2 rho <= 1`.
pub fn fig2_subnormal(x0: f64, a: f64, xi: &AtomicMeasure1D) -> Result<Fig2Subnormality> {
    check_params(x0, a)?;
    let rho = xi.rho()?;
    let (x2r, a2r) = (x0 * x0 * rho, a * a * rho);
    let value = x2r * (2.0 - a2r);
    let verdict = if x2r > 1.0 || a2r > 1.0 {
        Subnormality::HypothesesViolated
    } else if value <= 1.0 {
        Subnormality::Subnormal
    } else {
        Subnormality::NotSubnormal
    };
    Ok(Fig2Subnormality { verdict, rho, value })
}

/// The toral transform is hyponormal iff `|a - x0| <= omega_1 - x0`.
pub fn fig2_toral_hyponormal(x0: f64, a: f64, xi: &AtomicMeasure1D) -> Result<bool> {
    check_params(x0, a)?;
    let w1 = xi
        .weight(1)
        .ok_or_else(|| Error::InvalidMeasure("delta_0 has no weight sequence".into()))?;
    Ok((a - x0).abs() <= w1 - x0)
}

/// `1/2 + sqrt 2 + sqrt(5 + 4 sqrt 2) / 2`
pub fn q_tilde() -> f64 {
    let r2 = std::f64::consts::SQRT_2;
    0.5 + r2 + 0.5 * (5.0 + 4.0 * r2).sqrt()
}

/// `omega_1^2 rho` for `xi = r delta_1 + s delta_q`, `r = 1 - s`:
/// `(r + s q^2) / (r + s q) * (r + s / q)`.
pub fn two_atomic_expression(s: f64, q: f64) -> f64 {
    let r = 1.0 - s;
    (r + s * q * q) / (r + s * q) * (r + s / q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoAtomic {
    /// Position of the heavier atom after rescaling the lighter one to 1.
    pub q: f64,
    pub expression: f64,
    pub q_tilde: f64,
    pub q_within_threshold: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thm311 {
    pub omega1_sq_rho: f64,
    /// `omega_1^2 rho < 2`: a subnormal member with non-hyponormal toral
    /// transform exists.
    pub holds: bool,
    pub two_atomic: Option<TwoAtomic>,
}

pub fn thm311_check(xi: &AtomicMeasure1D) -> Result<Thm311> {
    let rho = xi.rho()?;
    let w1 = xi
        .weight(1)
        .ok_or_else(|| Error::InvalidMeasure("delta_0 has no weight sequence".into()))?;
    let v = w1 * w1 * rho;
    let two_atomic = match xi.atoms() {
        [p, q] => {
            let mass = p.mass + q.mass;
            let (s, ratio) = (q.mass / mass, q.at / p.at);
            Some(TwoAtomic {
                q: ratio,
                expression: two_atomic_expression(s, ratio),
                q_tilde: q_tilde(),
                q_within_threshold: ratio <= q_tilde(),
            })
        }
        _ => None,
    };
    Ok(Thm311 { omega1_sq_rho: v, holds: v < 2.0, two_atomic })
}

/// Parameters `(x0, a)` of a subnormal member whose toral transform is not
/// hyponormal: `x0 = sqrt(1 / (2 rho))` and `a` halfway to `2 x0 - omega_1`.
pub fn thm311_witness(xi: &AtomicMeasure1D) -> Result<(f64, f64)> {
    let t = thm311_check(xi)?;
    if !t.holds {
        return Err(Error::param("xi", format!("omega_1^2 rho = {} is not below 2", t.omega1_sq_rho)));
    }
    let rho = xi.rho()?;
    let w1 = xi.weight(1).expect("checked above");
    let x0 = (0.5 / rho).sqrt();
    Ok((x0, (2.0 * x0 - w1) / 2.0))
}
