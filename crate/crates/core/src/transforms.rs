//! Toral and spherical Aluthge transforms.
//!
//! Both are computed from weights only:
//!
//! * toral: `alpha'_k = sqrt(alpha_k alpha_{k+e1})`, `beta'_k = sqrt(beta_k beta_{k+e2})`;
//! * spherical: `alpha'_k = alpha_k (S_{k+e1} / S_k)^{1/4}` and
//!   `beta'_k = beta_k (S_{k+e2} / S_k)^{1/4}` with `S = alpha^2 + beta^2`.
//!
//! Scalars in [`scale`] are positive reals only, since weights are positive.

use serde::Serialize;

use crate::error::Result;
use crate::lattice::{LatticeWindow, Point, WeightDiagram};
use crate::tol;

pub fn toral(d: &WeightDiagram) -> WeightDiagram {
    d.toral()
}

pub fn spherical(d: &WeightDiagram) -> WeightDiagram {
    d.spherical()
}

/// `(a T1, b T2)`
pub fn scale(d: &WeightDiagram, a: f64, b: f64) -> Result<WeightDiagram> {
    d.scaled(a, b)
}

/// Worst relative mismatch of an identity `lhs(k) = rhs(k)` over a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub max_abs: f64,
    pub max_rel: f64,
    pub at: Point,
}

impl Violation {
    fn over(w: LatticeWindow, mut f: impl FnMut(Point) -> (f64, f64)) -> Self {
        let mut v = Violation { max_abs: 0.0, max_rel: 0.0, at: Point::ORIGIN };
        for k in w.points() {
            let (lhs, rhs) = f(k);
            let abs = (lhs - rhs).abs();
            let rel = if abs == 0.0 { 0.0 } else { tol::rel_diff(lhs, rhs) };
            if !(rel <= v.max_rel) {
                v = Violation { max_abs: abs, max_rel: rel, at: k };
            }
        }
        v
    }

    pub fn holds(&self, rel_tol: f64) -> bool {
        self.max_rel <= rel_tol
    }
}

/// Both forms of the condition for the toral transform to commute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToralCommuteReport {
    /// `alpha_{k+e2} alpha_{k+e1+e2} = alpha_{k+e1} alpha_{k+2e2}`
    pub alpha_form: Violation,
    /// `beta_{k+e1} beta_{k+e1+e2} = beta_{k+e2} beta_{k+2e1}`
    pub beta_form: Violation,
}

impl ToralCommuteReport {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.alpha_form.holds(rel_tol)
    }

    /// The two forms are equivalent for commuting input; disagreement means
    /// the input itself does not commute.
    pub fn forms_disagree(&self, rel_tol: f64) -> bool {
        self.alpha_form.holds(rel_tol) != self.beta_form.holds(rel_tol)
    }
}

pub fn toral_commutes(d: &WeightDiagram, w: LatticeWindow) -> ToralCommuteReport {
    let alpha_form = Violation::over(w, |k| {
        (
            d.alpha(k.up()) * d.alpha(k.right().up()),
            d.alpha(k.right()) * d.alpha(k.offset(0, 2)),
        )
    });
    let beta_form = Violation::over(w, |k| {
        (
            d.beta(k.right()) * d.beta(k.right().up()),
            d.beta(k.up()) * d.beta(k.offset(2, 0)),
        )
    });
    ToralCommuteReport { alpha_form, beta_form }
}

/// Largest pointwise difference of the weights of two diagrams on a window.
pub fn weight_gap(d1: &WeightDiagram, d2: &WeightDiagram, w: LatticeWindow) -> f64 {
    w.points()
        .map(|k| {
            let (a1, b1) = d1.weights(k);
            let (a2, b2) = d2.weights(k);
            (a1 - a2).abs().max((b1 - b2).abs())
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtsReport {
    pub member: bool,
    /// `alpha_{k+e1} = alpha_{k+e2}`
    pub alpha_identity: Violation,
    /// `beta_{k+e2} = beta_{k+e1}`
    pub beta_identity: Violation,
    /// `max |toral - spherical|` on the window.
    pub transform_gap: f64,
}

/// Membership in the class whose toral and spherical transforms coincide.
pub fn ats_report(d: &WeightDiagram, w: LatticeWindow, rel_tol: f64) -> AtsReport {
    let alpha_identity = Violation::over(w, |k| (d.alpha(k.right()), d.alpha(k.up())));
    let beta_identity = Violation::over(w, |k| (d.beta(k.up()), d.beta(k.right())));
    AtsReport {
        member: alpha_identity.holds(rel_tol) && beta_identity.holds(rel_tol),
        alpha_identity,
        beta_identity,
        transform_gap: weight_gap(&d.toral(), &d.spherical(), w),
    }
}

pub fn ats_member(d: &WeightDiagram, w: LatticeWindow) -> bool {
    ats_report(d, w, tol::IDENTITY).member
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub fixed: bool,
    /// `max |spherical(d) - d|` on the window.
    pub gap: f64,
    /// `alpha^2 + beta^2` at the origin.
    pub c_squared: f64,
    /// `max |alpha_k^2 + beta_k^2 - c_squared|` on the window.
    pub c_deviation: f64,
}

pub fn spherical_fixed_point(d: &WeightDiagram, w: LatticeWindow, tol: f64) -> FixedPointReport {
    let gap = weight_gap(&d.spherical(), d, w);
    let s = |k: Point| {
        let (a, b) = d.weights(k);
        a * a + b * b
    };
    let c_squared = s(Point::ORIGIN);
    let c_deviation = w.points().map(|k| (s(k) - c_squared).abs()).fold(0.0, f64::max);
    FixedPointReport { fixed: gap <= tol, gap, c_squared, c_deviation }
}

pub fn is_spherical_fixed_point(d: &WeightDiagram, w: LatticeWindow, tol: f64) -> bool {
    spherical_fixed_point(d, w, tol).fixed
}
