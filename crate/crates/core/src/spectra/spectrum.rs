//! Radii of the Taylor spectrum for shifts whose core is of tensor form.
//!
//! For such a shift with hyponormal components the Taylor spectrum is
//! `r1 D x r2 D` and the essential spectrum `(r1 T x r2 D) u (r1 D x r2 T)`,
//! where `r1`, `r2` are the norms of the core's row and column factors.
//! Only the radii are computed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{LatticeWindow, Tail, WeightDiagram};
use crate::positivity::componentwise_hyponormal;
use crate::transforms::toral_commutes;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumDescriptor {
    pub r1: f64,
    pub r2: f64,
}

impl SpectrumDescriptor {
    pub fn gap(&self, other: &SpectrumDescriptor) -> f64 {
        (self.r1 - other.r1).abs().max((self.r2 - other.r2).abs())
    }
}

/// Window on which componentwise hyponormality and commutativity of the
/// transforms are checked.
fn check_window(d: &WeightDiagram) -> LatticeWindow {
    match d.tail() {
        Tail::Flat { n1, n2 } => LatticeWindow::new(n1 + 2, n2 + 2),
        _ => LatticeWindow::square(24),
    }
}

pub fn predicted_spectrum(d: &WeightDiagram) -> Result<SpectrumDescriptor> {
    let (sigma, tau) = d
        .core_factors()
        .ok_or_else(|| Error::Unsupported("core is not of tensor form".into()))?;
    if !componentwise_hyponormal(d, check_window(d)) {
        return Err(Error::Unsupported("components are not hyponormal".into()));
    }
    Ok(SpectrumDescriptor { r1: sigma.sup(), r2: tau.sup() })
}

/// `sup` of the zeroth row of `alpha` and the zeroth column of `beta`.
fn edge_sups(d: &WeightDiagram) -> (f64, f64, bool) {
    let (m, exact) = match d.tail() {
        Tail::Flat { n1, n2 } => (n1.max(n2) + 1, true),
        _ => (512, false),
    };
    let row = (0..=m).map(|i| d.alpha((i, 0).into())).fold(0.0, f64::max);
    let col = (0..=m).map(|j| d.beta((0, j).into())).fold(0.0, f64::max);
    (row, col, exact)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeIdentity {
    pub transform: &'static str,
    pub row_sup: f64,
    pub row_sup_transformed: f64,
    pub col_sup: f64,
    pub col_sup_transformed: f64,
    pub exact: bool,
}

impl EdgeIdentity {
    pub fn gap(&self) -> f64 {
        (self.row_sup - self.row_sup_transformed)
            .abs()
            .max((self.col_sup - self.col_sup_transformed).abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub original: SpectrumDescriptor,
    pub toral: Option<SpectrumDescriptor>,
    pub spherical: Option<SpectrumDescriptor>,
    /// Why a transform was left out of the comparison.
    pub skipped: Vec<String>,
    pub edges: Vec<EdgeIdentity>,
    pub max_gap: f64,
    pub passes: bool,
}

/// Compares the radii of `d`, `toral(d)` and `spherical(d)`, plus the
/// zeroth-row and zeroth-column norm identities.
pub fn spectral_invariance_check(d: &WeightDiagram, tol: f64) -> Result<InvarianceReport> {
    let original = predicted_spectrum(d)?;
    let w = check_window(d);
    let mut skipped = Vec::new();
    let mut edges = Vec::new();
    let (row, col, exact) = edge_sups(d);
    let mut edge = |name: &'static str, t: &WeightDiagram| {
        let (rt, ct, ex) = edge_sups(t);
        edges.push(EdgeIdentity {
            transform: name,
            row_sup: row,
            row_sup_transformed: rt,
            col_sup: col,
            col_sup_transformed: ct,
            exact: exact && ex,
        });
    };

    let toral = if toral_commutes(d, w).holds(1e-12) {
        let t = d.toral();
        edge("toral", &t);
        match predicted_spectrum(&t) {
            Ok(s) => Some(s),
            Err(e) => {
                skipped.push(format!("toral: {e}"));
                None
            }
        }
    } else {
        skipped.push("toral: transform does not commute".into());
        None
    };

    let s = d.spherical();
    edge("spherical", &s);
    let spherical = match predicted_spectrum(&s) {
        Ok(r) => Some(r),
        Err(e) => {
            skipped.push(format!("spherical: {e}"));
            None
        }
    };

    let radii_gap = [toral, spherical].iter().flatten().map(|r| r.gap(&original)).fold(0.0, f64::max);
    let edge_gap = edges.iter().map(EdgeIdentity::gap).fold(0.0, f64::max);
    let max_gap = radii_gap.max(edge_gap);
    Ok(InvarianceReport { original, toral, spherical, skipped, edges, max_gap, passes: max_gap <= tol })
}
