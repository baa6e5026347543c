//! Diagonal-core shifts `Theta(W_omega)`, where `alpha = beta = omega_{k1+k2}`.
//!
//! `Theta(W_omega)` is k-hyponormal exactly when `W_omega` is, so the
//! 2-variable moment-matrix sweep can be checked against the 1-variable
//! Hankel sweep.

use serde::Serialize;

use super::build_diagonal_core;
use super::measure::AtomicMeasure1D;
use crate::error::{Error, Result};
use crate::lattice::{LatticeWindow, WeightSeq};
use crate::positivity::{hankel_sweep, k_hyponormal, HankelReport, HyponormalityReport};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalEquivalence {
    pub hankel: HankelReport,
    pub moment: HyponormalityReport,
    pub agree: bool,
}

/// Runs both sweeps on their certifying ranges; `omega` needs a flat tail.
pub fn diagonal_equivalence(omega: &WeightSeq, k: usize) -> Result<DiagonalEquivalence> {
    let f = omega
        .flat_from()
        .ok_or_else(|| Error::Unsupported("diagonal equivalence needs an eventually constant omega".into()))?;
    let hankel = hankel_sweep(omega, k, f + 1);
    let moment = k_hyponormal(&build_diagonal_core(omega.clone()), k, LatticeWindow::square(f + 1));
    let agree = hankel.holds == moment.holds;
    Ok(DiagonalEquivalence { hankel, moment, agree })
}

/// A diagonal core that is 2-hyponormal on the searched range while its
/// toral transform is not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToralLossWitness {
    pub xi: AtomicMeasure1D,
    pub base: HyponormalityReport,
    pub toral: HyponormalityReport,
}

/// Searches `omega` = Berger weights of `r delta_1 + (1 - r) delta_q` over
/// a small grid. Both shifts have non-flat tails, so the verdicts are
/// window-limited to degrees `0..=u_max`; the base shift is subnormal anyway.
pub fn search_toral_two_hyponormal_loss(u_max: usize) -> Option<ToralLossWitness> {
    // Theta(W) moment matrices depend on k1 + k2 only, so one row suffices
    let w = LatticeWindow::new(u_max, 0);
    for q in [2.0, 3.0, 4.0] {
        for i in 1..10 {
            let r = i as f64 / 10.0;
            let xi = AtomicMeasure1D::from_pairs(&[(r, 1.0), (1.0 - r, q)]).ok()?;
            let d = build_diagonal_core(WeightSeq::berger(xi.clone()).ok()?);
            let base = k_hyponormal(&d, 2, w);
            if !base.holds {
                continue;
            }
            let toral = k_hyponormal(&d.toral(), 2, w);
            if !toral.holds {
                return Some(ToralLossWitness { xi, base, toral });
            }
        }
    }
    None
}
