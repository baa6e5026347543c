//! Empirical continuity of the Aluthge transforms.
//!
//! A perturbation multiplies `alpha_k` by `exp(F(k+e1) - F(k))` and `beta_k`
//! by `exp(F(k+e2) - F(k))` for a random potential `F` on the window with
//! `|F| <= ln(1 + eps) / 2`. Every factor lies in `[1/(1+eps), 1+eps]`,
//! inside `[1 - eps, 1 + eps]`, and the perturbed diagram commutes whenever
//! the original does.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{LatticeWindow, WeightDiagram};
use crate::transforms::weight_gap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeReport {
    pub eps: f64,
    pub seed: u64,
    pub input_gap: f64,
    pub toral_gap: f64,
    pub spherical_gap: f64,
}

/// Random multiplicative perturbation of size `eps` supported near `w`.
pub fn perturb(d: &WeightDiagram, eps: f64, w: LatticeWindow, seed: u64) -> Result<WeightDiagram> {
    if !(eps.is_finite() && (0.0..1.0).contains(&eps)) {
        return Err(Error::param("eps", format!("{eps} is outside [0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amp = (1.0 + eps).ln() / 2.0;
    // one extra column and row so transforms on w see perturbed neighbours
    let potential = (0..=w.k1_max + 1)
        .map(|_| (0..=w.k2_max + 1).map(|_| amp * rng.random_range(-1.0..=1.0)).collect())
        .collect();
    d.gauge(potential)
}

pub fn continuity_probe(d: &WeightDiagram, eps: f64, w: LatticeWindow, seed: u64) -> Result<ProbeReport> {
    let p = perturb(d, eps, w, seed)?;
    Ok(ProbeReport {
        eps,
        seed,
        input_gap: weight_gap(d, &p, w),
        toral_gap: weight_gap(&d.toral(), &p.toral(), w),
        spherical_gap: weight_gap(&d.spherical(), &p.spherical(), w),
    })
}

/// Probes along a schedule of sizes with a fixed seed.
pub fn probe_schedule(d: &WeightDiagram, eps: &[f64], w: LatticeWindow, seed: u64) -> Result<Vec<ProbeReport>> {
    eps.iter().map(|&e| continuity_probe(d, e, w, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_diagonal_core, build_drury_arveson};
    use crate::lattice::WeightSeq;

    const W: LatticeWindow = LatticeWindow::new(5, 5);

    #[test]
    fn zero_eps_is_exact() {
        let r = continuity_probe(&build_drury_arveson(), 0.0, W, 7).unwrap();
        assert_eq!((r.input_gap, r.toral_gap, r.spherical_gap), (0.0, 0.0, 0.0));
    }

    #[test]
    fn flat_small_perturbation() {
        let flat = build_diagonal_core(WeightSeq::constant(1.0).unwrap());
        let r = continuity_probe(&flat, 0.01, W, 42).unwrap();
        assert!(r.toral_gap < 0.1 && r.spherical_gap < 0.1);
        assert!(r.input_gap <= 0.01 + 1e-15);
    }

    #[test]
    fn perturbation_keeps_commutativity_and_range() {
        let d = build_drury_arveson();
        let eps = 0.2;
        let p = perturb(&d, eps, W, 3).unwrap();
        assert!(p.check_commutativity(W.grow(2)).holds(1e-12));
        for k in W.grow(2).points() {
            let ra = p.alpha(k) / d.alpha(k);
            let rb = p.beta(k) / d.beta(k);
            for r in [ra, rb] {
                assert!(r >= 1.0 - eps && r <= 1.0 + eps + 1e-15);
            }
        }
        assert!(perturb(&d, -0.1, W, 3).is_err());
        assert!(perturb(&d, 1.0, W, 3).is_err());
    }

    #[test]
    fn gaps_shrink_along_schedule() {
        let d = build_drury_arveson();
        let rs = probe_schedule(&d, &[1e-1, 1e-2, 1e-3], W, 11).unwrap();
        for pair in rs.windows(2) {
            assert!(pair[1].toral_gap < pair[0].toral_gap);
            assert!(pair[1].spherical_gap < pair[0].spherical_gap);
        }
    }

    #[test]
    fn same_seed_same_result() {
        let d = build_drury_arveson();
        assert_eq!(continuity_probe(&d, 0.05, W, 9).unwrap(), continuity_probe(&d, 0.05, W, 9).unwrap());
    }
}
