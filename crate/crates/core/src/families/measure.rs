//! Finitely atomic Berger measures on `[0, inf)` and on the quarter plane.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tol;

/// A point mass `mass * delta_at`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub at: f64,
    pub mass: f64,
}

/// Positive, finitely atomic measure on `[0, inf)`; atoms sorted by position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure1D")]
pub struct AtomicMeasure1D {
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
struct RawMeasure1D {
    atoms: Vec<Atom>,
}

impl TryFrom<RawMeasure1D> for AtomicMeasure1D {
    type Error = Error;
    fn try_from(raw: RawMeasure1D) -> Result<Self> {
        AtomicMeasure1D::new(raw.atoms)
    }
}

/// Outcome of an atomwise comparison `lhs <= rhs` that failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominationFailure {
    /// Position of the offending atom of the smaller measure.
    pub at: f64,
    pub lhs_mass: f64,
    /// Mass of the larger measure at that position (0 when unmatched).
    pub rhs_mass: f64,
}

impl AtomicMeasure1D {
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        for a in &atoms {
            if !(a.at.is_finite() && a.at >= 0.0) {
                return Err(Error::InvalidMeasure(format!("atom position {} is not in [0, inf)", a.at)));
            }
            if !(a.mass.is_finite() && a.mass > 0.0) {
                return Err(Error::InvalidMeasure(format!("atom mass {} is not positive", a.mass)));
            }
        }
        atoms.sort_by(|a, b| a.at.total_cmp(&b.at));
        if let Some(w) = atoms.windows(2).find(|w| w[1].at - w[0].at <= tol::ATOM_POSITION) {
            return Err(Error::InvalidMeasure(format!("duplicate atom at {}", w[0].at)));
        }
        Ok(AtomicMeasure1D { atoms })
    }

    /// `delta_p`
    pub fn dirac(at: f64) -> Result<Self> {
        Self::new(vec![Atom { at, mass: 1.0 }])
    }

    /// Builds from `(mass, position)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(mass, at)| Atom { at, mass }).collect())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= 1e-12
    }

    pub fn max_position(&self) -> f64 {
        self.atoms.last().map_or(0.0, |a| a.at)
    }

    pub fn mass_at(&self, at: f64) -> f64 {
        self.atoms
            .iter()
            .find(|a| (a.at - at).abs() <= tol::ATOM_POSITION)
            .map_or(0.0, |a| a.mass)
    }

    /// Power moments `gamma_0 ..= gamma_n`, `gamma_j = sum r_i p_i^j`.
    pub fn moments(&self, n: usize) -> Vec<f64> {
        (0..=n)
            .map(|j| self.atoms.iter().map(|a| a.mass * a.at.powi(j as i32)).sum())
            .collect()
    }

    /// `omega_j = sqrt(gamma_{j+1} / gamma_j)`, evaluated after dividing
    /// both moments by `max_position^j` so large `j` neither under- nor overflows.
    ///
    /// `None` only for `delta_0`.
    pub fn weight(&self, j: usize) -> Option<f64> {
        let top = self.max_position();
        if top <= 0.0 {
            return None;
        }
        let (mut num, mut den) = (0.0, 0.0);
        for a in &self.atoms {
            let r = (a.at / top).powi(j as i32);
            num += a.mass * a.at * r;
            den += a.mass * r;
        }
        Some((num / den).sqrt())
    }

    /// `omega_0 .. omega_{n-1}`.
    pub fn weights(&self, n: usize) -> Result<Vec<f64>> {
        (0..n)
            .map(|j| {
                self.weight(j)
                    .ok_or_else(|| Error::InvalidMeasure("delta_0 has no weight sequence".into()))
            })
            .collect()
    }

    /// `rho = integral of 1/s`.
    pub fn rho(&self) -> Result<f64> {
        if let Some(a) = self.atoms.iter().find(|a| a.at == 0.0) {
            return Err(Error::NotIntegrable { mass: a.mass });
        }
        Ok(self.atoms.iter().map(|a| a.mass / a.at).sum())
    }

    /// Berger measure of the shift `(alpha0, omega_0, omega_1, ...)` where
    /// `omega` comes from `self`:
    /// `alpha0^2 / s * xi + (1 - alpha0^2 rho) delta_0`.
    ///
    /// Residual masses below [`tol::RESIDUAL_MASS`] are dropped.
    pub fn backward_extension(&self, alpha0: f64) -> Result<AtomicMeasure1D> {
        if !(alpha0.is_finite() && alpha0 > 0.0) {
            return Err(Error::param("alpha0", "must be positive"));
        }
        let rho = self.rho()?;
        let a2 = alpha0 * alpha0;
        let residual = 1.0 - a2 * rho;
        if residual < -tol::RESIDUAL_MASS {
            return Err(Error::NotSubnormal { alpha0_sq: a2, limit: 1.0 / rho });
        }
        let mut atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom { at: a.at, mass: a2 * a.mass / a.at })
            .collect();
        if residual >= tol::RESIDUAL_MASS {
            atoms.push(Atom { at: 0.0, mass: residual });
        }
        AtomicMeasure1D::new(atoms)
    }

    /// Atomwise check of `self <= other`; masses may exceed by `mass_tol`.
    pub fn dominated_by(&self, other: &AtomicMeasure1D, mass_tol: f64) -> Result<(), DominationFailure> {
        for a in &self.atoms {
            let rhs = other.mass_at(a.at);
            if a.mass > rhs + mass_tol {
                return Err(DominationFailure { at: a.at, lhs_mass: a.mass, rhs_mass: rhs });
            }
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Result<AtomicMeasure1D> {
        AtomicMeasure1D::new(
            self.atoms.iter().map(|a| Atom { at: a.at, mass: a.mass * factor }).collect(),
        )
    }
}

impl fmt::Display for AtomicMeasure1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atoms.iter().map(|a| format!("{}@{}", a.mass, a.at)).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses `"mass@position,..."`, e.g. `"0.5@1,0.5@2"`.
impl FromStr for AtomicMeasure1D {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let atoms = s
            .split(',')
            .map(|part| {
                let (m, p) = part
                    .split_once('@')
                    .ok_or_else(|| Error::Parse(format!("atom `{part}` is not mass@position")))?;
                let num = |t: &str| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("atom `{part}`: {e}")))
                };
                Ok(Atom { mass: num(m)?, at: num(p)? })
            })
            .collect::<Result<Vec<_>>>()?;
        AtomicMeasure1D::new(atoms)
    }
}

/// A point mass at `(s, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom2 {
    pub s: f64,
    pub t: f64,
    pub mass: f64,
}

/// Positive, finitely atomic measure on `[0, inf)^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure2D {
    atoms: Vec<Atom2>,
}

impl AtomicMeasure2D {
    pub fn new(mut atoms: Vec<Atom2>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        for a in &atoms {
            if !(a.s.is_finite() && a.s >= 0.0 && a.t.is_finite() && a.t >= 0.0) {
                return Err(Error::InvalidMeasure(format!("atom ({}, {}) outside the quarter plane", a.s, a.t)));
            }
            if !(a.mass.is_finite() && a.mass > 0.0) {
                return Err(Error::InvalidMeasure(format!("atom mass {} is not positive", a.mass)));
            }
        }
        atoms.sort_by(|a, b| a.s.total_cmp(&b.s).then(a.t.total_cmp(&b.t)));
        let same = |a: &Atom2, b: &Atom2| {
            (a.s - b.s).abs() <= tol::ATOM_POSITION && (a.t - b.t).abs() <= tol::ATOM_POSITION
        };
        if let Some(w) = atoms.windows(2).find(|w| same(&w[0], &w[1])) {
            return Err(Error::InvalidMeasure(format!("duplicate atom at ({}, {})", w[0].s, w[0].t)));
        }
        Ok(AtomicMeasure2D { atoms })
    }

    /// Product measure `xi1 x xi2` (`s` from `xi1`, `t` from `xi2`).
    pub fn product(xi1: &AtomicMeasure1D, xi2: &AtomicMeasure1D) -> Self {
        let atoms = xi1
            .atoms()
            .iter()
            .flat_map(|a| {
                xi2.atoms().iter().map(move |b| Atom2 { s: a.at, t: b.at, mass: a.mass * b.mass })
            })
            .collect();
        // factors are valid, so the product is too
        AtomicMeasure2D { atoms }
    }

    pub fn atoms(&self) -> &[Atom2] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// `|| 1/t ||_{L1(mu)}`
    pub fn inv_t_norm(&self) -> Result<f64> {
        let on_axis: f64 = self.atoms.iter().filter(|a| a.t == 0.0).map(|a| a.mass).sum();
        if on_axis > 0.0 {
            return Err(Error::NotIntegrable { mass: on_axis });
        }
        Ok(self.atoms.iter().map(|a| a.mass / a.t).sum())
    }

    /// Extremal measure `d mu_ext = (1 - delta_0(t)) / (t ||1/t||) d mu`.
    pub fn extremal(&self) -> Result<AtomicMeasure2D> {
        let norm = self.inv_t_norm()?;
        AtomicMeasure2D::new(
            self.atoms
                .iter()
                .map(|a| Atom2 { mass: a.mass / (a.t * norm), ..*a })
                .collect(),
        )
    }

    /// Marginal `mu o pi_X^{-1}` on the `s` axis.
    pub fn marginal_x(&self) -> AtomicMeasure1D {
        let mut merged: Vec<Atom> = Vec::new();
        for a in &self.atoms {
            match merged.iter_mut().find(|m| (m.at - a.s).abs() <= tol::ATOM_POSITION) {
                Some(m) => m.mass += a.mass,
                None => merged.push(Atom { at: a.s, mass: a.mass }),
            }
        }
        AtomicMeasure1D::new(merged).expect("marginal of a valid measure is valid")
    }

    /// Marginal on the `t` axis.
    pub fn marginal_y(&self) -> AtomicMeasure1D {
        let swapped = AtomicMeasure2D {
            atoms: self.atoms.iter().map(|a| Atom2 { s: a.t, t: a.s, mass: a.mass }).collect(),
        };
        swapped.marginal_x()
    }

    /// Two-variable moment `integral s^n t^m`.
    pub fn moment(&self, n: usize, m: usize) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.mass * a.s.powi(n as i32) * a.t.powi(m as i32))
            .sum()
    }
}

/// `(mu_ext, mu^X)` for an atomic 2-D measure.
pub fn extremal_and_marginal(mu: &AtomicMeasure2D) -> Result<(AtomicMeasure2D, AtomicMeasure1D)> {
    let ext = mu.extremal()?;
    let marginal = mu.marginal_x();
    Ok((ext, marginal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn half_one_two() -> AtomicMeasure1D {
        "0.5@1,0.5@2".parse().unwrap()
    }

    #[test]
    fn moments_and_weights_of_two_atoms() {
        let xi = half_one_two();
        let g = xi.moments(3);
        assert_eq!(g, vec![1.0, 1.5, 2.5, 4.5]);
        let w = xi.weights(3).unwrap();
        assert_relative_eq!(w[0], 1.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(w[1], (5.0f64 / 3.0).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(w[2], (9.0f64 / 5.0).sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn dirac_one_gives_unilateral_shift() {
        let xi = AtomicMeasure1D::dirac(1.0).unwrap();
        assert!(xi.weights(10).unwrap().iter().all(|&w| w == 1.0));
        assert_eq!(xi.rho().unwrap(), 1.0);
    }

    #[test]
    fn s_a_measure_weights() {
        let a = 0.6;
        let xi = AtomicMeasure1D::from_pairs(&[(1.0 - a * a, 0.0), (a * a, 1.0)]).unwrap();
        let w = xi.weights(5).unwrap();
        assert_relative_eq!(w[0], a, max_relative = 1e-15);
        assert!(w[1..].iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn delta_zero_has_no_weights() {
        let xi = AtomicMeasure1D::dirac(0.0).unwrap();
        assert!(xi.weights(2).is_err());
        assert!(matches!(xi.rho(), Err(Error::NotIntegrable { .. })));
    }

    #[test]
    fn large_index_weights_stay_finite() {
        let xi = half_one_two();
        let w = xi.weight(5000).unwrap();
        assert_relative_eq!(w, 2f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn rho_values() {
        assert_relative_eq!(half_one_two().rho().unwrap(), 0.75);
        let (r, s, q) = (0.3, 0.7, 2.5);
        let xi = AtomicMeasure1D::from_pairs(&[(r, 1.0), (s, q)]).unwrap();
        assert_relative_eq!(xi.rho().unwrap(), r + s / q, max_relative = 1e-15);
    }

    #[test]
    fn backward_extension_examples() {
        let d1 = AtomicMeasure1D::dirac(1.0).unwrap();
        assert_eq!(d1.backward_extension(1.0).unwrap(), d1);

        let a = 0.4;
        let ext = d1.backward_extension(a).unwrap();
        assert_relative_eq!(ext.mass_at(0.0), 1.0 - a * a, max_relative = 1e-15);
        assert_relative_eq!(ext.mass_at(1.0), a * a, max_relative = 1e-15);

        let ext = half_one_two().backward_extension(1.0).unwrap();
        assert_relative_eq!(ext.mass_at(1.0), 0.5);
        assert_relative_eq!(ext.mass_at(2.0), 0.25);
        assert_relative_eq!(ext.mass_at(0.0), 0.25);

        // 1/rho = 4/3 < 1.44
        assert!(matches!(
            half_one_two().backward_extension(1.2),
            Err(Error::NotSubnormal { .. })
        ));
    }

    #[test]
    fn backward_extension_prepends_weight() {
        let xi: AtomicMeasure1D = "0.2@0.5,0.3@1,0.5@1.7".parse().unwrap();
        let alpha0 = 0.7;
        let ext = xi.backward_extension(alpha0).unwrap();
        let w_ext = ext.weights(6).unwrap();
        let w = xi.weights(5).unwrap();
        assert_relative_eq!(w_ext[0], alpha0, max_relative = 1e-13);
        for j in 0..5 {
            assert_relative_eq!(w_ext[j + 1], w[j], max_relative = 1e-13);
        }
    }

    #[test]
    fn product_extremal_marginal() {
        let d1 = AtomicMeasure1D::dirac(1.0).unwrap();
        let mu = AtomicMeasure2D::product(&d1, &d1);
        let (ext, mx) = extremal_and_marginal(&mu).unwrap();
        assert_eq!(ext.atoms(), &[Atom2 { s: 1.0, t: 1.0, mass: 1.0 }]);
        assert_eq!(mx, d1);

        let xi = half_one_two();
        let xi_a = xi.backward_extension(0.6).unwrap();
        let mu = AtomicMeasure2D::product(&xi_a, &xi);
        assert_eq!(mu.atoms().len(), 6);
        let (ext, _) = extremal_and_marginal(&mu).unwrap();
        assert_relative_eq!(ext.total_mass(), 1.0, max_relative = 1e-14);
        let ext_x = ext.marginal_x();
        for a in xi_a.atoms() {
            assert_relative_eq!(ext_x.mass_at(a.at), a.mass, max_relative = 1e-14);
        }
    }

    #[test]
    fn extremal_rejects_mass_on_axis() {
        let mu = AtomicMeasure2D::new(vec![Atom2 { s: 1.0, t: 0.0, mass: 1.0 }]).unwrap();
        assert!(mu.extremal().is_err());
    }

    #[test]
    fn domination_reports_witness() {
        let a: AtomicMeasure1D = "0.5@0,0.5@1".parse().unwrap();
        let b: AtomicMeasure1D = "0.4@0,0.6@1".parse().unwrap();
        let err = a.dominated_by(&b, 1e-12).unwrap_err();
        assert_eq!(err.at, 0.0);
        assert!(b.dominated_by(&"1@1".parse().unwrap(), 0.0).is_err());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("1@1,".parse::<AtomicMeasure1D>().is_err());
        assert!("0.5@1,0.5@1".parse::<AtomicMeasure1D>().is_err());
        assert!("-1@2".parse::<AtomicMeasure1D>().is_err());
    }
}
