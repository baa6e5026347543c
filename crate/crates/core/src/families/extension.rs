//! Subnormal backward extension of a 2-variable shift from the Berger
//! measure `mu_M` of its restriction to `k2 >= 1`.

use serde::Serialize;

use super::measure::{Atom, Atom2, AtomicMeasure1D, AtomicMeasure2D, DominationFailure};
use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionFailure {
    /// `1/t` is not integrable against `mu_M`.
    NotIntegrable,
    /// `beta00^2 ||1/t|| > 1`
    ColumnTooLarge,
    /// `beta00^2 ||1/t|| (mu_M)_ext^X <= xi0` fails at some atom.
    NotDominated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extension2D {
    pub subnormal: bool,
    pub failure: Option<ExtensionFailure>,
    /// `beta00^2 ||1/t||_{L1(mu_M)}`, when defined.
    pub scale: Option<f64>,
    pub witness: Option<DominationFailure>,
    pub measure: Option<AtomicMeasure2D>,
}

impl Extension2D {
    fn fail(failure: ExtensionFailure, scale: Option<f64>, witness: Option<DominationFailure>) -> Self {
        Extension2D { subnormal: false, failure: Some(failure), scale, witness, measure: None }
    }
}

/// Checks integrability of `1/t`, `beta00^2 ||1/t|| <= 1` and
/// `beta00^2 ||1/t|| (mu_M)_ext^X <= xi0` atomwise, and on success returns
///
/// `beta00^2 ||1/t|| (mu_M)_ext + (xi0 - beta00^2 ||1/t|| (mu_M)_ext^X) x delta_0`.
pub fn backward_extension_2d(mu_m: &AtomicMeasure2D, beta00: f64, xi0: &AtomicMeasure1D) -> Result<Extension2D> {
    if !(beta00.is_finite() && beta00 > 0.0) {
        return Err(Error::param("beta00", "must be positive"));
    }
    let norm = match mu_m.inv_t_norm() {
        Ok(n) => n,
        Err(Error::NotIntegrable { .. }) => return Ok(Extension2D::fail(ExtensionFailure::NotIntegrable, None, None)),
        Err(e) => return Err(e),
    };
    let c = beta00 * beta00 * norm;
    if c > 1.0 + tol::IDENTITY {
        return Ok(Extension2D::fail(ExtensionFailure::ColumnTooLarge, Some(c), None));
    }
    let ext = mu_m.extremal()?;
    let lhs = ext.marginal_x().scaled(c)?;
    let mass_tol = tol::IDENTITY * xi0.total_mass().max(1.0);
    if let Err(w) = lhs.dominated_by(xi0, mass_tol) {
        return Ok(Extension2D::fail(ExtensionFailure::NotDominated, Some(c), Some(w)));
    }
    let mut atoms: Vec<Atom2> = ext.atoms().iter().map(|a| Atom2 { mass: c * a.mass, ..*a }).collect();
    for &Atom { at, mass } in xi0.atoms() {
        let rest = mass - lhs.mass_at(at);
        if rest >= tol::RESIDUAL_MASS {
            atoms.push(Atom2 { s: at, t: 0.0, mass: rest });
        }
    }
    Ok(Extension2D {
        subnormal: true,
        failure: None,
        scale: Some(c),
        witness: None,
        measure: Some(AtomicMeasure2D::new(atoms)?),
    })
}
