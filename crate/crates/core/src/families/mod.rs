//! Named shift families, Berger measures and backward extensions.

pub mod diagonal;
pub mod example46;
pub mod extension;
pub mod fig2;
pub mod measure;
pub mod quasinormal;

use crate::lattice::{DiagramSpec, WeightDiagram, WeightSeq};

fn infallible(spec: DiagramSpec) -> WeightDiagram {
    WeightDiagram::from_spec(spec).expect("valid sequences give a valid diagram")
}

/// `(I (x) W_sigma, W_tau (x) I)`: `alpha_k = sigma_{k1}`, `beta_k = tau_{k2}`.
pub fn build_tensor(sigma: WeightSeq, tau: WeightSeq) -> WeightDiagram {
    infallible(DiagramSpec::Tensor { sigma, tau })
}

/// `Theta(W_omega)`: `alpha_k = beta_k = omega_{k1+k2}`.
pub fn build_diagonal_core(omega: WeightSeq) -> WeightDiagram {
    infallible(DiagramSpec::DiagonalCore { omega })
}

pub fn build_drury_arveson() -> WeightDiagram {
    infallible(DiagramSpec::DruryArveson)
}
