//! Computational toolkit for commuting 2-variable weighted shifts.
//!
//! A shift `W = (T1, T2)` on `l2(Z+^2)` is described by two positive weight
//! functions: `T1 e_k = alpha_k e_{k+e1}` and `T2 e_k = beta_k e_{k+e2}`.
//! Everything here works on those weights directly:
//!
//! * [`lattice`]: weight diagrams, moments, norms, restrictions;
//! * [`transforms`]: toral and spherical Aluthge transforms;
//! * [`positivity`]: Hankel and moment matrices, k-hyponormality sweeps;
//! * [`families`]: named shift families, atomic Berger measures and
//!   backward extensions, closed-form parameter regions;
//! * [`spectra`]: Taylor-spectrum radii for tensor-core shifts,
//!   Drury–Arveson asymptotics, continuity probes.

pub mod error;
pub mod families;
pub mod lattice;
pub mod positivity;
pub mod spectra;
pub mod tol;
pub mod transforms;

pub use error::{Error, Result};
pub use families::measure::{Atom, Atom2, AtomicMeasure1D, AtomicMeasure2D};
pub use lattice::{LatticeWindow, Point, SeqTail, Tail, WeightDiagram, WeightSeq};
