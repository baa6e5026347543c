//! Weight diagrams over `Z+^2`, their moments, norms and restrictions.

mod diagram;
mod point;
mod seq;

pub use diagram::{CommutativityReport, DiagramSpec, MomentTable, Norms, Tail, WeightDiagram};
pub use point::{LatticeWindow, Point};
pub use seq::{SeqTail, WeightSeq};
