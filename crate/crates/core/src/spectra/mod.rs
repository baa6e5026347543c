//! Spectral radii of tensor-core shifts, Drury–Arveson asymptotics and
//! continuity probes.

pub mod da;
pub mod probe;
pub mod spectrum;

pub use da::{da_aluthge_gap, da_commutators, da_verify, DaCommutators, DaSummary, GapKind, GapReport};
pub use probe::{continuity_probe, probe_schedule, ProbeReport};
pub use spectrum::{predicted_spectrum, spectral_invariance_check, InvarianceReport, SpectrumDescriptor};
