use crate::lattice::Point;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("weight {value} at {at} is not a positive finite number")]
    InvalidWeight { at: Point, value: f64 },

    #[error("sequence weight {value} at index {index} is not a positive finite number")]
    InvalidSequenceWeight { index: usize, value: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not symmetric (max relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("need moments up to index {needed}, only {available} available")]
    InsufficientMoments { needed: usize, available: usize },

    #[error("1/t is not integrable: measure has mass {mass} at the origin")]
    NotIntegrable { mass: f64 },

    #[error("backward extension is not subnormal: alpha0^2 = {alpha0_sq} exceeds 1/rho = {limit}")]
    NotSubnormal { alpha0_sq: f64, limit: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("construction failed at {at}: weight {value} reached the bound {bound}")]
    ConstructionFailed { at: Point, value: f64, bound: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
