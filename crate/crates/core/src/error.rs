use thiserror::Error;

use crate::lie_algebra::GeometryClass;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("class {0} has no Lie-group chart (product geometries use the closed-form path)")]
    UnsupportedClass(GeometryClass),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frame transform is singular (|det| = {det:e})")]
    SingularTransform { det: f64 },

    #[error("metric coefficient {index} is not positive ({value})")]
    NonPositiveMetric { index: usize, value: f64 },

    #[error("structure constants are not unimodular (max |tr ad| = {residual:e})")]
    NotUnimodular { residual: f64 },

    #[error("frame index {0} out of range 1..4")]
    IndexOutOfRange(usize),

    #[error("sectional curvature needs two distinct frame vectors, got ({0}, {0})")]
    DegeneratePlane(usize),

    #[error(
        "Ricci tensor left the diagonal family at t = {t}: max off-diagonal |Ric| = {magnitude:e}"
    )]
    OffDiagonalRicci { t: f64, magnitude: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("no closed-form solution for {0}")]
    NoClosedForm(String),

    #[error("t = {t} lies outside the validity interval ({lo}, {hi})")]
    OutsideValidity { t: f64, lo: f64, hi: f64 },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("negative discriminant {0:e} while reconstructing metric components")]
    NegativeDiscriminant(f64),

    #[error("trajectory has {got} samples, at least {need} are required")]
    TooFewSamples { got: usize, need: usize },

    #[error("trajectory is not immortal: {0}")]
    FiniteTime(String),

    #[error("unknown or inconsistent family: {0}")]
    UnknownFamily(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
