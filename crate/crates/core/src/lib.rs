//! Curvature and Ricci flow of left-invariant metrics on the compact
//! four-dimensional homogeneous geometries.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the bottom of this file fix the scalar to `f64`, which is what the I/O
//! layer and the command-line tool use.

pub mod closed_forms;
pub mod config;
pub mod curvature;
pub mod diagonalization;
pub mod error;
pub mod flow;
pub mod io;
pub mod lie_algebra;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod tables;
pub mod verify;

pub use closed_forms::{
    dependent_components, envelope, exact_component, exact_metric, implicit_a, implicit_metric,
    DerivedConstants, EnvelopeFamily, ImplicitFamily, SolutionForm, SolutionKind,
};
pub use curvature::{
    curvature_norm, ricci_form, ricci_onb, ricci_tensor, scalar_curvature, sectional_curvature,
    sectional_table, u_operator, CurvatureModel, CurvatureReport, DiagonalMetric, PAIRS,
};
pub use diagonalization::{
    branch_conditions, family_condition, lambda_template, offdiag_ricci, verify_preservation,
    Branch, FamilyVerdict, PreservationReport,
};
pub use error::{Error, Result};
pub use flow::{
    asymptotic_profile, classify_singularity, integrate, monitors_for, product_flow, rhs,
    validity_interval, Family, FlowProblem, FlowTrajectory, Geometry, IntegrateOptions, Monitor,
    SingularityType, Termination,
};
pub use lie_algebra::{
    build_structure_constants, jacobi_residual, solve_sol_mn, transform_basis, CubicRoots,
    FrameTransform, GeometryClass, GeometrySpec, StructureConstants,
};
pub use scalar::Real;

pub type Constants = lie_algebra::StructureConstants<f64>;
pub type Spec = lie_algebra::GeometrySpec<f64>;
pub type Metric = curvature::DiagonalMetric<f64>;
pub type Report = curvature::CurvatureReport<f64>;
pub type Frame = lie_algebra::FrameTransform<f64>;
pub type Problem = flow::FlowProblem<f64>;
pub type Trajectory = flow::FlowTrajectory<f64>;
pub type Options = flow::IntegrateOptions<f64>;
