//! Convex polyhedral cusps with particles from hyperbolic cone metrics on
//! the torus.
//!
//! A cone metric ([`ConeSurface`]) is realized by maximizing the concave total
//! scalar curvature over truncated particle lengths ([`solver::solve_cusp`]);
//! [`develop::develop`] lays out the result in the upper half-space.
//!
//! Everything is generic over [`scalar::Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`.

pub mod cusp;
pub mod develop;
pub mod functional;
pub mod hyperbolic;
pub mod json;
pub mod prism;
pub mod quadrature;
pub mod samples;
pub mod scalar;
pub mod solver;
pub mod surface;

pub use develop::{develop, DevelopedCusp, KleinMesh, Motion};
pub use scalar::Scalar;
pub use surface::SurfaceDoc;

pub type ConeSurface = surface::ConeSurface<f64>;
pub type CuspState = cusp::CuspState<f64>;
pub type Horoprism = prism::Horoprism<f64>;
pub type HessianMatrix = functional::HessianMatrix<f64>;
pub type SolveOptions = solver::SolveOptions<f64>;
pub type SolveReport = solver::SolveReport<f64>;
pub type SolveError = solver::SolveError<f64>;
