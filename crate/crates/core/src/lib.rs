//! Numerical geometry of the variety of rank-`n` idempotent `d × d` complex
//! matrices, viewed as the cotangent bundle `T*Gr(n, ℂᵈ)`.
//!
//! Points are projections `q² = q`, `Tr q = n`; tangent vectors at `q` are the
//! `A` with `qA + Aq = A`. On top of that the crate provides the complex
//! structures and forms ([`geometry`]), the bundle projection, connection and
//! compactifications ([`bundle`]), the hat map and Poisson bracket
//! ([`poisson`]), the two-sphere quadric model ([`quadric`]) and Haar
//! Monte-Carlo integration over the Grassmannian ([`haar`]).

pub mod bundle;
pub mod error;
pub mod geometry;
pub mod haar;
pub mod linalg;
pub mod poisson;
pub mod quadric;
pub mod rng;
pub mod variety;

pub use error::{Error, Result};
pub use linalg::{commutator, conj_flow, expm, haar_unitary, hs_inner, ComplexMatrix, C64, I};
pub use variety::{
    base_projection, pushforward, random_point, random_tangent, tangent_project, validate_point, FiberVector,
    HermitianPoint, PointDiagnostics, ProjectionPoint, TangentVector,
};
