//! Exact and numerical verification of sub-Laplacian identities on
//! quaternionic contact model spaces.
//!
//! - [`quat`], [`decomp`]: hypercomplex triples and invariant decompositions
//! - [`poly`], [`heisenberg`]: exact calculus on the flat quaternionic Heisenberg group
//! - [`integral`]: exact Gaussian-ring integration and integral identities
//! - [`sphere`]: floating-point model of the round 3-Sasakian sphere
//! - [`constants`]: closed-form constants and their consistency identities

pub mod constants;
pub mod decomp;
pub mod error;
pub mod heisenberg;
pub mod integral;
pub mod matrix;
pub mod poly;
pub mod quat;
pub mod random;
pub mod scalar;
pub mod sphere;

pub use error::{QcError, Result};
pub use matrix::Mat;
pub use poly::Poly;
pub use scalar::{rat, Rational, Scalar};
