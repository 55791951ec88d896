//! Computational one-dimensional dynamics on the edge of chaos.
//!
//! The crate builds stunted sawtooth maps (exactly, over the rationals),
//! polynomials of type b and the quadratic family; computes topological
//! entropy, kneading data and period sets; renormalizes period-doubling
//! maps; and locates the boundary between zero and positive entropy along
//! parameter paths, returning a certificate on each side.

pub mod boundary;
pub mod entropy;
pub mod error;
pub mod maps;
pub mod parallel;
pub mod periods;
pub mod rational;
pub mod renorm;
pub mod symbolic;

pub use error::{Error, Result};
pub use rational::Rational;
