//! Exact computation of simplicial-volume type invariants over seminormed
//! rings for finite semi-simplicial manifold models.
//!
//! The crate is organised bottom-up:
//!
//! * [`rings`]: ring tags, exact coefficients, valuations and seminorms;
//! * [`complex`]: semi-simplicial models, chains, transfers and cross products;
//! * [`homology`]: Smith normal form and everything derived from it;
//! * [`models`]: the explicit surface, sphere, torus and covering constructions;
//! * [`minimize`]: exact minimisation of ring-weighted ℓ¹-norms;
//! * [`bounds`]: an interval propagation engine over comparison rules;
//! * [`cli`] and [`selftest`]: the `svol` binary.

pub mod bounds;
pub mod cli;
pub mod complex;
pub mod error;
pub mod homology;
pub mod minimize;
pub mod models;
pub mod rational;
pub mod rings;
pub mod selftest;

pub use error::{Result, SvolError};
