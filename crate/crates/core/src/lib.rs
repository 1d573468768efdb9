//! Universal sampling discretization and sparse recovery over bounded
//! dictionaries.
//!
//! The crate covers finite dictionaries on the torus and on `[0, 1]`,
//! certificates that a point set discretizes the `L_2` norm uniformly over
//! all `v`-sparse subspaces, greedy and least-squares recovery from samples,
//! a deterministic failure certificate for the sine system, and numerical
//! entropy estimates for finite clouds.

pub mod combin;
pub mod dictionary;
pub mod discretization;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod lowerbound;
pub mod recovery;
mod par;
pub mod rng;
pub mod sampling;

pub use dictionary::{Dictionary, Domain, DomainKind, Quadrature, SparseCoefficients};
pub use error::{Error, Result};
pub use sampling::{PointSet, SamplingMode};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
