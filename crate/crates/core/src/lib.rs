//! Exact computations in even unimodular lattices: rational isometries of
//! the K3 lattice, their cyclic type and double orbits, discriminant forms,
//! the Mukai pairing and kappa-class kernels, and Chern character identities.

pub mod chern;
pub mod cli;
pub mod error;
pub mod exactlinalg;
pub mod isometry;
pub mod lattices;
pub mod mukai;
pub mod orbits;
pub mod sampling;

pub use error::{Error, Result};
