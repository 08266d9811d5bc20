//! Weighted radial Sobolev spaces on `(0, R]`: quadrature, norms and
//! embeddings, Green operators, Moser sequences and radial biharmonic
//! problems with Navier conditions.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod functions;
pub mod moser;
pub mod operators;
pub mod pde;
pub mod quadrature;
pub mod spaces;
pub mod special;

pub use error::{Error, Result};
