//! Constraint analysis for linear Dirac dynamical systems in exact rational arithmetic,
//! with LC circuits as the main worked application.

pub mod error;
pub mod linalg;
pub mod symplectic;
pub mod dirac;
pub mod cad;
pub mod constraints;
pub mod circuits;
pub mod corpus;
pub mod dynamics;
pub mod selftest;

pub use error::{Error, Result};
