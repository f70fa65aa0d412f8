//! Exact linear algebra over the rationals: matrices, row reduction, and canonical
//! subspaces with the lattice operations the rest of the crate is built on.

mod affine;
mod map;
mod matrix;
pub mod rational;
mod solve;
mod subspace;

pub use affine::AffineSubspace;
pub use map::AffineMap;
pub use matrix::Matrix;
pub use rational::{parse_rational, Rational, Vector};
pub use solve::{kernel, rref, Rref, Solver};
pub use subspace::Subspace;
