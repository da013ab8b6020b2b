//! Explicit monotone finite-volume solver for Hamilton–Jacobi equations
//! `∂•u + H(x, t, ∇_Γ u) = 0` on closed evolving triangulated surfaces.

// `!(a <= b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod cli;
pub mod control_volume;
pub mod error;
pub mod geometry;
pub mod hamiltonian;
pub mod io;
pub mod solver;
pub mod surfaces;
pub mod verify;

pub use error::{Error, Result};
