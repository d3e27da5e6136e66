//! Pencils of quadrics on complex vector spaces and second fundamental
//! forms on nonsingular intersections of two quadric hypersurfaces.
//!
//! The crate computes, in double precision:
//!
//! - discriminants of pencils and simultaneous diagonalization (standard
//!   bases) of good pairs of quadratic forms;
//! - the discriminant of the second fundamental form on the variety
//!   `X ⊂ P^{n+2}` cut by two diagonal quadrics, both in closed form and by
//!   brute-force restriction to a tangent frame;
//! - Möbius-orbit invariants of binary forms, standing in for the moduli of
//!   pencils;
//! - the three-dimensional kernel of the moduli map at a regular point, its
//!   poised-subspace structure and the refined moduli data it carries;
//! - rank certificates for injectivity of the refined moduli map;
//! - reconstruction of the defining parameters of a variety from refined
//!   moduli samples via a homogeneous Vandermonde solve.

// index loops mirror the matrix formulas better than iterator chains here
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod json;
pub mod moduli;
pub mod numeric;
pub mod pencil;
pub mod poised;
pub mod reconstruct;
pub mod sample;
pub mod suites;
pub mod variety;

pub use error::{Error, Result};
