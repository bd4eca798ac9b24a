//! Genus-one Hurwitz Frobenius manifolds and their real doubles.
//!
//! Special functions on the torus, the covering map from branch points,
//! Schiffer and Bergman kernels, flat coordinates of four Frobenius structures,
//! their closed-form prepotentials, and a numerical verification layer for
//! WDVV, quasihomogeneity and tau-function relations.

pub mod cauchy;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod frobenius;
pub mod kernels;
pub mod prepotential;
pub mod specialfn;
pub mod torus_cover;
pub mod wdvv;

pub use error::{Error, Result};
pub use frobenius::{Kind, StructureKind};
pub use num_complex::Complex64 as C64;
pub use torus_cover::BranchTriple;
