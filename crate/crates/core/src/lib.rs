//! Workbench for the finite Weyl-Heisenberg group in the phase-permutation
//! basis: exact monomial arithmetic, Clifford monomiality checks, Zauner
//! structure, SIC fiducial equations and searches, and theta functions with
//! rational characteristics.

pub mod clifford;
pub mod error;
pub mod exact;
pub mod fiducial_file;
pub mod heisenberg;
pub mod sicmoduli;
pub mod sicsearch;
pub mod theta;

pub use error::{Error, Result};
