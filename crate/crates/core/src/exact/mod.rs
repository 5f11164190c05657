//! Exact root-of-unity arithmetic, monomial matrices and their dense forms.

pub mod dense;
pub mod monomial;
pub mod phase;

pub use dense::{DenseMatrix, StateVector};
pub use monomial::{default_max_denom, extract_monomial, MonomialMatrix};
pub use phase::PhaseExp;
