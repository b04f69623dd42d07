//! Pseudofermionic realisations of the one- and two-qubit Pauli groups, and the
//! dynamics of the PT-symmetric LC-circuit models that produce them.

#![allow(clippy::op_ref, clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod circuits;
pub mod error;
pub mod linalg;
pub mod pauli;
pub mod pseudofermion;
pub mod report;
pub mod suite;
pub mod xbasis;

pub use error::{Error, Result};
pub use num_complex::Complex64;
