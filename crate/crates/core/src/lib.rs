//! Numerical laboratory for multiplication by `z` on weighted polynomial
//! spaces `P²(ν)` and the Möbius behaviour of contractions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptote;
pub mod constructions;
pub mod error;
pub mod linalg;
pub mod measure;
pub mod operator_lab;
pub mod poly_space;
pub mod quadrature;
pub mod special;

pub use error::{LabError, Result};
