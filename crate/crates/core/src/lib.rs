//! Cohomology rings of configuration spaces of antipodal orbit spaces:
//! exact normal forms, derived generator layers, the `(Z_2)^k` action,
//! invariant subrings, assembled cohomology tables, and cat/TC bounds.

pub mod action;
pub mod algebra;
pub mod assembly;
pub mod error;
pub mod expr;
pub mod invariants;
pub mod linalg;
pub mod presentations;
pub mod scalar;
pub mod tc;

pub use algebra::{Element, Family, Gen, Monomial, Presentation};
pub use error::{Error, Result};
pub use scalar::{Coeff, Scalar};
