//! Exact arithmetic over ℚ(√m) and exact linear algebra over ℚ and ℤ.
//!
//! Every rationality and classification decision in the crate is taken here,
//! without floating point: field elements are pairs of reduced big rationals,
//! kernels come from Gauss-Jordan elimination, and lattices are handled
//! through Smith and Hermite normal forms over `BigInt`.

mod field;
mod integer;
mod matrix;

pub use field::{field_arith, is_square_free, FieldOp, FieldScalar};
pub use integer::{
    clear_denominators, hermite_normal_form, saturate_lattice, smith_normal_form, to_rational,
    SmithForm,
};
pub use matrix::{
    field_kernel, rational_kernel, Echelon, ExactMatrix, FieldMatrix, IntMatrix, RationalMatrix,
    Scalar,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("discriminant mismatch: sqrt({0}) vs sqrt({1})")]
    DiscriminantMismatch(u64, u64),
    #[error("discriminant {0} is not a square-free positive integer")]
    NotSquareFree(u64),
    #[error("rows of unequal length")]
    Ragged,
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
}
