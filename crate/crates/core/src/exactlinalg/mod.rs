//! Exact integer and rational matrix algebra.

mod matrix;
mod normal_form;
mod sublattice;

pub use matrix::{int, rat, rat_from_int, vector, IntMatrix, Matrix, RatMatrix, Scalar};
pub use normal_form::{elementary_divisors, hermite_normal_form, smith_normal_form, SnfDecomposition};
pub use sublattice::{
    dual_basis, integer_kernel, integral_preimage, intersect_column_lattices, kernel_mod, lattice_coordinates,
    quotient_divisors, same_lattice,
};
