//! Exact linear algebra over `F_p` and `Z`, and polynomial factorization over `F_p`.

pub mod fp;
pub mod int;
pub mod poly;
pub mod sparse;

pub use fp::{is_prime, nullspace, nullspace_basis, rref, solve, solve_matrix, FpMatrix, Subspace};
pub use int::{smith_normal_form, IntMatrix, SmithForm};
pub use poly::{charpoly, factor_poly, generalized_kernel, FpPoly};
pub use sparse::SparseEchelon;
