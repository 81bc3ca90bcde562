//! In-repo dense and structured complex linear algebra.
//!
//! Everything the solvers need lives here: dense LU with partial pivoting,
//! Hessenberg reduction plus shifted-QR eigenvalues, a cyclic-tridiagonal
//! solver (fold-reordered banded LU with pivoting), and power iteration for
//! operator norms. Dimensions stay in the low thousands, so determinism and
//! portability win over linking an external backend.

pub mod banded;
pub mod cmatrix;
pub mod eig;
pub mod m2;
pub mod power;

pub use banded::CyclicTridiag;
pub use cmatrix::{CMatrix, LuFactors};
pub use eig::eigenvalues;
pub use m2::M2;
pub use power::operator_norm;
