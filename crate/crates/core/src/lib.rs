//! Exact computations of Hochschild, cyclic and cdh-fiber homology of
//! weighted homogeneous algebras over the rationals, plus the elliptic-curve
//! bookkeeping used for twisted projective bundles.

pub mod error;
pub mod algebra;
pub mod linalg;
pub mod hochschild;
pub mod kahler;
pub mod cdh;
pub mod elliptic;
pub mod table;
pub mod corpus;

pub use error::{Error, ErrorClass, Result};
pub use linalg::{Rational, SparseMatrix, SparseVector};
