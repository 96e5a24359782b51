//! Adaptive s-step GMRES.
//!
//! The crate is organised bottom-up:
//!
//! - [`sparse`]: CSR storage, Matrix Market ingest, generators, equilibration, ILU(0).
//! - [`dense`]: small dense kernels (partial Cholesky with condition monitoring,
//!   incremental condition estimation, SVD condition, Hessenberg eigenvalues, Givens).
//! - [`basis`]: Leja ordering, change-of-basis matrices and the matrix powers kernel.
//! - [`ortho`]: BCGS2 with partial CholQR.
//! - [`estimator`]: initial step-size prediction from Ritz values.
//! - [`solver`]: MGS-GMRES baseline and the adaptive s-step driver.
//! - [`harness`]: experiment manifests, trace files and run comparison.
//!
//! Data-parallel kernels (SpMV, block inner products, block updates) run on rayon
//! when the `parallel` feature is enabled and fall back to plain iterators otherwise.
//! Every reduction is evaluated in a fixed order, so results are bitwise identical
//! regardless of the thread count.

// `!(x > 0.0)` is used on purpose so NaN is rejected too, and the dense
// kernels read more naturally with index loops.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod basis;
pub mod counters;
pub mod dense;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod operator;
pub mod ortho;
pub mod par;
pub mod solver;
pub mod sparse;

pub use counters::ReductionCounter;
pub use error::{Error, Result};
pub use sparse::SparseMatrix;

/// Unit roundoff of IEEE double precision, 2^-53.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;
