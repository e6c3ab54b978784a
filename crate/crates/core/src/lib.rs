//! Curvature diagnostics for tracially symmetric quantum Markov semigroups on
//! matrix algebras.
//!
//! The crate builds Lindblad generators from jump operators, evaluates the
//! carré du champ calculus, certifies Bakry–Émery and gradient-estimate
//! curvature conditions, and traces entropy along the heat flow.

// Parameter guards are written `!(x > 0.0)` so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod curvature;
pub mod descriptor;
pub mod error;
pub mod flowfunc;
pub mod matcore;
pub mod means_ge;
pub mod report;
pub mod sampling;
pub mod semigroups;

pub use error::{Error, Result};
pub use matcore::{AlgElement, SuperOp, C64};
pub use semigroups::LindbladGenerator;
