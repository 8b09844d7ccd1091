//! Common information, Gray-Wyner rate regions and lossy-source solvers.

// `!(x >= 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod audit;
pub mod error;
pub mod exec;
pub mod gray_wyner;
pub mod prob;
pub mod closed_form;
pub mod common_info;
pub mod rd;
pub mod synthesis;

pub use error::{Error, Result};
pub use exec::Exec;
