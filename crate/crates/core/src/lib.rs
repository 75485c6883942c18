//! Stateful clinical inquiry: extraction, state folding, gap analysis,
//! belief tracking, hybrid retrieval, action planning, record projection and
//! the pilot evaluation harness.

// `!(x > y)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod belief;
pub mod emr;
pub mod error;
pub mod eval;
pub mod extraction;
pub mod hash;
pub mod io;
pub mod model;
pub mod pack;
pub mod planner;
pub mod retrieval;
pub mod session;
pub mod state;

pub use error::{Error, Result};
