//! Fuzzy-inference test case prioritization.
//!
//! A Mamdani fuzzy engine driven by an expert rule base scores each test
//! case from its execution time and historical failure rate. Recently
//! updated tests are promoted one priority level. The ranking is then turned
//! into an execution plan that runs every prerequisite before its
//! dependents, and a simulation harness compares plans by the time they
//! take to reveal a declared set of faults.
//!
//! ```
//! use fuzzy_tcp::{defaults, tcp};
//!
//! let engine = defaults::engine();
//! let dataset = defaults::dataset();
//! let ranked = tcp::prioritize(dataset.tests(), &engine).unwrap();
//! let plan = tcp::schedule(&ranked, &dataset, tcp::ScheduleMode::RunOnce).unwrap();
//! assert_eq!(plan.steps.len(), 20);
//! ```

pub mod cli;
pub mod defaults;
pub mod elicitation;
mod error;
pub mod eval;
pub mod fuzzy;
pub mod inference;
pub mod io;
pub mod tcp;

pub use error::{Error, Result};
