//! Reference computations and the acceptance grid for `specsense-core`.
//!
//! [`oracle`] holds deliberately simple numerics (fixed-step Simpson and
//! trapezoid rules) used to cross-check the library, and [`criteria`] runs
//! the nine acceptance checks.

pub mod criteria;
pub mod oracle;

pub use criteria::{run_all, run_criterion, CriterionReport, CRITERION_COUNT};
