//! Command-line front end for `hilbloc`.
pub mod acceptance;
pub mod commands;
pub mod expr;
pub mod report;

pub use commands::{dispatch, Output};
pub use expr::{parse_ideal_expr, IdealExpr};
pub use report::{Config, Format, Report};
