//! File formats, reports and benchmark IO for the `el-abduct` command.

pub mod bench;
pub mod clock;
pub mod report;
pub mod syntax;

pub use clock::WallClock;
pub use report::Report;
pub use syntax::{parse_document, parse_problem, ParseError, ProblemFile};
