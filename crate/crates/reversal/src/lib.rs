//! File formats, reports and the command-line workflow around
//! [`reversal_core`].
//!
//! ```no_run
//! use reversal::analysis::{run_analysis, AnalysisConfig};
//! use reversal::report::{emit_report, Format};
//!
//! let config = AnalysisConfig::new("crates/reversal/data/synthetic_diet.csv", "cholesterol", "hdi");
//! let report = run_analysis(&config).unwrap();
//! print!("{}", String::from_utf8(emit_report(&report, Format::Text)).unwrap());
//! ```

#![forbid(unsafe_code)]

pub mod analysis;
pub mod data;
pub mod error;
pub mod report;
pub mod synthetic;

pub use error::{AppError, Result};
