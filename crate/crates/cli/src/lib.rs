//! File handling, dispatch and reporting behind the `behmm` binary.

pub mod error;
pub mod files;
pub mod report;
pub mod run;

pub use error::{exit, CliError, CliResult};
pub use files::{load_model, load_query, parse_model, parse_query, ModelFile, QueryFile, QueryKind};
pub use report::Report;
pub use run::{run_query, Options};
