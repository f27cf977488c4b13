//! Library surface of the leakbench CLI: configuration parsing, CSV
//! ingestion, experiment execution, and report rendering.

pub mod config;
pub mod csv_load;
pub mod report;
pub mod runner;
pub mod split;

pub use config::{Command, RunConfig};
pub use csv_load::{load_csv, CsvSchema, LoadReport};
pub use report::emit_report;
pub use runner::{execute, read_results, write_artifacts, ResultsDocument, ResultsPayload};
