//! Batch front end for `varlab-core`: CSV ingest, analysis reports and the
//! subcommand bodies behind the `varlab` binary.

pub mod commands;
pub mod error;
pub mod ingest;
pub mod report;

pub use commands::OutputFormat;
pub use error::CliError;
pub use ingest::{dump_csv, ingest_csv, ingest_str, Dataset, IngestOptions};
pub use report::{run_report, AnalysisReport};
