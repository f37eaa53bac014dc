//! Experiment driver for the q-plate propagation library: configuration,
//! single runs, parameter scans, and the verification suite, plus the CSV
//! codec for scan tables.

pub mod config;
pub mod csv;
pub mod runner;
pub mod verify;

pub use config::{apply_set_override, load_config, ConfigError, RunConfig};
pub use csv::{parse_scan_csv, write_scan_csv, CsvError, ScanRow};
pub use runner::{run_scan, run_single, RunError, SingleOutcome};
pub use verify::{fit_cosine, run_verify, Status, VerifyReport};
