//! Command-line front end for nhcech: JSON diagram documents, the built-in
//! gallery, and deterministic reports.

pub mod commands;
pub mod document;
pub mod gallery;
pub mod report;

pub use commands::{run_document, run_file, run_gallery, Command, Options};
pub use document::{load_diagram, CliError, DiagramDocument};
pub use report::{BatchReport, RunReport};
