//! Experiment harness: config-driven sweeps, acceptance suites, CSV rows and SVG plots.

pub mod acceptance;
pub mod app;
pub mod config;
pub mod ops;
pub mod rows;
pub mod svg;
pub mod util;

pub use acceptance::{run_criterion, run_suite, CriterionReport, SuiteOptions, SuiteReport};
pub use config::ExperimentConfig;
pub use rows::ResultRow;
