//! Command-line driver: run configuration, verification suites, reports
//! and exports.

pub mod app;
pub mod config;
pub mod export;
pub mod report;
pub mod suites;
