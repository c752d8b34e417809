//! Command-line front end: configuration, seeded sampling, suites and JSON reports.

pub mod commands;
pub mod report;
pub mod sampler;
pub mod suites;
