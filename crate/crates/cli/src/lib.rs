//! Command-line front end: job configuration, JSON reports and the
//! acceptance suite.

pub mod config;
pub mod report;
pub mod suite;
