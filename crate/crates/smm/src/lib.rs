//! File formats, reports and the `smm` command-line front end.

pub mod cli;
pub mod formats;
pub mod report;
