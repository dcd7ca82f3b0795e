//! Command-line front end for `renyi-core`: JSON distributions in, CSV
//! tables and JSON reports out.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
