//! Command-line front end for `piltz-core`: field configuration files, the
//! on-disk sieve cache, thread-parallel drivers and the acceptance suite.

pub mod cache;
pub mod cli;
pub mod config;
pub mod error;
pub mod parallel;
pub mod verify;

pub use error::AppError;
