//! File formats, a shared on-disk basis cache and the `ktg` command-line
//! front-end over [`ktg_core`].

pub mod cache;
pub mod cli;
pub mod error;
pub mod format;
pub mod report;

pub use cache::BasisCache;
pub use error::{CliError, Result};
