//! Files, ensembles and the command line around `ssd-core`.
//!
//! - [`spec`]: JSON distribution specs.
//! - [`output`]: run manifests and atomic CSV/JSON writers.
//! - [`runner`]: multi-threaded path ensembles.
//! - [`suites`]: the seeded checks behind `ssd verify`.
//! - [`cli`]: the `ssd` commands.

pub mod cli;
pub mod error;
pub mod output;
pub mod runner;
pub mod spec;
pub mod suites;

pub use error::CliError;

/// Version of the numerical core this build links against.
pub const CORE_VERSION: &str = "0.1.0";
