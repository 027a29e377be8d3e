//! Configuration-driven front end for `accel-qed-core`.
//!
//! A run is described by a JSON document (see [`config`]), evaluated over its
//! parameter grids on a worker pool ([`run`]) and emitted as a CSV or JSON
//! table ([`output`]) with one row per grid point.

pub mod config;
pub mod error;
pub mod inputs;
pub mod output;
pub mod run;

pub use config::{Command, Format, RunConfig};
pub use error::CliError;
pub use run::{execute, Options, Report};
