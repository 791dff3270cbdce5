//! Command-line harness for `fbsurf`: experiment configs, CSV output in the layouts of
//! the plotting scripts, and the `solve`, `sample`, `geodesic` and `validate` commands.

pub mod commands;
pub mod config;
pub mod point;
pub mod table;
