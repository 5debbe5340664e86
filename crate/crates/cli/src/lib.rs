//! Library surface of the `dtl` command-line tool: file formats and the
//! command dispatcher, exposed for integration testing.

pub mod commands;
pub mod io;

pub use commands::run;
