//! Command-line driver, file formats and seeded shape generators on top of
//! `insulation-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod formats;
pub mod output;
pub mod shapes;

pub use cli::Cli;
pub use commands::execute;
