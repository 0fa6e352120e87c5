//! File formats and command-line driver for `fdg-core`.

pub mod cli;
pub mod fixtures;
pub mod formats;
pub mod lpfile;
