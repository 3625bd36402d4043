//! Graph generators and file formats.

pub mod formats;
pub mod generate;
