//! Command-line front end: configs, presets, sweeps and table output.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod presets;
pub mod svg;
pub mod table;
