//! Command-line driver and live teaching-session service for `manner-core`.

pub mod commands;
pub mod service;
pub mod session;
