//! Document-driven front end for the `logfan` library.

pub mod document;
pub mod error;
pub mod objects;
pub mod report;
pub mod runner;
pub mod suite;
