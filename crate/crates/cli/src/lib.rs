//! Library surface behind the `clqa` binary: file formats, manifest
//! plumbing, config resolution, and the command bodies, factored out so
//! integration tests can drive them in-process.

pub mod commands;
pub mod config;
pub mod errors;
pub mod formats;
pub mod imgio;
pub mod manifest;
