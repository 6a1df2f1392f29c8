//! Shared test helpers: dense reference implementations and random inputs.
#![allow(dead_code)]

pub mod checks;
pub mod gen;
pub mod oracle;

use std::path::PathBuf;

/// Path of a checked-in fixture of the core crate.
pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("core")
        .join("fixtures")
        .join(name)
}
