//! Exit codes: 0 success, 1 contract violation, 2 usage error, 3 I/O or
//! integrity error.

use sgbench_core::CoreError;
use sgbench_models::ModelError;
use std::fmt;

/// Bad flags, config or arguments.
#[derive(Debug)]
pub struct Usage(pub String);

/// The command ran but its postcondition does not hold.
#[derive(Debug)]
pub struct Contract(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Contract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}
impl std::error::Error for Contract {}

pub const CONTRACT: u8 = 1;
pub const USAGE: u8 = 2;
pub const IO: u8 = 3;

fn core_code(e: &CoreError) -> u8 {
    match e {
        CoreError::Config(_) | CoreError::UnknownDataset(_) => USAGE,
        CoreError::Generation { .. } | CoreError::Pipeline(_) => CONTRACT,
        _ => IO,
    }
}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() {
            return USAGE;
        }
        if cause.is::<Contract>() {
            return CONTRACT;
        }
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            return core_code(e);
        }
        if let Some(e) = cause.downcast_ref::<ModelError>() {
            return match e {
                ModelError::Core(c) => core_code(c),
                ModelError::Config(_) => USAGE,
                ModelError::Io(_) | ModelError::Checkpoint { .. } | ModelError::Json(_) => IO,
                _ => CONTRACT,
            };
        }
        if cause.is::<std::io::Error>() || cause.is::<ureq::Error>() || cause.is::<zip::result::ZipError>() {
            return IO;
        }
    }
    CONTRACT
}
