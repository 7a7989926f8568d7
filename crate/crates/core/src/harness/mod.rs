//! Configuration, verification runs, and reporting for the `birefl` tool.

pub mod config;
pub mod report;
pub mod run;

pub use config::{FamilySpec, GridSpec, RunConfig};
pub use report::{PointRecord, VerificationReport};
pub use run::{cmd_continue_field, cmd_kernel_dump, cmd_testgen_dump, cmd_verify};
