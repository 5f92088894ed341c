//! Workspace files, trace export and the `ars` command-line driver for
//! regular asynchronous systems. The semantics live in [`ars_core`].

pub mod cli;
pub mod report;
pub mod trace;
pub mod workspace;

pub use workspace::{Workspace, WorkspaceError};
