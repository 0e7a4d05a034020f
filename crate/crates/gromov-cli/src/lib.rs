//! Experiment harness for the tree/matrix toolkit: configuration parsing,
//! the four simulation drivers, and CSV reporting. The `gromov` binary is
//! a thin wrapper over this crate plus the core file formats.

pub mod config;
pub mod drivers;
pub mod report;
