//! Dexterous-workspace analysis and ergonomic design optimization for
//! dual-arm master manipulators.
//!
//! The pipeline: Monte Carlo sampling of a six-axis DH chain under a
//! joint-limit-penalized manipulability measure, voxelization of the scatter
//! into a capability map, composition of the two-arm overlap volume,
//! intersection with a parametric human ergonomic occupancy field, and
//! derivative-free search over the link lengths and base separation that
//! maximize the ergonomic interaction fraction `F = V_I / V_R`.
//!
//! The `ergoscope` binary drives the same pipeline from a TOML config; see
//! the repository README for the CLI and file formats.

pub mod config;
pub mod dexterity;
pub mod ehem;
pub mod error;
pub mod grid;
pub mod interaction;
pub mod io;
pub mod isosurface;
pub mod kinematics;
pub mod optimizer;
pub mod pipeline;
pub mod rng;
pub mod workspace;

pub use error::{Error, Result};
