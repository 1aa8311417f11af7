//! Simulation and imaging toolkit for small scatterers buried in a
//! two-layered half-space.
//!
//! The forward model synthesizes multi-static response matrices from the
//! leading-order scattering amplitude of small buried disks; the imaging side
//! localizes the disks with a multi-frequency subspace filter and compares it
//! against single-frequency MUSIC and Kirchhoff migration.
//!
//! Pipeline: describe an experiment as a [`medium::Scenario`] (directly or
//! via a JSON file, see [`config`]), synthesize per-frequency matrices with
//! [`forward`], decompose them with [`spectral`], evaluate maps with
//! [`imaging`], and extract/score peaks with [`analysis`]. The `subsurf`
//! binary wires these together behind `synthesize`, `image` and `report`
//! subcommands.

pub mod analysis;
pub mod config;
pub mod error;
pub mod forward;
pub mod imaging;
pub mod io;
pub mod medium;
pub mod spectral;
pub mod steering;

pub use error::{Error, Result};
