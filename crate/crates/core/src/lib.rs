//! Simulation and verification toolkit for random flights on heavy-tailed
//! random media: a walk with heavy-tailed integer jumps moves between the
//! points of a random medium whose gaps are heavy-tailed too.
//!
//! - [`rng`], [`laws`]: reproducible random streams and the gap and jump laws.
//! - [`medium`], [`walk`]: the medium, the walk and the flight they induce.
//! - [`path`]: step paths, rescaled processes and their algebra.
//! - [`skorokhod`]: J1 / J2 type distances with certificates, reordering of
//!   walk cells, gluing of time changes.
//! - [`lab`]: regime table and Monte Carlo experiments.
//! - [`io`]: file formats shared with the command line tool.

pub mod error;
pub mod io;
pub mod lab;
pub mod laws;
pub mod medium;
pub mod path;
pub mod rng;
pub mod skorokhod;
pub mod walk;

pub use error::{Error, Result};
