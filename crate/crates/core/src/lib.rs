//! General concurrence percolation (GCP) on 2D lattice quantum networks.
//!
//! Every edge of a square, triangular or hexagonal lattice carries an identical
//! non-maximally entangled pure state. GCP builds a direct link between every
//! node pair by entanglement swapping along each shortest path and distilling
//! the parallel results, converts every link to a singlet with its own
//! success probability, and measures the giant-component fraction. The
//! [`analysis`] module extracts thresholds and critical exponents from the
//! resulting finite-size curves.

pub mod analysis;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod io;
pub mod lattice;
pub mod paths;
pub mod percolation;

pub use error::{Error, Result};
