//! Finite open covers and the cohomological bookkeeping built on them.
//!
//! The crate evaluates every topological notion on a finite sample space:
//! covers are families of point subsets, the nerve records which of them
//! meet, and group-valued cochains on the nerve carry transition data.
//! On top of that sit coboundary solving with holonomy witnesses, lifting
//! along central extensions (`Z -> Z/n`, `R -> T`), partitions of unity,
//! and flat bundles glued from constant transitions.

pub mod bundle;
pub mod cli;
pub mod cochain;
pub mod cover;
pub mod error;
pub mod groups;
pub mod lift;
pub mod nerve;
pub mod pou;

pub use error::{Error, Result};
