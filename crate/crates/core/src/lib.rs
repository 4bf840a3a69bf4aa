//! Random walks in random environments, electrical and capacitated networks,
//! and first-passage percolation on locally finite rooted trees.
//!
//! Infinite trees are handled through finite truncations ([`trees::Tree`]) or,
//! for deep experiments, through the lazily generated shapes described by a
//! [`trees::TreeSpec`]. All randomness is keyed by `(seed, vertex path)` so
//! results do not depend on traversal order or on the number of workers.

pub mod branching;
pub mod cli;
pub mod error;
pub mod fpp;
pub mod networks;
pub mod percolation;
pub mod ratecalc;
pub mod rng;
pub mod rwre;
pub mod trees;

pub use error::{Error, ErrorKind, Result};
pub use ratecalc::Distribution;
pub use trees::{Tree, TreeSpec};
