//! Multilevel preconditioners for linear finite element problems on locally
//! refined triangulations: nodal multigrid, BPX, hierarchical basis and
//! wavelet-modified hierarchical basis methods, with the sparse storage
//! schemes and in-place change-of-basis kernels they are built on.

#![allow(clippy::needless_range_loop)]

pub mod assembly;
pub mod error;
pub mod experiment;
pub mod flops;
pub mod hierarchy;
pub mod mesh;
pub mod precond;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
