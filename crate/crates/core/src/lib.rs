//! Exact verification engine for a derived-equivalence proof on the G2 flag variety.

pub mod bwb;
pub mod lie;
pub mod mutation;
pub mod proof;
pub mod sheaf;
