//! Permutation-group machinery for wreath stabilizers, fixer block systems and
//! 5/2-closures, with the combinatorial objects and checks built on top.

pub mod actions;
pub mod blocks;
pub mod closure;
pub mod cyclic_keys;
pub mod error;
pub mod fixer;
pub mod group;
pub mod incidence;
pub mod io;
pub mod named;
pub mod perm;
pub mod subgroups;
pub mod verify;
pub mod wreath;

pub use error::{Error, Result};
pub use group::{OrbitPartition, PermGroup};
pub use perm::Permutation;
