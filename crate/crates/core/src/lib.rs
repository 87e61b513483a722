//! Finite computational shadows of Burger–Mozes type groups acting on
//! regular trees: permutation groups, Sylow and residual series, iterated
//! wreath towers, coloured tree balls with prescribed local actions, and
//! rigid-stabilizer lattices.

pub mod acceptance;
pub mod caps;
pub mod criteria;
pub mod error;
pub mod lattice;
pub mod localaction;
pub mod oracle;
pub mod permgroup;
pub mod series;
pub mod tree;
pub mod wreath;

pub use caps::Caps;
pub use error::{Error, ResourceError, Result};
pub use permgroup::{GroupSpec, NamedFamily, PermGroup, Permutation};
