//! Exact computations in section Burnside rings of finite groups.

pub mod bitset;
pub mod catalog;
pub mod classification;
pub mod covering;
pub mod crossed;
pub mod error;
pub mod gamma;
pub mod group;
pub mod iso;
pub mod linalg;
pub mod poset;
pub mod sections;
pub mod subgroup;
pub mod verify;

pub use bitset::ElemSet;
pub use error::{Condition, Error, Result};
pub use group::{Group, Hom};
pub use subgroup::{Subgroup, SubgroupLattice, Subquotient};
