//! Exact, desk-scale machinery for sum-free sets in finite abelian groups:
//! group arithmetic and subgroup structure, (distinct) sum-free predicates
//! and extremal constructions, distinct link graphs, maximal independent set
//! counting, and brute-force censuses.

pub mod census;
pub mod construct;
pub mod error;
pub mod group;
pub mod linkgraph;
pub mod mis;
pub mod schur;
pub mod seed;
pub mod subset;

pub use error::{Error, Result};
pub use group::{AbelianGroup, Element, GroupType, Subgroup, ZpHom};
pub use schur::Variant;
pub use subset::GroupSubset;
