//! Finite level quotients of multi-EGS groups acting on the p-adic tree,
//! and certified checks that explicit generator tuples form ramification
//! structures.

pub mod generators;
pub mod groupdata;
pub mod linalg;
pub mod permgroup;
pub mod ramification;
pub mod tree;

pub use generators::{Symbol, Word};
pub use groupdata::DefiningDatum;
pub use permgroup::{GroupContext, Perm, StabilizerChain};
pub use tree::{Portrait, Vertex};
