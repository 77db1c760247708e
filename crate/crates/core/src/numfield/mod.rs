//! Algebraic numbers, quadratic fields and multiplicative relations.

pub mod algebraic;
pub mod integers;
pub mod quadratic;
pub mod relations;

pub use algebraic::{root_of_unity_order, AlgebraicNumber, RootSelector};
pub use quadratic::QuadElem;
pub use relations::{mult_relation_lattice, verify_relation, RelationLattice};
