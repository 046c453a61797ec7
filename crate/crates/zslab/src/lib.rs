//! An exact-arithmetic laboratory for factorization theory over finite
//! abelian groups.
//!
//! The crate enumerates minimal zero-sum sequences (atoms), computes
//! factorization invariants of the monoid of zero-sum sequences — length
//! sets, sets of distances, elasticities, catenary degrees — and provides
//! the structural machinery around sequences of maximal elasticity:
//! membership tests, the finitely generated submonoid they form, shifter
//! constructions that force length sets into intervals or catenary degree at
//! most 3, and exhaustive searches over even-order cyclic groups with
//! machine-checkable exhaustion certificates.
//!
//! Everything is computed with exact integer and rational arithmetic; all
//! enumeration orders are canonical so identical inputs produce identical
//! output bytes.

pub mod algebra;
pub mod atoms;
mod bitset;
pub mod checks;
pub mod cyclic_even;
pub mod elasticity;
pub mod factorize;
pub mod property_p;

pub use algebra::{AlgebraError, GroupElement, GroupMap, GroupSpec, Sequence, SequenceFlags};
pub use atoms::{atoms_dividing, d_star, davenport, enumerate_atoms, is_atom, AtomCatalog};
