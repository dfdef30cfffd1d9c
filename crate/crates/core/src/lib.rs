//! Core algorithms for counting transfer systems on finite lattices with a
//! group action, through the reduced formal context of their lattice.
//!
//! The pipeline this crate supports:
//!
//! 1. build a finite `G`-lattice ([`lattice::GLattice`]) — a chain, a grid of
//!    chains, a Boolean lattice, a subspace lattice of `F_p^n`, or the
//!    subgroup lattice of a permutation group under conjugation
//!    ([`group`]);
//! 2. construct the reduced formal context whose rows and columns are the
//!    orbits of nontrivial relations `x < y` and whose incidence comes from a
//!    closed-form lifting criterion ([`context`]);
//! 3. count (or enumerate) the formal concepts of that context with
//!    Close-by-One ([`cbo`]) — each concept is one transfer system;
//! 4. cross-check everything at desk scale against brute-force enumeration of
//!    the transfer systems themselves ([`oracle`]) and against exact
//!    closed-form density formulas and bounds ([`formulas`]).
//!
//! The crate is `no_std`-compatible (`alloc` required); disabling the default
//! `std` feature removes only the multi-threaded counting front-end.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bitset;
pub mod cbo;
pub mod context;
pub mod formulas;
pub mod group;
pub mod lattice;
pub mod oracle;

pub use bitset::BitSet;
pub use cbo::{Concept, ConceptCount};
pub use context::{FormalContext, RelationPair};
pub use group::{PermGroup, Subgroup};
pub use lattice::GLattice;
