//! Endomorphism monoids of uniformly nested partitions, iterated wreath
//! products, and an exact rank engine.
//!
//! A uniformly nested partition of depth `k` is described by its type
//! `(n_1, ..., n_k)`; its points at level `j` are tuples in
//! `[1..n_1] x ... x [1..n_j]`. The crate provides:
//!
//! - the endomorphism monoid in canonical local-map coordinates, with
//!   composition, leaf-map induction, and a generic respect checker
//!   ([`partition`], [`nested`]);
//! - elementary endomorphisms and the per-level factorization
//!   ([`elementary`]);
//! - the level-invertibility predicates, primitivity checking, strata, and
//!   step witnesses ([`predicates`]);
//! - wreath products over a generic finite-group interface, the recovery
//!   lemmas with word certificates, the automorphism-group/wreath
//!   correspondence, the parity homomorphism, and the `k`-element group
//!   generating set ([`wreath`], [`perm`]);
//! - a deterministic Cayley-graph closure engine, exact brute-force rank and
//!   relative rank, the certified `2k` lower bound, and the assembled
//!   `2k`-element generating set ([`rank`]);
//! - a reporting layer behind the `np` command-line binary ([`cli`]).

pub mod cli;
pub mod elementary;
pub mod error;
pub mod nested;
pub mod partition;
pub mod perm;
pub mod predicates;
pub mod rank;
pub mod wreath;

pub use error::{Error, Result};
pub use partition::{
    points_at_level, project, Endomorphism, LeafMapOutcome, LocalMap, PartitionType, Point,
};
pub use perm::{Parity, ParityVector, Perm};
