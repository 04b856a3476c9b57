//! A workbench for computation in finite monoids given by Cayley tables.
//!
//! The crate provides:
//!
//! * validated Cayley-table monoids with element arithmetic, idempotents,
//!   inverse sets, and a brute-force regularity oracle ([`monoid`]),
//! * direct, semidirect and wreath product constructions, endomorphism
//!   actions, and finite function spaces with the shift `(x)^b g = (xb)g`
//!   ([`products`]),
//! * the Schützenberger product `A ◇ B` on triples `(a, P, b)` and its
//!   variant `A ◇v B` on triples `(f, P, b)` ([`schutz`], [`variant`]),
//! * decision procedures for the regularity criteria of both products,
//!   compared against the brute-force oracle with reproducible
//!   counterexamples ([`theorems`]),
//! * a catalog of named small monoids and exhaustive enumeration of all
//!   monoids of order ≤ 4 ([`catalog`]),
//! * the text file formats used by the command-line tool ([`formats`]).

pub mod catalog;
pub mod formats;
pub mod monoid;
pub mod presentation;
pub mod products;
pub mod schutz;
pub mod theorems;
pub mod variant;

pub(crate) mod rng;

pub use monoid::{Elem, FiniteMonoid, InverseSet, MonoidOps, RegularityVerdict};
pub use products::ProductError;
pub use theorems::{compare_regularity, ProductKind, RegularityReport};

/// Hard cap on carrier sizes for oracle-grade constructions. Anything this
/// size still admits an `O(n^2)` inverse scan at desk scale; callers can pass
/// an explicit larger cap to override.
pub const MAX_ORACLE_ORDER: usize = 10_000;

/// Default seed for sampled law checks; reports record whatever was used.
pub const DEFAULT_SEED: u64 = 1;
