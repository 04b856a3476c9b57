//! Validated finite monoids as Cayley tables, element arithmetic,
//! idempotents, inverse sets, and the brute-force regularity oracle.
//!
//! A [`FiniteMonoid`] owns an `n × n` multiplication table over the dense
//! carrier `{0, .., n-1}`. Associativity and the existence of a two-sided
//! identity are verified once at construction; everything downstream relies
//! on that. Values are immutable afterwards, so sharing across threads is
//! safe and all operations here are pure.
//!
//! An element `a` is *regular* when some `b` satisfies `aba = a` and
//! `bab = b`; the set of all such `b` is the inverse set of `a`. A monoid is
//! regular when every inverse set is nonempty. [`FiniteMonoid::is_regular`]
//! decides this by exhaustive search and reports the least-index element
//! with an empty inverse set as witness.

use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

static NEXT_UID: AtomicU64 = AtomicU64::new(1);

/// Rejections raised while validating a raw multiplication table.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("table is empty")]
    EmptyTable,
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("entry at ({row},{col}) is {value}, outside [0,{order})")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("not associative: ({i}*{j})*{k} = {left} but {i}*({j}*{k}) = {right}")]
    NonAssociative {
        i: usize,
        j: usize,
        k: usize,
        left: usize,
        right: usize,
    },
    #[error("no two-sided identity element")]
    NoIdentity,
}

/// Errors from element-level operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpError {
    #[error("element belongs to a different monoid")]
    ForeignElement,
    #[error("index {index} out of range for monoid of order {order}")]
    IndexOutOfRange { index: usize, order: usize },
}

/// An element of a specific [`FiniteMonoid`], tagged with its owner so that
/// accidental cross-monoid arithmetic is caught instead of silently wrong.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Elem {
    owner: u64,
    index: usize,
}

impl Elem {
    pub fn index(&self) -> usize {
        self.index
    }
}

/// The inverse set `a⁻¹ = { b : aba = a and bab = b }`, ordered ascending
/// by index. May be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseSet {
    pub element: Elem,
    pub inverses: Vec<Elem>,
}

impl InverseSet {
    pub fn is_empty(&self) -> bool {
        self.inverses.is_empty()
    }
}

/// Outcome of the brute-force regularity oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegularityVerdict {
    Regular,
    /// `witness` is the least-index element whose inverse set is empty.
    NonRegular { witness: usize },
}

impl RegularityVerdict {
    pub fn is_regular(&self) -> bool {
        matches!(self, RegularityVerdict::Regular)
    }
}

/// Anything that multiplies like a finite monoid: a materialized Cayley
/// table, or a lazily evaluated product carrier. The oracle and the law
/// checks are generic over this.
pub trait MonoidOps {
    fn order(&self) -> usize;
    fn identity_idx(&self) -> usize;
    fn mul_idx(&self, x: usize, y: usize) -> usize;
}

/// A finite monoid given by its full multiplication table.
///
/// Elements are the dense indices `0..n-1`; the identity is auto-detected
/// and need not be index 0, so product carriers can keep their natural
/// encodings.
#[derive(Debug, Clone)]
pub struct FiniteMonoid {
    order: usize,
    table: Vec<u32>,
    identity: usize,
    label: String,
    uid: u64,
}

impl FiniteMonoid {
    /// Validate a raw table and wrap it. Checks, in order: shape, entry
    /// range, associativity (first violating `(i,j,k)` in lexicographic
    /// order is reported), and existence of a two-sided identity.
    pub fn from_rows(rows: &[Vec<usize>], label: impl Into<String>) -> Result<Self, TableError> {
        let n = rows.len();
        if n == 0 {
            return Err(TableError::EmptyTable);
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(TableError::RaggedRow {
                    row: i,
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(TableError::EntryOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                        order: n,
                    });
                }
                table.push(v as u32);
            }
        }
        Self::from_flat(table, n, label.into())
    }

    /// Same as [`Self::from_rows`] for a pre-flattened row-major table whose
    /// entries are already known to be in range.
    pub(crate) fn from_flat(table: Vec<u32>, n: usize, label: String) -> Result<Self, TableError> {
        debug_assert_eq!(table.len(), n * n);
        if let Some((i, j, k)) = first_associativity_violation(&table, n) {
            let ij = table[i * n + j] as usize;
            let jk = table[j * n + k] as usize;
            return Err(TableError::NonAssociative {
                i,
                j,
                k,
                left: table[ij * n + k] as usize,
                right: table[i * n + jk] as usize,
            });
        }
        let identity = (0..n)
            .find(|&e| {
                (0..n).all(|x| table[e * n + x] as usize == x && table[x * n + e] as usize == x)
            })
            .ok_or(TableError::NoIdentity)?;
        Ok(Self {
            order: n,
            table,
            identity,
            label,
            uid: NEXT_UID.fetch_add(1, Ordering::Relaxed),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Elem {
        self.elem(self.identity).unwrap()
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    /// The element at `index`, if in range.
    pub fn elem(&self, index: usize) -> Result<Elem, OpError> {
        if index < self.order {
            Ok(Elem {
                owner: self.uid,
                index,
            })
        } else {
            Err(OpError::IndexOutOfRange {
                index,
                order: self.order,
            })
        }
    }

    pub fn elems(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order).map(move |index| Elem {
            owner: self.uid,
            index,
        })
    }

    fn owns(&self, x: Elem) -> bool {
        x.owner == self.uid && x.index < self.order
    }

    /// Table lookup with ownership check.
    pub fn mul(&self, x: Elem, y: Elem) -> Result<Elem, OpError> {
        if !self.owns(x) || !self.owns(y) {
            return Err(OpError::ForeignElement);
        }
        Ok(Elem {
            owner: self.uid,
            index: self.mul_idx(x.index, y.index),
        })
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|i| {
                (0..self.order)
                    .map(|j| self.table[i * self.order + j] as usize)
                    .collect()
            })
            .collect()
    }

    /// Exactly the elements with `x·x = x`, ascending. Always contains the
    /// identity.
    pub fn idempotents(&self) -> Vec<Elem> {
        idempotents_scan(self)
            .into_iter()
            .map(|i| self.elem(i).unwrap())
            .collect()
    }

    /// All `b` with `aba = a` and `bab = b`, ascending; possibly empty.
    pub fn inverse_set(&self, a: Elem) -> Result<InverseSet, OpError> {
        if !self.owns(a) {
            return Err(OpError::ForeignElement);
        }
        let inverses = inverse_set_scan(self, a.index)
            .into_iter()
            .map(|i| self.elem(i).unwrap())
            .collect();
        Ok(InverseSet {
            element: a,
            inverses,
        })
    }

    /// Brute-force regularity oracle: every element must have a nonempty
    /// inverse set.
    pub fn is_regular(&self) -> RegularityVerdict {
        regularity_scan(self, |_, _| {})
    }

    /// True when the table is a group table: every row and every column is
    /// a permutation of the carrier.
    pub fn is_group(&self) -> bool {
        let n = self.order;
        let mut seen = vec![false; n];
        for i in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for j in 0..n {
                seen[self.table[i * n + j] as usize] = true;
            }
            if seen.iter().any(|s| !s) {
                return false;
            }
            seen.iter_mut().for_each(|s| *s = false);
            for j in 0..n {
                seen[self.table[j * n + i] as usize] = true;
            }
            if seen.iter().any(|s| !s) {
                return false;
            }
        }
        true
    }

    /// Bitmask of `{ a·w : w ∈ M }` (the row image of `a`). Only for small
    /// monoids; callers in the criteria checkers stay far below 64.
    pub fn right_multiples_mask(&self, a: usize) -> u64 {
        assert!(self.order <= 64, "multiples masks need order <= 64");
        let mut m = 0u64;
        for w in 0..self.order {
            m |= 1 << self.mul_idx(a, w);
        }
        m
    }

    /// Bitmask of `{ w·b : w ∈ M }` (the column image of `b`).
    pub fn left_multiples_mask(&self, b: usize) -> u64 {
        assert!(self.order <= 64, "multiples masks need order <= 64");
        let mut m = 0u64;
        for w in 0..self.order {
            m |= 1 << self.mul_idx(w, b);
        }
        m
    }
}

impl MonoidOps for FiniteMonoid {
    fn order(&self) -> usize {
        self.order
    }

    fn identity_idx(&self) -> usize {
        self.identity
    }

    #[inline]
    fn mul_idx(&self, x: usize, y: usize) -> usize {
        self.table[x * self.order + y] as usize
    }
}

/// First `(i,j,k)` in lexicographic order with `(ij)k ≠ i(jk)`, if any.
/// Large tables are scanned in parallel row chunks; the reported triple is
/// still the lexicographic minimum.
pub(crate) fn first_associativity_violation(
    table: &[u32],
    n: usize,
) -> Option<(usize, usize, usize)> {
    let scan_range = |lo: usize, hi: usize| -> Option<(usize, usize, usize)> {
        for i in lo..hi {
            for j in 0..n {
                let ij = table[i * n + j] as usize;
                for k in 0..n {
                    let jk = table[j * n + k] as usize;
                    if table[ij * n + k] != table[i * n + jk] {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    };

    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1);
    if n < 512 || workers < 2 {
        return scan_range(0, n);
    }
    let chunk = n.div_ceil(workers);
    let mut hits: Vec<Option<(usize, usize, usize)>> = Vec::new();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = (w * chunk).min(n);
                let hi = ((w + 1) * chunk).min(n);
                s.spawn(move || scan_range(lo, hi))
            })
            .collect();
        hits = handles.into_iter().map(|h| h.join().unwrap()).collect();
    });
    hits.into_iter().flatten().min()
}

/// Idempotent indices of any multiplication, ascending.
pub fn idempotents_scan(ops: &impl MonoidOps) -> Vec<usize> {
    (0..ops.order()).filter(|&x| ops.mul_idx(x, x) == x).collect()
}

/// True when `aba = a` and `bab = b`.
#[inline]
pub fn is_inverse_pair(ops: &impl MonoidOps, a: usize, b: usize) -> bool {
    let ab = ops.mul_idx(a, b);
    ops.mul_idx(ab, a) == a && {
        let ba = ops.mul_idx(b, a);
        ops.mul_idx(ba, b) == b
    }
}

/// All inverses of `a`, ascending.
pub fn inverse_set_scan(ops: &impl MonoidOps, a: usize) -> Vec<usize> {
    (0..ops.order())
        .filter(|&b| is_inverse_pair(ops, a, b))
        .collect()
}

/// Brute-force regularity scan. `hints` may push candidate inverses for an
/// element (tried before the full scan); candidates are verified by raw
/// multiplication, so wrong hints cost time but never correctness. The
/// witness of a non-regular verdict is the least-index element with an
/// empty inverse set, independent of the hints.
pub fn regularity_scan(
    ops: &impl MonoidOps,
    hints: impl Fn(usize, &mut Vec<usize>),
) -> RegularityVerdict {
    let n = ops.order();
    let mut candidates = Vec::new();
    'outer: for a in 0..n {
        candidates.clear();
        hints(a, &mut candidates);
        for &b in &candidates {
            if b < n && is_inverse_pair(ops, a, b) {
                continue 'outer;
            }
        }
        for b in 0..n {
            if is_inverse_pair(ops, a, b) {
                continue 'outer;
            }
        }
        return RegularityVerdict::NonRegular { witness: a };
    }
    RegularityVerdict::Regular
}

/// Exhaustive associativity check over a (possibly lazy) multiplication.
pub fn associativity_violation_exhaustive(ops: &impl MonoidOps) -> Option<(usize, usize, usize)> {
    let n = ops.order();
    for i in 0..n {
        for j in 0..n {
            let ij = ops.mul_idx(i, j);
            for k in 0..n {
                if ops.mul_idx(ij, k) != ops.mul_idx(i, ops.mul_idx(j, k)) {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

/// Seeded spot-check of associativity on `samples` random triples.
pub fn associativity_violation_sampled(
    ops: &impl MonoidOps,
    samples: usize,
    seed: u64,
) -> Option<(usize, usize, usize)> {
    let n = ops.order();
    let mut rng = crate::rng::SplitMix64::new(seed);
    for _ in 0..samples {
        let i = rng.below(n);
        let j = rng.below(n);
        let k = rng.below(n);
        if ops.mul_idx(ops.mul_idx(i, j), k) != ops.mul_idx(i, ops.mul_idx(j, k)) {
            return Some((i, j, k));
        }
    }
    None
}

/// True when `e` is a two-sided identity for the multiplication.
pub fn is_two_sided_identity(ops: &impl MonoidOps, e: usize) -> bool {
    (0..ops.order()).all(|x| ops.mul_idx(e, x) == x && ops.mul_idx(x, e) == x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::named;

    fn z2() -> FiniteMonoid {
        FiniteMonoid::from_rows(&[vec![0, 1], vec![1, 0]], "zn:2").unwrap()
    }

    #[test]
    fn z2_validates_with_identity_zero() {
        let m = z2();
        assert_eq!(m.order(), 2);
        assert_eq!(m.identity_index(), 0);
    }

    #[test]
    fn left_identity_only_is_rejected() {
        // 0 is a left identity but not a right one.
        let err = FiniteMonoid::from_rows(&[vec![0, 1], vec![0, 1]], "bad").unwrap_err();
        assert_eq!(err, TableError::NoIdentity);
    }

    #[test]
    fn corrupted_z3_reports_first_lex_violation() {
        // Z3 with entry (2,2) changed from 1 to 2. Several triples break;
        // (1,1,2) is the lexicographically first: (1*1)*2 = 2*2 = 2 but
        // 1*(1*2) = 1*0 = 1.
        let err = FiniteMonoid::from_rows(
            &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 2]],
            "broken-z3",
        )
        .unwrap_err();
        assert_eq!(
            err,
            TableError::NonAssociative {
                i: 1,
                j: 1,
                k: 2,
                left: 2,
                right: 1
            }
        );
    }

    #[test]
    fn out_of_range_entry_is_reported() {
        let err = FiniteMonoid::from_rows(&[vec![0, 1], vec![1, 2]], "bad").unwrap_err();
        assert_eq!(
            err,
            TableError::EntryOutOfRange {
                row: 1,
                col: 1,
                value: 2,
                order: 2
            }
        );
    }

    #[test]
    fn validation_is_deterministic() {
        let rows = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 2]];
        let a = FiniteMonoid::from_rows(&rows, "x").unwrap_err();
        let b = FiniteMonoid::from_rows(&rows, "x").unwrap_err();
        assert_eq!(a, b);
    }

    #[test]
    fn mul_is_table_lookup() {
        let m = z2();
        let g = m.elem(1).unwrap();
        assert_eq!(m.mul(g, g).unwrap(), m.identity());

        let u1 = named("u1").unwrap();
        let zero = u1.elem(1).unwrap();
        assert_eq!(u1.mul(zero, zero).unwrap(), zero);

        // Monogenic x^3 = x^2: x * x^2 = x^2.
        let m3 = named("monogenic:2,1").unwrap();
        let x = m3.elem(1).unwrap();
        let xx = m3.elem(2).unwrap();
        assert_eq!(m3.mul(x, xx).unwrap(), xx);
    }

    #[test]
    fn foreign_elements_are_rejected() {
        let a = z2();
        let b = z2();
        let x = a.elem(1).unwrap();
        let y = b.elem(1).unwrap();
        assert_eq!(a.mul(x, y).unwrap_err(), OpError::ForeignElement);
    }

    #[test]
    fn idempotents_of_small_monoids() {
        let m = z2();
        assert_eq!(m.idempotents(), vec![m.identity()]);

        let u1 = named("u1").unwrap();
        assert_eq!(
            u1.idempotents().iter().map(Elem::index).collect::<Vec<_>>(),
            vec![0, 1]
        );

        let m3 = named("monogenic:2,1").unwrap();
        assert_eq!(
            m3.idempotents().iter().map(Elem::index).collect::<Vec<_>>(),
            vec![0, 2]
        );
    }

    #[test]
    fn inverse_sets_match_hand_computation() {
        let m = z2();
        let g = m.elem(1).unwrap();
        let inv = m.inverse_set(g).unwrap();
        assert_eq!(inv.inverses, vec![g]);

        let m3 = named("monogenic:2,1").unwrap();
        let x = m3.elem(1).unwrap();
        assert!(m3.inverse_set(x).unwrap().is_empty());

        // The identity is always its own inverse.
        for spec in ["trivial", "zn:3", "u1", "monogenic:2,1", "t2"] {
            let m = named(spec).unwrap();
            let e = m.identity();
            assert!(m.inverse_set(e).unwrap().inverses.contains(&e));
        }
    }

    #[test]
    fn regularity_oracle_verdicts() {
        assert!(z2().is_regular().is_regular());
        assert!(named("u1").unwrap().is_regular().is_regular());
        assert_eq!(
            named("monogenic:2,1").unwrap().is_regular(),
            RegularityVerdict::NonRegular { witness: 1 }
        );
    }

    #[test]
    fn reported_inverses_satisfy_both_laws() {
        for spec in ["trivial", "zn:4", "u1", "t2", "sym:3", "monogenic:3,2"] {
            let m = named(spec).unwrap();
            for a in m.elems() {
                for b in m.inverse_set(a).unwrap().inverses {
                    let aba = m.mul(m.mul(a, b).unwrap(), a).unwrap();
                    let bab = m.mul(m.mul(b, a).unwrap(), b).unwrap();
                    assert_eq!(aba, a);
                    assert_eq!(bab, b);
                }
            }
        }
    }

    #[test]
    fn groups_are_regular_with_nonempty_inverse_sets() {
        for spec in ["trivial", "zn:2", "zn:3", "zn:5", "sym:3"] {
            let m = named(spec).unwrap();
            assert!(m.is_group(), "{spec} should be a group table");
            assert!(m.is_regular().is_regular());
            for a in m.elems() {
                assert!(!m.inverse_set(a).unwrap().is_empty());
            }
        }
        assert!(!named("u1").unwrap().is_group());
    }

    #[test]
    fn multiple_masks_are_row_and_column_images() {
        let u1 = named("u1").unwrap();
        // zero * U1 = {zero}
        assert_eq!(u1.right_multiples_mask(1), 0b10);
        assert_eq!(u1.right_multiples_mask(0), 0b11);
        assert_eq!(u1.left_multiples_mask(1), 0b10);
    }
}
