//! The Schützenberger product `A ◇ B`: triples `(a, P, b)` with
//! `P ⊆ A × B`, multiplied by
//! `(a1, P1, b1)(a2, P2, b2) = (a1·a2, P1·b2 ∪ a1·P2, b1·b2)`
//! with identity `(1_A, ∅, 1_B)`.
//!
//! A [`PairSet`] is a membership bitmask over the lexicographic enumeration
//! of `A × B` (pair `(a, b)` is bit `a·|B| + b`), so set equality is word
//! equality and a set's code doubles as its index in the enumeration of all
//! subsets.
//!
//! Element-level operations are the primitive layer; the full Cayley table
//! is an optional materialization for small carriers. The canonical rank of
//! a triple orders the B component first, then the set code, then the A
//! component — the rank every oracle scan, witness report, and exported
//! table uses.

use crate::monoid::{FiniteMonoid, MonoidOps, TableError};
use crate::products::ProductError;
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

static NEXT_UID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchutzError {
    #[error("operands belong to different product instances")]
    MixedParents,
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// A subset of `A × B` in canonical order, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct PairSet(pub u64);

impl PairSet {
    pub const EMPTY: PairSet = PairSet(0);

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: PairSet) -> PairSet {
        PairSet(self.0 | other.0)
    }

    pub fn contains_all(self, other: PairSet) -> bool {
        other.0 & !self.0 == 0
    }
}

/// An element `(a, P, b)` of a specific product instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchutzElem {
    owner: u64,
    pub a: usize,
    pub p: PairSet,
    pub b: usize,
}

/// The product `A ◇ B` with lazily evaluated multiplication.
#[derive(Debug, Clone)]
pub struct SchutzProduct {
    a: FiniteMonoid,
    b: FiniteMonoid,
    n_pairs: usize,
    carrier: usize,
    /// `shift_map[by·n_pairs + p]` = rank of `(c, d·by)` where `p` ranks `(c, d)`.
    shift_map: Vec<u32>,
    /// `scale_map[by·n_pairs + p]` = rank of `(by·c, d)` where `p` ranks `(c, d)`.
    scale_map: Vec<u32>,
    uid: u64,
}

impl SchutzProduct {
    /// Set up the lazy product; rejects carriers over `cap`
    /// (`|A| · 2^(|A||B|) · |B|` elements).
    pub fn new(a: &FiniteMonoid, b: &FiniteMonoid, cap: usize) -> Result<Self, ProductError> {
        let (na, nb) = (a.order(), b.order());
        let n_pairs = na * nb;
        let subsets = if n_pairs >= 64 {
            u128::MAX
        } else {
            1u128 << n_pairs
        };
        let required = (na as u128)
            .saturating_mul(subsets)
            .saturating_mul(nb as u128);
        if required > cap as u128 {
            return Err(ProductError::CapExceeded {
                required,
                cap,
            });
        }
        let carrier = required as usize;
        let mut shift_map = vec![0u32; nb * n_pairs];
        let mut scale_map = vec![0u32; na * n_pairs];
        for c in 0..na {
            for d in 0..nb {
                let p = c * nb + d;
                for by in 0..nb {
                    shift_map[by * n_pairs + p] = (c * nb + b.mul_idx(d, by)) as u32;
                }
                for by in 0..na {
                    scale_map[by * n_pairs + p] = (a.mul_idx(by, c) * nb + d) as u32;
                }
            }
        }
        Ok(Self {
            a: a.clone(),
            b: b.clone(),
            n_pairs,
            carrier,
            shift_map,
            scale_map,
            uid: NEXT_UID.fetch_add(1, Ordering::Relaxed),
        })
    }

    pub fn factor_a(&self) -> &FiniteMonoid {
        &self.a
    }

    pub fn factor_b(&self) -> &FiniteMonoid {
        &self.b
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    /// `P·b = { (c, d·b) : (c, d) ∈ P }`.
    pub fn shift(&self, p: PairSet, by: usize) -> PairSet {
        let base = by * self.n_pairs;
        let mut rest = p.0;
        let mut out = 0u64;
        while rest != 0 {
            let bit = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1 << self.shift_map[base + bit];
        }
        PairSet(out)
    }

    /// `a·P = { (a·c, d) : (c, d) ∈ P }`.
    pub fn scale(&self, by: usize, p: PairSet) -> PairSet {
        let base = by * self.n_pairs;
        let mut rest = p.0;
        let mut out = 0u64;
        while rest != 0 {
            let bit = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1 << self.scale_map[base + bit];
        }
        PairSet(out)
    }

    pub fn elem(&self, a: usize, p: PairSet, b: usize) -> SchutzElem {
        debug_assert!(a < self.a.order() && b < self.b.order());
        debug_assert!(self.n_pairs >= 64 || p.0 < (1 << self.n_pairs));
        SchutzElem {
            owner: self.uid,
            a,
            p,
            b,
        }
    }

    /// `(1_A, ∅, 1_B)`.
    pub fn identity_elem(&self) -> SchutzElem {
        self.elem(self.a.identity_index(), PairSet::EMPTY, self.b.identity_index())
    }

    /// The displayed multiplication, with the union deduplicated by the
    /// bitmask representation.
    pub fn mul_elem(&self, x: SchutzElem, y: SchutzElem) -> Result<SchutzElem, SchutzError> {
        if x.owner != self.uid || y.owner != self.uid {
            return Err(SchutzError::MixedParents);
        }
        Ok(self.mul_raw(x, y))
    }

    fn mul_raw(&self, x: SchutzElem, y: SchutzElem) -> SchutzElem {
        SchutzElem {
            owner: self.uid,
            a: self.a.mul_idx(x.a, y.a),
            p: self.shift(x.p, y.b).union(self.scale(x.a, y.p)),
            b: self.b.mul_idx(x.b, y.b),
        }
    }

    /// Canonical rank of a triple: B component most significant, then set
    /// code, then A component.
    pub fn encode(&self, e: SchutzElem) -> usize {
        ((e.b << self.n_pairs) + e.p.0 as usize) * self.a.order() + e.a
    }

    pub fn decode(&self, idx: usize) -> SchutzElem {
        let na = self.a.order();
        let a = idx % na;
        let rest = idx / na;
        let mask = (rest as u64) & ((1u64 << self.n_pairs) - 1);
        let b = rest >> self.n_pairs;
        SchutzElem {
            owner: self.uid,
            a,
            p: PairSet(mask),
            b,
        }
    }

    /// The pairs of a set as `(a, b)` index pairs, ascending by rank.
    pub fn pairs_of(&self, p: PairSet) -> Vec<(usize, usize)> {
        let nb = self.b.order();
        let mut rest = p.0;
        let mut out = Vec::with_capacity(p.len());
        while rest != 0 {
            let bit = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out.push((bit / nb, bit % nb));
        }
        out
    }

    pub fn pairset_from_pairs(&self, pairs: &[(usize, usize)]) -> PairSet {
        let nb = self.b.order();
        let mut mask = 0u64;
        for &(a, b) in pairs {
            debug_assert!(a < self.a.order() && b < nb);
            mask |= 1 << (a * nb + b);
        }
        PairSet(mask)
    }

    /// Build the full Cayley table. Associativity and the identity are
    /// re-checked by table validation rather than assumed.
    pub fn materialize(&self) -> Result<FiniteMonoid, SchutzError> {
        let n = self.carrier;
        let mut table = vec![0u32; n * n];
        for x in 0..n {
            let xe = self.decode(x);
            for y in 0..n {
                table[x * n + y] = self.encode(self.mul_raw(xe, self.decode(y))) as u32;
            }
        }
        Ok(FiniteMonoid::from_flat(
            table,
            n,
            format!("schutz({},{})", self.a.label(), self.b.label()),
        )?)
    }
}

impl MonoidOps for SchutzProduct {
    fn order(&self) -> usize {
        self.carrier
    }

    fn identity_idx(&self) -> usize {
        self.encode(self.identity_elem())
    }

    #[inline]
    fn mul_idx(&self, x: usize, y: usize) -> usize {
        self.encode(self.mul_raw(self.decode(x), self.decode(y)))
    }
}

/// Convenience wrapper: enumerate and materialize `A ◇ B` in one step.
pub fn schutz_monoid(
    a: &FiniteMonoid,
    b: &FiniteMonoid,
    cap: usize,
) -> Result<(FiniteMonoid, SchutzProduct), SchutzError> {
    let product = SchutzProduct::new(a, b, cap)?;
    let monoid = product.materialize()?;
    Ok((monoid, product))
}
