//! The variant Schützenberger product `A ◇v B`: triples `(f, P, b)` with
//! `f ∈ A^{⊕B}` and `P ⊆ A^{⊕B} × B`, multiplied by
//! `(f, P1, b1)(g, P2, b2) = (f·^b1 g, P1·b2 ∪ P2, b1·b2)`
//! with identity `(1̄, ∅, 1_B)`. Only the middle component's second
//! coordinates move; functions in pairs are never rewritten.
//!
//! Pairs `(f, d)` rank as `fcode·|B| + d` over the mixed-radix function
//! codes, and a triple's canonical rank orders the B component first, then
//! the set code, then the function code, mirroring `A ◇ B`.

use crate::monoid::{FiniteMonoid, MonoidOps, TableError};
use crate::products::{checked_pow, power_table, shift_table, FnFin, ProductError};
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

static NEXT_UID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VariantError {
    #[error("operands belong to different product instances")]
    MixedParents,
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// A subset of `A^{⊕B} × B` as a bitmask over pair ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct VarPairSet(pub u64);

impl VarPairSet {
    pub const EMPTY: VarPairSet = VarPairSet(0);

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: VarPairSet) -> VarPairSet {
        VarPairSet(self.0 | other.0)
    }

    pub fn contains_all(self, other: VarPairSet) -> bool {
        other.0 & !self.0 == 0
    }
}

/// An element `(f, P, b)`; `f` is a function code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariantElem {
    owner: u64,
    pub f: usize,
    pub p: VarPairSet,
    pub b: usize,
}

/// The product `A ◇v B` with lazily evaluated multiplication.
#[derive(Debug, Clone)]
pub struct VariantProduct {
    a: FiniteMonoid,
    b: FiniteMonoid,
    n_f: usize,
    n_pairs: usize,
    carrier: usize,
    /// Pointwise products on function codes, `n_f × n_f`.
    power: Vec<u32>,
    /// `fshift[by·n_f + f]` = code of `^by f`.
    fshift: Vec<u32>,
    /// `pair_shift[by·n_pairs + p]` = rank of `(f, d·by)` where `p` ranks `(f, d)`.
    pair_shift: Vec<u32>,
    uid: u64,
}

impl VariantProduct {
    /// Set up the lazy product; rejects carriers over `cap`
    /// (`|A|^|B| · 2^(|A|^|B|·|B|) · |B|` elements).
    pub fn new(a: &FiniteMonoid, b: &FiniteMonoid, cap: usize) -> Result<Self, ProductError> {
        let nb = b.order();
        let n_f_big = checked_pow(a.order(), nb);
        let n_pairs_big = n_f_big.saturating_mul(nb as u128);
        let subsets = if n_pairs_big >= 64 {
            u128::MAX
        } else {
            1u128 << (n_pairs_big as u32)
        };
        let required = n_f_big.saturating_mul(subsets).saturating_mul(nb as u128);
        if required > cap as u128 {
            return Err(ProductError::CapExceeded { required, cap });
        }
        let n_f = n_f_big as usize;
        let n_pairs = n_pairs_big as usize;
        let power = power_table(a, nb, n_f);
        let fshift = shift_table(a.order(), b, n_f);
        let mut pair_shift = vec![0u32; nb * n_pairs];
        for f in 0..n_f {
            for d in 0..nb {
                let p = f * nb + d;
                for by in 0..nb {
                    pair_shift[by * n_pairs + p] = (f * nb + b.mul_idx(d, by)) as u32;
                }
            }
        }
        Ok(Self {
            a: a.clone(),
            b: b.clone(),
            n_f,
            n_pairs,
            carrier: required as usize,
            power,
            fshift,
            pair_shift,
            uid: NEXT_UID.fetch_add(1, Ordering::Relaxed),
        })
    }

    pub fn factor_a(&self) -> &FiniteMonoid {
        &self.a
    }

    pub fn factor_b(&self) -> &FiniteMonoid {
        &self.b
    }

    pub fn n_functions(&self) -> usize {
        self.n_f
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    /// Code of the all-identity function `1̄`.
    pub fn one_code(&self) -> usize {
        FnFin::one(&self.a, self.b.order()).code(self.a.order())
    }

    pub fn fnfin_of(&self, code: usize) -> FnFin {
        FnFin::from_code(code, self.a.order(), self.b.order())
    }

    /// `P·b = { (f, d·b) : (f, d) ∈ P }`; first components untouched.
    pub fn shift(&self, p: VarPairSet, by: usize) -> VarPairSet {
        let base = by * self.n_pairs;
        let mut rest = p.0;
        let mut out = 0u64;
        while rest != 0 {
            let bit = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1 << self.pair_shift[base + bit];
        }
        VarPairSet(out)
    }

    pub fn elem(&self, f: usize, p: VarPairSet, b: usize) -> VariantElem {
        debug_assert!(f < self.n_f && b < self.b.order());
        VariantElem {
            owner: self.uid,
            f,
            p,
            b,
        }
    }

    /// `(1̄, ∅, 1_B)`.
    pub fn identity_elem(&self) -> VariantElem {
        self.elem(self.one_code(), VarPairSet::EMPTY, self.b.identity_index())
    }

    pub fn mul_elem(&self, x: VariantElem, y: VariantElem) -> Result<VariantElem, VariantError> {
        if x.owner != self.uid || y.owner != self.uid {
            return Err(VariantError::MixedParents);
        }
        Ok(self.mul_raw(x, y))
    }

    fn mul_raw(&self, x: VariantElem, y: VariantElem) -> VariantElem {
        let shifted_g = self.fshift[x.b * self.n_f + y.f] as usize;
        VariantElem {
            owner: self.uid,
            f: self.power[x.f * self.n_f + shifted_g] as usize,
            p: self.shift(x.p, y.b).union(y.p),
            b: self.b.mul_idx(x.b, y.b),
        }
    }

    /// Canonical rank: B component most significant, then set code, then
    /// function code.
    pub fn encode(&self, e: VariantElem) -> usize {
        ((e.b << self.n_pairs) + e.p.0 as usize) * self.n_f + e.f
    }

    pub fn decode(&self, idx: usize) -> VariantElem {
        let f = idx % self.n_f;
        let rest = idx / self.n_f;
        let mask = (rest as u64) & ((1u64 << self.n_pairs) - 1);
        let b = rest >> self.n_pairs;
        VariantElem {
            owner: self.uid,
            f,
            p: VarPairSet(mask),
            b,
        }
    }

    /// The pairs of a set as `(fcode, b)` pairs, ascending by rank.
    pub fn pairs_of(&self, p: VarPairSet) -> Vec<(usize, usize)> {
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

    pub fn pairset_from_pairs(&self, pairs: &[(usize, usize)]) -> VarPairSet {
        let nb = self.b.order();
        let mut mask = 0u64;
        for &(f, d) in pairs {
            debug_assert!(f < self.n_f && d < nb);
            mask |= 1 << (f * nb + d);
        }
        VarPairSet(mask)
    }

    /// Build and validate the full Cayley table.
    pub fn materialize(&self) -> Result<FiniteMonoid, VariantError> {
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
            format!("variant({},{})", self.a.label(), self.b.label()),
        )?)
    }
}

impl MonoidOps for VariantProduct {
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

/// Convenience wrapper: enumerate and materialize `A ◇v B` in one step.
pub fn variant_monoid(
    a: &FiniteMonoid,
    b: &FiniteMonoid,
    cap: usize,
) -> Result<(FiniteMonoid, VariantProduct), VariantError> {
    let product = VariantProduct::new(a, b, cap)?;
    let monoid = product.materialize()?;
    Ok((monoid, product))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::named;
    use crate::monoid::associativity_violation_exhaustive;
    use crate::products::{fn_shift, fnfin_mul};
    use crate::MAX_ORACLE_ORDER;

    const CAP: usize = MAX_ORACLE_ORDER;

    #[test]
    fn carrier_sizes_match_the_counting_formula() {
        let z2 = named("zn:2").unwrap();
        let t = named("trivial").unwrap();
        assert_eq!(VariantProduct::new(&z2, &z2, CAP).unwrap().carrier(), 2048);
        assert_eq!(VariantProduct::new(&t, &t, CAP).unwrap().carrier(), 2);
    }

    #[test]
    fn oversize_carrier_is_rejected() {
        let z2 = named("zn:2").unwrap();
        let z3 = named("zn:3").unwrap();
        // 8 · 2^24 · 3 pairs: far over any desk cap.
        let err = VariantProduct::new(&z2, &z3, CAP).unwrap_err();
        assert!(matches!(err, ProductError::CapExceeded { .. }));
    }

    #[test]
    fn pair_shift_moves_second_coordinates_only() {
        let z2 = named("zn:2").unwrap();
        let u1 = named("u1").unwrap();
        let prod = VariantProduct::new(&z2, &u1, CAP).unwrap();
        let one = prod.one_code();
        let p = prod.pairset_from_pairs(&[(one, 0)]);
        // {(1̄, id)} shifted by zero -> {(1̄, zero)}
        assert_eq!(prod.pairs_of(prod.shift(p, 1)), vec![(one, 1)]);
        assert_eq!(prod.shift(p, 0), p);
        assert_eq!(prod.shift(VarPairSet::EMPTY, 1), VarPairSet::EMPTY);
    }

    #[test]
    fn shift_composes_with_the_b_product() {
        let z2 = named("zn:2").unwrap();
        let u1 = named("u1").unwrap();
        let prod = VariantProduct::new(&z2, &u1, CAP).unwrap();
        for mask in 0u64..256 {
            let p = VarPairSet(mask);
            for b1 in 0..2 {
                for b2 in 0..2 {
                    assert_eq!(
                        prod.shift(prod.shift(p, b1), b2),
                        prod.shift(p, u1.mul_idx(b1, b2))
                    );
                }
            }
        }
    }

    #[test]
    fn first_component_is_the_shifted_pointwise_product() {
        let z2 = named("zn:2").unwrap();
        let prod = VariantProduct::new(&z2, &z2, CAP).unwrap();
        for f in 0..prod.n_functions() {
            for g in 0..prod.n_functions() {
                for b1 in 0..2 {
                    let x = prod.elem(f, VarPairSet::EMPTY, b1);
                    let y = prod.elem(g, VarPairSet::EMPTY, 0);
                    let expect = fnfin_mul(&z2, &prod.fnfin_of(f), &fn_shift(&z2, &prod.fnfin_of(g), b1));
                    assert_eq!(prod.mul_elem(x, y).unwrap().f, expect.code(2));
                }
            }
        }
    }

    #[test]
    fn identity_is_two_sided_and_unions_are_plain() {
        let z2 = named("zn:2").unwrap();
        let u1 = named("u1").unwrap();
        let prod = VariantProduct::new(&z2, &u1, CAP).unwrap();
        let id = prod.identity_elem();
        for idx in (0..prod.carrier()).step_by(7) {
            let x = prod.decode(idx);
            assert_eq!(prod.mul_elem(x, id).unwrap(), x);
            assert_eq!(prod.mul_elem(id, x).unwrap(), x);
        }
        // shifts by the identity reduce the product of set components to union
        let one = prod.one_code();
        let p1 = prod.pairset_from_pairs(&[(one, 0)]);
        let p2 = prod.pairset_from_pairs(&[(one, 1), (1, 0)]);
        let x = prod.elem(one, p1, 0);
        let y = prod.elem(one, p2, 0);
        assert_eq!(prod.mul_elem(x, y).unwrap().p, p1.union(p2));
    }

    #[test]
    fn product_middle_contains_second_operand_exactly() {
        let z2 = named("zn:2").unwrap();
        let t = named("trivial").unwrap();
        let prod = VariantProduct::new(&z2, &t, CAP).unwrap();
        for xi in 0..prod.carrier() {
            for yi in 0..prod.carrier() {
                let x = prod.decode(xi);
                let y = prod.decode(yi);
                let z = prod.mul_raw(x, y);
                assert!(z.p.contains_all(y.p));
                assert!(z.p.contains_all(prod.shift(x.p, y.b)));
            }
        }
    }

    #[test]
    fn mixed_parents_are_rejected() {
        let z2 = named("zn:2").unwrap();
        let p1 = VariantProduct::new(&z2, &z2, CAP).unwrap();
        let p2 = VariantProduct::new(&z2, &z2, CAP).unwrap();
        assert!(matches!(
            p1.mul_elem(p1.identity_elem(), p2.identity_elem()),
            Err(VariantError::MixedParents)
        ));
    }

    #[test]
    fn decode_inverts_encode() {
        let z2 = named("zn:2").unwrap();
        let u1 = named("u1").unwrap();
        let prod = VariantProduct::new(&z2, &u1, CAP).unwrap();
        for idx in 0..prod.carrier() {
            assert_eq!(prod.encode(prod.decode(idx)), idx);
        }
    }

    #[test]
    fn trivial_variant_product_is_the_two_element_semilattice() {
        let t = named("trivial").unwrap();
        let (m, _) = variant_monoid(&t, &t, CAP).unwrap();
        assert_eq!(m.order(), 2);
        assert_eq!(m.rows(), named("u1").unwrap().rows());
    }

    #[test]
    fn small_variant_tables_validate() {
        let z2 = named("zn:2").unwrap();
        let t = named("trivial").unwrap();
        let (m, prod) = variant_monoid(&z2, &t, CAP).unwrap();
        assert_eq!(m.order(), 8);
        assert_eq!(associativity_violation_exhaustive(&prod), None);
    }
}
