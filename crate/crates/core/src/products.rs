//! Direct products, semidirect products with validated endomorphism
//! actions, the function space `A^{⊕B}` with its shift, and the restricted
//! wreath product.
//!
//! All carriers here are finite, so `A^{⊕B}` (finite support) and `A^{×B}`
//! coincide and only one function space is represented. Pair carriers are
//! encoded `index = a·|B| + b`, and a function `f : B → A` is encoded in
//! mixed radix with the value at the last B-position as the fastest-varying
//! digit; both encodings are fixed so that reports are comparable across
//! runs.

use crate::monoid::{FiniteMonoid, MonoidOps, TableError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error("carrier would have {required} elements, over the cap of {cap}")]
    CapExceeded { required: u128, cap: usize },
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error("expected one map per element of B ({expected}), got {got}")]
    WrongMapCount { expected: usize, got: usize },
    #[error("map for b={b} has {got} entries, expected {expected}")]
    WrongMapLength { b: usize, expected: usize, got: usize },
    #[error("map for b={b} sends {x} to {value}, outside [0,{order})")]
    ImageOutOfRange { b: usize, x: usize, value: usize, order: usize },
    #[error("map for b={b} is not a monoid endomorphism at ({x},{y})")]
    NotEndomorphism { b: usize, x: usize, y: usize },
    #[error("the identity of B does not act as the identity map")]
    IdentityActionBroken,
    #[error("composition law broken: θ_(b1·b2) differs from θ_b1 ∘ θ_b2 at (b1={b1}, b2={b2}, a={a})")]
    CompositionLawBroken { b1: usize, b2: usize, a: usize },
}

/// Encoded pair carrier `(a, b) ↦ a·|B| + b`.
#[inline]
pub fn pair_encode(n_b: usize, a: usize, b: usize) -> usize {
    a * n_b + b
}

#[inline]
pub fn pair_decode(n_b: usize, idx: usize) -> (usize, usize) {
    (idx / n_b, idx % n_b)
}

fn check_cap(required: u128, cap: usize) -> Result<usize, ProductError> {
    if required == 0 || required > cap as u128 {
        Err(ProductError::CapExceeded { required, cap })
    } else {
        Ok(required as usize)
    }
}

/// Componentwise product `A × B` with identity `(1_A, 1_B)`.
pub fn direct_product(
    a: &FiniteMonoid,
    b: &FiniteMonoid,
    cap: usize,
) -> Result<FiniteMonoid, ProductError> {
    let n = check_cap(a.order() as u128 * b.order() as u128, cap)?;
    let nb = b.order();
    let mut table = vec![0u32; n * n];
    for x in 0..n {
        let (xa, xb) = pair_decode(nb, x);
        for y in 0..n {
            let (ya, yb) = pair_decode(nb, y);
            table[x * n + y] = pair_encode(nb, a.mul_idx(xa, ya), b.mul_idx(xb, yb)) as u32;
        }
    }
    Ok(FiniteMonoid::from_flat(
        table,
        n,
        format!("direct({},{})", a.label(), b.label()),
    )?)
}

/// A validated action of `B` on `A` by monoid endomorphisms,
/// contravariant over products: `θ_(b1·b2) = θ_b1 ∘ θ_b2`.
#[derive(Debug, Clone)]
pub struct EndoAction {
    maps: Vec<u32>, // |B| rows of |A| images
    a_order: usize,
    b_order: usize,
}

impl EndoAction {
    /// Validate raw maps (one per element of B, each of length |A|).
    pub fn validate(
        a: &FiniteMonoid,
        b: &FiniteMonoid,
        raw: &[Vec<usize>],
    ) -> Result<Self, ActionError> {
        let (na, nb) = (a.order(), b.order());
        if raw.len() != nb {
            return Err(ActionError::WrongMapCount {
                expected: nb,
                got: raw.len(),
            });
        }
        for (bi, map) in raw.iter().enumerate() {
            if map.len() != na {
                return Err(ActionError::WrongMapLength {
                    b: bi,
                    expected: na,
                    got: map.len(),
                });
            }
            for (x, &v) in map.iter().enumerate() {
                if v >= na {
                    return Err(ActionError::ImageOutOfRange {
                        b: bi,
                        x,
                        value: v,
                        order: na,
                    });
                }
            }
        }
        // Each map is a monoid endomorphism: preserves the unit and products.
        let e_a = a.identity_index();
        for (bi, map) in raw.iter().enumerate() {
            if map[e_a] != e_a {
                return Err(ActionError::NotEndomorphism { b: bi, x: e_a, y: e_a });
            }
            for x in 0..na {
                for y in 0..na {
                    if map[a.mul_idx(x, y)] != a.mul_idx(map[x], map[y]) {
                        return Err(ActionError::NotEndomorphism { b: bi, x, y });
                    }
                }
            }
        }
        if (0..na).any(|x| raw[b.identity_index()][x] != x) {
            return Err(ActionError::IdentityActionBroken);
        }
        for b1 in 0..nb {
            for b2 in 0..nb {
                let b12 = b.mul_idx(b1, b2);
                for x in 0..na {
                    if raw[b12][x] != raw[b1][raw[b2][x]] {
                        return Err(ActionError::CompositionLawBroken { b1, b2, a: x });
                    }
                }
            }
        }
        let mut maps = Vec::with_capacity(na * nb);
        for map in raw {
            maps.extend(map.iter().map(|&v| v as u32));
        }
        Ok(Self {
            maps,
            a_order: na,
            b_order: nb,
        })
    }

    /// The action where every element of B acts as the identity map.
    pub fn trivial(a: &FiniteMonoid, b: &FiniteMonoid) -> Self {
        let raw: Vec<Vec<usize>> = (0..b.order()).map(|_| (0..a.order()).collect()).collect();
        Self::validate(a, b, &raw).expect("trivial action is always valid")
    }

    /// `θ_b(x)`.
    #[inline]
    pub fn apply(&self, b: usize, x: usize) -> usize {
        self.maps[b * self.a_order + x] as usize
    }

    pub fn a_order(&self) -> usize {
        self.a_order
    }

    pub fn b_order(&self) -> usize {
        self.b_order
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.b_order)
            .map(|b| (0..self.a_order).map(|x| self.apply(b, x)).collect())
            .collect()
    }
}

/// Semidirect product `A ⋊ B`: pairs `(a, b)` with
/// `(a1,b1)(a2,b2) = (a1·θ_b1(a2), b1·b2)`. Associativity is re-checked by
/// table validation rather than assumed from the action laws.
pub fn semidirect_product(
    a: &FiniteMonoid,
    b: &FiniteMonoid,
    action: &EndoAction,
    cap: usize,
) -> Result<FiniteMonoid, ProductError> {
    assert_eq!(action.a_order(), a.order(), "action must be over (A, B)");
    assert_eq!(action.b_order(), b.order(), "action must be over (A, B)");
    let n = check_cap(a.order() as u128 * b.order() as u128, cap)?;
    let nb = b.order();
    let mut table = vec![0u32; n * n];
    for x in 0..n {
        let (xa, xb) = pair_decode(nb, x);
        for y in 0..n {
            let (ya, yb) = pair_decode(nb, y);
            let first = a.mul_idx(xa, action.apply(xb, ya));
            table[x * n + y] = pair_encode(nb, first, b.mul_idx(xb, yb)) as u32;
        }
    }
    Ok(FiniteMonoid::from_flat(
        table,
        n,
        format!("semidirect({},{})", a.label(), b.label()),
    )?)
}

/// A function `B → A` stored as the tuple of its values indexed by B's
/// elements. With B finite every function has finite support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FnFin {
    pub values: Vec<usize>,
}

impl FnFin {
    /// The all-identity function `1̄`.
    pub fn one(a: &FiniteMonoid, b_order: usize) -> Self {
        Self {
            values: vec![a.identity_index(); b_order],
        }
    }

    pub fn code(&self, a_order: usize) -> usize {
        fnfin_encode(&self.values, a_order)
    }

    pub fn from_code(code: usize, a_order: usize, b_order: usize) -> Self {
        Self {
            values: fnfin_decode(code, a_order, b_order),
        }
    }
}

/// Mixed-radix code of a value tuple; the last position is the
/// least-significant digit.
pub fn fnfin_encode(values: &[usize], a_order: usize) -> usize {
    values.iter().fold(0, |acc, &v| acc * a_order + v)
}

pub fn fnfin_decode(code: usize, a_order: usize, b_order: usize) -> Vec<usize> {
    let mut values = vec![0usize; b_order];
    let mut rest = code;
    for slot in values.iter_mut().rev() {
        *slot = rest % a_order;
        rest /= a_order;
    }
    values
}

/// The shift `(x)^b g = (xb)g`.
pub fn fn_shift(b_monoid: &FiniteMonoid, g: &FnFin, by: usize) -> FnFin {
    let values = (0..g.values.len())
        .map(|x| g.values[b_monoid.mul_idx(x, by)])
        .collect();
    FnFin { values }
}

/// Pointwise product in `A^{⊕B}`.
pub fn fnfin_mul(a_monoid: &FiniteMonoid, f: &FnFin, g: &FnFin) -> FnFin {
    let values = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(&x, &y)| a_monoid.mul_idx(x, y))
        .collect();
    FnFin { values }
}

/// `A^{⊕B}` as a monoid in its own right, elements being function codes.
pub fn power_monoid(
    a: &FiniteMonoid,
    b: &FiniteMonoid,
    cap: usize,
) -> Result<FiniteMonoid, ProductError> {
    let n_f = checked_pow(a.order(), b.order());
    let n = check_cap(n_f, cap)?;
    let table = power_table(a, b.order(), n);
    Ok(FiniteMonoid::from_flat(
        table,
        n,
        format!("power({},{})", a.label(), b.label()),
    )?)
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// Raw pointwise multiplication table on function codes.
pub(crate) fn power_table(a: &FiniteMonoid, b_order: usize, n_f: usize) -> Vec<u32> {
    let na = a.order();
    let decoded: Vec<Vec<usize>> = (0..n_f).map(|c| fnfin_decode(c, na, b_order)).collect();
    let mut table = vec![0u32; n_f * n_f];
    let mut buf = vec![0usize; b_order];
    for (f, fv) in decoded.iter().enumerate() {
        for (g, gv) in decoded.iter().enumerate() {
            for (slot, (&x, &y)) in buf.iter_mut().zip(fv.iter().zip(gv)) {
                *slot = a.mul_idx(x, y);
            }
            table[f * n_f + g] = fnfin_encode(&buf, na) as u32;
        }
    }
    table
}

/// Raw shift table on function codes: `shift[b][f] = code of ^b f`.
pub(crate) fn shift_table(a_order: usize, b: &FiniteMonoid, n_f: usize) -> Vec<u32> {
    let nb = b.order();
    let mut table = vec![0u32; nb * n_f];
    for code in 0..n_f {
        let values = fnfin_decode(code, a_order, nb);
        for by in 0..nb {
            let shifted: Vec<usize> = (0..nb).map(|x| values[b.mul_idx(x, by)]).collect();
            table[by * n_f + code] = fnfin_encode(&shifted, a_order) as u32;
        }
    }
    table
}

/// Restricted wreath product `A wr B` on the carrier `A^{⊕B} × B` with
/// `(f,b)(g,b') = (f·^b g, b·b')` and identity `(1̄, 1_B)`. Pairs are
/// encoded `fcode·|B| + b`.
pub fn wreath_product(
    a: &FiniteMonoid,
    b: &FiniteMonoid,
    cap: usize,
) -> Result<FiniteMonoid, ProductError> {
    let n_f_big = checked_pow(a.order(), b.order());
    let n = check_cap(n_f_big.saturating_mul(b.order() as u128), cap)?;
    let n_f = (n_f_big) as usize;
    let nb = b.order();
    let power = power_table(a, nb, n_f);
    let shifts = shift_table(a.order(), b, n_f);
    let mut table = vec![0u32; n * n];
    for x in 0..n {
        let (xf, xb) = pair_decode(nb, x);
        for y in 0..n {
            let (yf, yb) = pair_decode(nb, y);
            let shifted = shifts[xb * n_f + yf] as usize;
            let f = power[xf * n_f + shifted] as usize;
            table[x * n + y] = pair_encode(nb, f, b.mul_idx(xb, yb)) as u32;
        }
    }
    Ok(FiniteMonoid::from_flat(
        table,
        n,
        format!("wreath({},{})", a.label(), b.label()),
    )?)
}
