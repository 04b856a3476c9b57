//! Named small monoids and exhaustive enumeration of all monoids of
//! order ≤ 4, the substrate for verification sweeps.

use crate::monoid::{FiniteMonoid, TableError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown catalog spec `{0}`")]
    UnknownSpec(String),
    #[error("bad parameter in `{spec}`: {reason}")]
    BadParameter { spec: String, reason: String },
    #[error("enumeration supports orders 1..=4, got {0}")]
    BadOrder(usize),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// A catalog entry with cached structural flags.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub monoid: FiniteMonoid,
    pub regular: bool,
    pub group: bool,
    pub commutative: bool,
    pub idempotent_count: usize,
}

impl CatalogEntry {
    pub fn new(monoid: FiniteMonoid) -> Self {
        let regular = monoid.is_regular().is_regular();
        let group = monoid.is_group();
        let commutative = is_commutative(&monoid);
        let idempotent_count = monoid.idempotents().len();
        Self {
            name: monoid.label().to_string(),
            monoid,
            regular,
            group,
            commutative,
            idempotent_count,
        }
    }
}

fn is_commutative(m: &FiniteMonoid) -> bool {
    use crate::monoid::MonoidOps;
    let n = m.order();
    (0..n).all(|i| (i + 1..n).all(|j| m.mul_idx(i, j) == m.mul_idx(j, i)))
}

/// Build a named monoid.
///
/// Accepted specs:
/// * `trivial` — the one-element monoid
/// * `zn:k` — cyclic group of order `k`
/// * `u1` — the two-element semilattice `{1, 0}` with absorbing zero,
///   labeled with the identity at index 0 and the zero at index 1
/// * `monogenic:k,m` — `⟨x | x^(k+m) = x^k⟩`, order `k+m`
/// * `t2` — all four self-maps of a two-point set, composing left to right
/// * `sym:3` — the symmetric group on three points, order 6
pub fn named(spec: &str) -> Result<FiniteMonoid, CatalogError> {
    let spec = spec.trim();
    if spec == "trivial" {
        return Ok(FiniteMonoid::from_rows(&[vec![0]], "trivial")?);
    }
    if spec == "u1" {
        return Ok(FiniteMonoid::from_rows(&[vec![0, 1], vec![1, 1]], "u1")?);
    }
    if spec == "t2" {
        return Ok(transformation_monoid_2());
    }
    if let Some(arg) = spec.strip_prefix("zn:") {
        let k: usize = arg.parse().map_err(|_| CatalogError::BadParameter {
            spec: spec.to_string(),
            reason: format!("`{arg}` is not a positive integer"),
        })?;
        if k == 0 {
            return Err(CatalogError::BadParameter {
                spec: spec.to_string(),
                reason: "order must be >= 1".into(),
            });
        }
        let rows: Vec<Vec<usize>> = (0..k).map(|i| (0..k).map(|j| (i + j) % k).collect()).collect();
        return Ok(FiniteMonoid::from_rows(&rows, format!("zn:{k}"))?);
    }
    if let Some(arg) = spec.strip_prefix("monogenic:") {
        let parts: Vec<&str> = arg.split(',').collect();
        let parse = |s: &str| -> Result<usize, CatalogError> {
            s.trim().parse().map_err(|_| CatalogError::BadParameter {
                spec: spec.to_string(),
                reason: format!("`{s}` is not a positive integer"),
            })
        };
        if parts.len() != 2 {
            return Err(CatalogError::BadParameter {
                spec: spec.to_string(),
                reason: "expected monogenic:k,m".into(),
            });
        }
        let (k, m) = (parse(parts[0])?, parse(parts[1])?);
        if k == 0 || m == 0 {
            return Err(CatalogError::BadParameter {
                spec: spec.to_string(),
                reason: "k and m must be >= 1".into(),
            });
        }
        return Ok(monogenic(k, m));
    }
    if let Some(arg) = spec.strip_prefix("sym:") {
        if arg.trim() == "3" {
            return Ok(symmetric_3());
        }
        return Err(CatalogError::BadParameter {
            spec: spec.to_string(),
            reason: "only sym:3 is in the catalog".into(),
        });
    }
    Err(CatalogError::UnknownSpec(spec.to_string()))
}

/// `⟨x | x^(k+m) = x^k⟩`: element `i` is `x^i`, exponents reduce into
/// `[0, k+m)` with the tail cycling through `[k, k+m)`.
fn monogenic(k: usize, m: usize) -> FiniteMonoid {
    let n = k + m;
    let reduce = |e: usize| if e < n { e } else { k + (e - k) % m };
    let rows: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| reduce(i + j)).collect()).collect();
    FiniteMonoid::from_rows(&rows, format!("monogenic:{k},{m}")).expect("monogenic table is a monoid")
}

/// All self-maps of `{0,1}` in a fixed labeling: 0 = identity,
/// 1 = constant 0, 2 = constant 1, 3 = swap. Product `f·g` applies `f`
/// first: `(x)(f·g) = ((x)f)g`.
fn transformation_monoid_2() -> FiniteMonoid {
    let maps: [[usize; 2]; 4] = [[0, 1], [0, 0], [1, 1], [1, 0]];
    let index_of = |m: &[usize; 2]| maps.iter().position(|c| c == m).unwrap();
    let rows: Vec<Vec<usize>> = maps
        .iter()
        .map(|f| {
            maps.iter()
                .map(|g| index_of(&[g[f[0]], g[f[1]]]))
                .collect()
        })
        .collect();
    FiniteMonoid::from_rows(&rows, "t2").expect("t2 is a monoid")
}

/// S3 with elements ordered by their one-line notation; composition applies
/// the left factor first, matching `t2`.
fn symmetric_3() -> FiniteMonoid {
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let index_of = |p: &[usize; 3]| perms.iter().position(|c| c == p).unwrap();
    let rows: Vec<Vec<usize>> = perms
        .iter()
        .map(|f| {
            perms
                .iter()
                .map(|g| index_of(&[g[f[0]], g[f[1]], g[f[2]]]))
                .collect()
        })
        .collect();
    FiniteMonoid::from_rows(&rows, "sym:3").expect("sym:3 is a group")
}

/// The fixed roster of named instances used for sweeps and the catalog
/// listing, ascending by order.
pub fn roster() -> Vec<CatalogEntry> {
    ["trivial", "zn:2", "u1", "zn:3", "monogenic:2,1", "t2", "sym:3"]
        .iter()
        .map(|s| CatalogEntry::new(named(s).unwrap()))
        .collect()
}

/// All monoids of order `n` whose identity is element 0, found by filling
/// the free cells depth-first with associativity checked on every
/// determined triple as soon as it becomes determined.
///
/// With `up_to_iso`, the output is one representative per isomorphism
/// class: the lexicographically least flattened table over all carrier
/// relabelings that keep the identity at index 0.
pub fn enumerate_monoids(n: usize, up_to_iso: bool) -> Result<Vec<FiniteMonoid>, CatalogError> {
    if n == 0 || n > 4 {
        return Err(CatalogError::BadOrder(n));
    }
    let mut tables: Vec<Vec<u32>> = Vec::new();
    let mut grid = vec![u32::MAX; n * n];
    for x in 0..n {
        grid[x] = x as u32; // row 0
        grid[x * n] = x as u32; // column 0
    }
    let free: Vec<(usize, usize)> = (1..n)
        .flat_map(|i| (1..n).map(move |j| (i, j)))
        .collect();
    fill(&mut grid, n, &free, 0, &mut tables);

    if up_to_iso {
        let mut canon: std::collections::BTreeSet<Vec<u32>> = std::collections::BTreeSet::new();
        for t in &tables {
            canon.insert(canonical_form(t, n));
        }
        canon
            .into_iter()
            .map(|t| {
                let digits: String = t.iter().map(|d| d.to_string()).collect();
                Ok(FiniteMonoid::from_flat(t, n, format!("enum{n}:{digits}"))?)
            })
            .collect()
    } else {
        tables
            .into_iter()
            .enumerate()
            .map(|(i, t)| Ok(FiniteMonoid::from_flat(t, n, format!("enum{n}#{i}"))?))
            .collect()
    }
}

fn fill(grid: &mut Vec<u32>, n: usize, free: &[(usize, usize)], at: usize, out: &mut Vec<Vec<u32>>) {
    if at == free.len() {
        out.push(grid.clone());
        return;
    }
    let (r, c) = free[at];
    for v in 0..n as u32 {
        grid[r * n + c] = v;
        if partial_associative(grid, n) {
            fill(grid, n, free, at + 1, out);
        }
    }
    grid[r * n + c] = u32::MAX;
}

/// Associativity over all triples whose four lookups are already filled.
fn partial_associative(grid: &[u32], n: usize) -> bool {
    for i in 0..n {
        for j in 0..n {
            let ij = grid[i * n + j];
            if ij == u32::MAX {
                continue;
            }
            for k in 0..n {
                let jk = grid[j * n + k];
                if jk == u32::MAX {
                    continue;
                }
                let left = grid[ij as usize * n + k];
                let right = grid[i * n + jk as usize];
                if left != u32::MAX && right != u32::MAX && left != right {
                    return false;
                }
            }
        }
    }
    true
}

/// Lexicographically least relabeling of an identity-at-0 table over all
/// permutations fixing index 0.
pub fn canonical_form(table: &[u32], n: usize) -> Vec<u32> {
    let mut best: Option<Vec<u32>> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    permute_rest(&mut perm, 1, &mut |p| {
        let mut relabeled = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                relabeled[p[i] * n + p[j]] = p[table[i * n + j] as usize] as u32;
            }
        }
        if best.as_ref().is_none_or(|b| relabeled < *b) {
            best = Some(relabeled);
        }
    });
    best.unwrap()
}

fn permute_rest(perm: &mut Vec<usize>, from: usize, visit: &mut impl FnMut(&[usize])) {
    if from >= perm.len() {
        visit(perm);
        return;
    }
    for i in from..perm.len() {
        perm.swap(from, i);
        permute_rest(perm, from + 1, visit);
        perm.swap(from, i);
    }
}
