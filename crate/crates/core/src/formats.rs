//! Text formats: `.mon` monoid tables, `.act` endomorphism actions, and
//! the decoding sidecars written next to exported product tables.
//!
//! `.mon` grammar: line 1 is the order `n`, lines 2..=n+1 are the table
//! rows as space-separated indices, and any trailing lines starting with
//! `#` are comments. Files without a two-sided identity are rejected.
//!
//! `.act` grammar: line 1 is `|A| |B|`, then `|B|` lines, line `k` giving
//! the images of the map for the k-th element of B as `|A|` indices.

use crate::monoid::{FiniteMonoid, TableError};
use crate::products::{ActionError, EndoAction};
use crate::schutz::SchutzProduct;
use crate::variant::VariantProduct;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonError {
    #[error("syntax error at line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid table{}: {source}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Table {
        line: Option<usize>,
        source: TableError,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActError {
    #[error("syntax error at line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("action sizes {a}x{b} do not match the monoids ({expected_a}x{expected_b})")]
    SizeMismatch {
        a: usize,
        b: usize,
        expected_a: usize,
        expected_b: usize,
    },
    #[error(transparent)]
    Action(#[from] ActionError),
}

/// Parse a `.mon` document. The label is caller-provided (usually the file
/// stem); comments are ignored.
pub fn parse_mon(text: &str, label: impl Into<String>) -> Result<FiniteMonoid, MonError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut cursor = 0usize;
    let n: usize = {
        let line = lines.first().ok_or(MonError::Syntax {
            line: 1,
            msg: "empty file".to_string(),
        })?;
        cursor += 1;
        line.trim().parse().map_err(|_| MonError::Syntax {
            line: 1,
            msg: format!("expected the order, got `{}`", line.trim()),
        })?
    };
    if n == 0 {
        return Err(MonError::Syntax {
            line: 1,
            msg: "order must be at least 1".to_string(),
        });
    }
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let lineno = cursor + i + 1;
        let line = lines.get(cursor + i).ok_or(MonError::Syntax {
            line: lineno,
            msg: format!("missing row {} of {}", i + 1, n),
        })?;
        let mut row = Vec::with_capacity(n);
        for tok in line.split_whitespace() {
            let v: usize = tok.parse().map_err(|_| MonError::Syntax {
                line: lineno,
                msg: format!("`{tok}` is not an index"),
            })?;
            row.push(v);
        }
        if row.len() != n {
            return Err(MonError::Syntax {
                line: lineno,
                msg: format!("row has {} entries, expected {}", row.len(), n),
            });
        }
        rows.push(row);
    }
    for (off, line) in lines[cursor + n..].iter().enumerate() {
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            return Err(MonError::Syntax {
                line: cursor + n + off + 1,
                msg: "trailing content must be comment lines starting with #".to_string(),
            });
        }
    }
    FiniteMonoid::from_rows(&rows, label).map_err(|e| {
        let line = match &e {
            TableError::EntryOutOfRange { row, .. } => Some(row + 2),
            _ => None,
        };
        MonError::Table { line, source: e }
    })
}

/// Render a monoid as a `.mon` document with its label as a trailing
/// comment.
pub fn write_mon(m: &FiniteMonoid) -> String {
    let mut out = format!("{}\n", m.order());
    for row in m.rows() {
        let words: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&words.join(" "));
        out.push('\n');
    }
    out.push_str(&format!("# label: {}\n", m.label()));
    out
}

/// Parse a `.act` document against the monoids it is supposed to act with.
pub fn parse_act(text: &str, a: &FiniteMonoid, b: &FiniteMonoid) -> Result<EndoAction, ActError> {
    let lines: Vec<&str> = text.lines().collect();
    let header = lines.first().ok_or(ActError::Syntax {
        line: 1,
        msg: "empty file".to_string(),
    })?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| {
            t.parse().map_err(|_| ActError::Syntax {
                line: 1,
                msg: format!("`{t}` is not a size"),
            })
        })
        .collect::<Result<_, _>>()?;
    if dims.len() != 2 {
        return Err(ActError::Syntax {
            line: 1,
            msg: "expected `|A| |B|`".to_string(),
        });
    }
    if dims[0] != a.order() || dims[1] != b.order() {
        return Err(ActError::SizeMismatch {
            a: dims[0],
            b: dims[1],
            expected_a: a.order(),
            expected_b: b.order(),
        });
    }
    let mut maps = Vec::with_capacity(dims[1]);
    for k in 0..dims[1] {
        let lineno = k + 2;
        let line = lines.get(k + 1).ok_or(ActError::Syntax {
            line: lineno,
            msg: format!("missing map {} of {}", k + 1, dims[1]),
        })?;
        let row: Vec<usize> = line
            .split_whitespace()
            .map(|t| {
                t.parse().map_err(|_| ActError::Syntax {
                    line: lineno,
                    msg: format!("`{t}` is not an index"),
                })
            })
            .collect::<Result<_, _>>()?;
        maps.push(row);
    }
    Ok(EndoAction::validate(a, b, &maps)?)
}

pub fn write_act(action: &EndoAction) -> String {
    let mut out = format!("{} {}\n", action.a_order(), action.b_order());
    for row in action.rows() {
        let words: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&words.join(" "));
        out.push('\n');
    }
    out
}

/// Sidecar for an exported `A ◇ B` table: one `a p_code b` triple per
/// line, line `k` decoding flat index `k`.
pub fn schutz_sidecar(prod: &SchutzProduct) -> String {
    let mut out = String::new();
    for idx in 0..prod.carrier() {
        let e = prod.decode(idx);
        out.push_str(&format!("{} {} {}\n", e.a, e.p.0, e.b));
    }
    out
}

/// Sidecar for an exported `A ◇v B` table: one `f_code p_code b` triple
/// per line.
pub fn variant_sidecar(prod: &VariantProduct) -> String {
    let mut out = String::new();
    for idx in 0..prod.carrier() {
        let e = prod.decode(idx);
        out.push_str(&format!("{} {} {}\n", e.f, e.p.0, e.b));
    }
    out
}

/// Sidecar for pair carriers (direct, semidirect, wreath): one
/// `major minor` pair per line, where the flat index is
/// `major·minor_order + minor`.
pub fn pair_sidecar(order: usize, minor_order: usize) -> String {
    let mut out = String::new();
    for idx in 0..order {
        out.push_str(&format!("{} {}\n", idx / minor_order, idx % minor_order));
    }
    out
}
