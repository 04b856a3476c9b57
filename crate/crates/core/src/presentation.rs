//! Assembly of monoid presentations. Builds the standard presentation of a
//! semidirect product from presentations of the factors and a generator
//! action; no rewriting or equivalence checking is performed, this is
//! assembly only.

use std::collections::BTreeMap;
use thiserror::Error;

/// A word over generator symbols; the empty word denotes 1.
pub type Word = Vec<String>;

/// A monoid presentation `[generators ; relations]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relations: Vec<(Word, Word)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("relation uses symbol `{0}` that is not a generator")]
    UnknownSymbol(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("no action word defined for (y={y}, x={x})")]
    UndefinedAction { y: String, x: String },
}

impl Presentation {
    /// Checks that every relation symbol is a declared generator.
    pub fn new(generators: Vec<String>, relations: Vec<(Word, Word)>) -> Result<Self, PresentationError> {
        let mut seen = std::collections::BTreeSet::new();
        for g in &generators {
            if !seen.insert(g.clone()) {
                return Err(PresentationError::DuplicateGenerator(g.clone()));
            }
        }
        for (lhs, rhs) in &relations {
            for sym in lhs.iter().chain(rhs) {
                if !seen.contains(sym) {
                    return Err(PresentationError::UnknownSymbol(sym.clone()));
                }
            }
        }
        Ok(Self {
            generators,
            relations,
        })
    }

    /// Text form: one generator list line, then one relation per line
    /// `lhs = rhs`, symbols space-separated, `1` for the empty word.
    pub fn to_text(&self) -> String {
        let mut out = self.generators.join(" ");
        out.push('\n');
        for (lhs, rhs) in &self.relations {
            out.push_str(&word_text(lhs));
            out.push_str(" = ");
            out.push_str(&word_text(rhs));
            out.push('\n');
        }
        out
    }
}

fn word_text(w: &Word) -> String {
    if w.is_empty() {
        "1".to_string()
    } else {
        w.join(" ")
    }
}

/// Output of the semidirect presentation builder: the presentation
/// `[X, Y ; R, S, T]` plus any renamings applied to keep the generator
/// sets disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemidirectPresentation {
    pub presentation: Presentation,
    /// `(old, new)` pairs for B-side generators renamed on clash.
    pub renamed: Vec<(String, String)>,
}

/// Assemble the presentation of `A ⋊ B` from `℘_A = [X; R]`,
/// `℘_B = [Y; S]`, and a word `(x)θ_y` over `X` for every `(y, x)`.
///
/// Generators are `X ∪ Y` (B-side symbols prefixed on clash), relations are
/// `R ∪ S ∪ T` with `T = { y·x = (x)θ_y · y }`, so `|T| = |X|·|Y|`.
pub fn build_semidirect_presentation(
    p_a: &Presentation,
    p_b: &Presentation,
    gen_action: &BTreeMap<(String, String), Word>,
) -> Result<SemidirectPresentation, PresentationError> {
    for y in &p_b.generators {
        for x in &p_a.generators {
            let key = (y.clone(), x.clone());
            if !gen_action.contains_key(&key) {
                return Err(PresentationError::UndefinedAction {
                    y: y.clone(),
                    x: x.clone(),
                });
            }
        }
    }

    let x_set: std::collections::BTreeSet<&String> = p_a.generators.iter().collect();
    let mut renamed = Vec::new();
    let mut rename: BTreeMap<String, String> = BTreeMap::new();
    for y in &p_b.generators {
        if x_set.contains(y) {
            let mut fresh = format!("b_{y}");
            while x_set.contains(&fresh) || rename.values().any(|v| *v == fresh) {
                fresh = format!("b_{fresh}");
            }
            renamed.push((y.clone(), fresh.clone()));
            rename.insert(y.clone(), fresh);
        }
    }
    let renamed_word = |w: &Word| -> Word {
        w.iter()
            .map(|s| rename.get(s).cloned().unwrap_or_else(|| s.clone()))
            .collect()
    };

    let mut generators = p_a.generators.clone();
    generators.extend(p_b.generators.iter().map(|y| {
        rename.get(y).cloned().unwrap_or_else(|| y.clone())
    }));

    let mut relations = p_a.relations.clone();
    relations.extend(
        p_b.relations
            .iter()
            .map(|(l, r)| (renamed_word(l), renamed_word(r))),
    );
    for x in &p_a.generators {
        for y in &p_b.generators {
            let image = &gen_action[&(y.clone(), x.clone())];
            for sym in image {
                if !x_set.contains(sym) {
                    return Err(PresentationError::UnknownSymbol(sym.clone()));
                }
            }
            let y_out = rename.get(y).cloned().unwrap_or_else(|| y.clone());
            let lhs = vec![y_out.clone(), x.clone()];
            let mut rhs = image.clone();
            rhs.push(y_out);
            relations.push((lhs, rhs));
        }
    }

    Ok(SemidirectPresentation {
        presentation: Presentation::new(generators, relations)?,
        renamed,
    })
}
