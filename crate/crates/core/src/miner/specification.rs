use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{parse, Formula, ParseError};

/// Where a formula in a specification came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// `G !v` for a node the object never visited.
    Saf,
    /// `F v`, existence.
    Liv1,
    /// `G (u -> F v)`, response between consecutive places.
    Liv2,
    /// Added from outside mining: triggers, hand-written plans.
    External,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Saf => "saf",
            Origin::Liv1 => "liv1",
            Origin::Liv2 => "liv2",
            Origin::External => "external",
        })
    }
}

/// A formula attributed to one object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributedFormula {
    pub formula: Formula,
    pub object: String,
    pub origin: Origin,
    /// How many times the same formula was produced for the object. Informational only.
    pub occurrences: u32,
}

impl AttributedFormula {
    pub fn new(formula: Formula, object: impl Into<String>, origin: Origin) -> Self {
        AttributedFormula {
            formula,
            object: object.into(),
            origin,
            occurrences: 1,
        }
    }

    pub fn same_entry(&self, other: &AttributedFormula) -> bool {
        self.formula == other.formula && self.object == other.object
    }
}

impl fmt::Display for AttributedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.object, self.formula)
    }
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("invalid specification document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("entry {index}: {source}")]
    Formula { index: usize, source: ParseError },
    #[error("entry {index}: duplicate formula `{formula}` for object `{object}`")]
    Duplicate {
        index: usize,
        formula: String,
        object: String,
    },
}

/// An ordered set of attributed formulas, unique by (formula, object).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Specification {
    entries: Vec<AttributedFormula>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    formulas: Vec<EntryDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    object: String,
    formula: String,
    origin: Origin,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    occurrences: u32,
}

fn one() -> u32 {
    1
}

fn is_one(n: &u32) -> bool {
    *n == 1
}

impl Specification {
    pub fn new() -> Self {
        Specification::default()
    }

    /// Adds an entry; on a duplicate the existing entry's occurrence count grows and
    /// `false` is returned.
    pub fn insert(&mut self, entry: AttributedFormula) -> bool {
        match self.entries.iter_mut().find(|e| e.same_entry(&entry)) {
            Some(existing) => {
                existing.occurrences = existing.occurrences.saturating_add(entry.occurrences);
                false
            }
            None => {
                self.entries.push(entry);
                true
            }
        }
    }

    pub fn contains(&self, formula: &Formula, object: &str) -> bool {
        self.entries
            .iter()
            .any(|e| &e.formula == formula && e.object == object)
    }

    pub fn remove(&mut self, formula: &Formula, object: &str) -> Option<AttributedFormula> {
        let pos = self
            .entries
            .iter()
            .position(|e| &e.formula == formula && e.object == object)?;
        Some(self.entries.remove(pos))
    }

    /// Swaps the formula of an entry in place, keeping its position. If the new
    /// formula already exists for the object the old entry is dropped instead.
    pub fn replace(&mut self, formula: &Formula, object: &str, with: Formula) -> bool {
        if self.contains(&with, object) {
            return self.remove(formula, object).is_some();
        }
        match self
            .entries
            .iter_mut()
            .find(|e| &e.formula == formula && e.object == object)
        {
            Some(e) => {
                e.formula = with;
                true
            }
            None => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &AttributedFormula> {
        self.entries.iter()
    }

    pub fn entries(&self) -> &[AttributedFormula] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn objects(&self) -> BTreeSet<String> {
        self.entries.iter().map(|e| e.object.clone()).collect()
    }

    /// Entries attributed to `object`, in specification order.
    pub fn for_object<'a>(
        &'a self,
        object: &'a str,
    ) -> impl Iterator<Item = &'a AttributedFormula> {
        self.entries.iter().filter(move |e| e.object == object)
    }

    pub fn formulas_for(&self, object: &str) -> Vec<Formula> {
        self.for_object(object).map(|e| e.formula.clone()).collect()
    }

    /// Left-fold conjunction of the object's formulas; `None` when it has none.
    pub fn conjunction(&self, object: &str) -> Option<Formula> {
        Formula::conjunction(self.formulas_for(object))
    }

    /// Formula texts, for comparisons that ignore order and origin.
    pub fn formula_set(&self) -> BTreeSet<(String, String)> {
        self.entries
            .iter()
            .map(|e| (e.object.clone(), e.formula.render()))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let doc = SpecDoc {
            formulas: self
                .entries
                .iter()
                .map(|e| EntryDoc {
                    object: e.object.clone(),
                    formula: e.formula.render(),
                    origin: e.origin,
                    occurrences: e.occurrences,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("specification serializes")
    }

    pub fn from_json(document: &str) -> Result<Self, SpecError> {
        let doc: SpecDoc = serde_json::from_str(document)?;
        let mut spec = Specification::new();
        for (index, e) in doc.formulas.into_iter().enumerate() {
            let formula =
                parse(&e.formula).map_err(|source| SpecError::Formula { index, source })?;
            let entry = AttributedFormula {
                formula,
                object: e.object,
                origin: e.origin,
                occurrences: e.occurrences,
            };
            if spec.iter().any(|x| x.same_entry(&entry)) {
                return Err(SpecError::Duplicate {
                    index,
                    formula: entry.formula.render(),
                    object: entry.object,
                });
            }
            spec.entries.push(entry);
        }
        Ok(spec)
    }
}

impl FromIterator<AttributedFormula> for Specification {
    fn from_iter<I: IntoIterator<Item = AttributedFormula>>(iter: I) -> Self {
        let mut spec = Specification::new();
        for e in iter {
            spec.insert(e);
        }
        spec
    }
}
