//! Formulas of the propositional temporal fragment: atoms, boolean connectives,
//! `G` (always) and `F` (eventually).
//!
//! The concrete syntax is plain ASCII:
//!
//! ```text
//! formula := imp
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | "G" unary | "F" unary | atom | "(" formula ")"
//! ```
//!
//! `G` and `F` are reserved words and never parse as atoms.

mod fragment;
mod parser;
mod pattern;

use std::collections::BTreeSet;
use std::fmt;

pub use fragment::{fragment_check, FragmentViolation, ViolationKind};
pub use parser::{parse, ParseError, ParseErrorKind};
pub use pattern::{make_pattern, Pattern, PatternError, PatternKind};

/// Abstract syntax of a formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Always(Box<Formula>),
    Eventually(Box<Formula>),
}

/// Returns true if `s` matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Identifiers that the parser treats as operators.
pub fn is_reserved(s: &str) -> bool {
    s == "G" || s == "F"
}

impl Formula {
    /// Builds an atom. The name is expected to be a valid identifier; this is
    /// checked in debug builds only, use [`Formula::try_atom`] for untrusted input.
    pub fn atom(name: impl Into<String>) -> Formula {
        let name = name.into();
        debug_assert!(
            is_identifier(&name) && !is_reserved(&name),
            "bad atom {name:?}"
        );
        Formula::Atom(name)
    }

    pub fn try_atom(name: &str) -> Option<Formula> {
        (is_identifier(name) && !is_reserved(name)).then(|| Formula::Atom(name.to_string()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn always(f: Formula) -> Formula {
        Formula::Always(Box::new(f))
    }

    pub fn eventually(f: Formula) -> Formula {
        Formula::Eventually(Box::new(f))
    }

    /// Left-fold conjunction. `None` for an empty input (the empty conjunction is true).
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    /// Left-fold disjunction. `None` for an empty input.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Option<Formula> {
        items.into_iter().reduce(Formula::or)
    }

    pub fn is_temporal(&self) -> bool {
        matches!(self, Formula::Always(_) | Formula::Eventually(_))
    }

    /// True if no `G` or `F` occurs anywhere in the formula.
    pub fn is_temporal_free(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(a) => a.is_temporal_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_temporal_free() && b.is_temporal_free()
            }
            Formula::Always(_) | Formula::Eventually(_) => false,
        }
    }

    /// An atom or a negated atom.
    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(a) => matches!(**a, Formula::Atom(_)),
            _ => false,
        }
    }

    /// Splits a literal into its atom name and polarity.
    pub fn as_literal(&self) -> Option<(&str, bool)> {
        match self {
            Formula::Atom(name) => Some((name, true)),
            Formula::Not(a) => match &**a {
                Formula::Atom(name) => Some((name, false)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Set of atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(name) => {
                out.insert(name.clone());
            }
            Formula::Not(a) | Formula::Always(a) | Formula::Eventually(a) => a.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Number of `F` occurrences.
    pub fn eventuality_count(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(a) | Formula::Always(a) => a.eventuality_count(),
            Formula::Eventually(a) => 1 + a.eventuality_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.eventuality_count() + b.eventuality_count()
            }
        }
    }

    /// Number of `G`/`F` occurrences.
    pub fn temporal_count(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(a) => a.temporal_count(),
            Formula::Always(a) | Formula::Eventually(a) => 1 + a.temporal_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.temporal_count() + b.temporal_count()
            }
        }
    }

    /// Flattens a tree of `|` into its disjuncts, left to right. A formula that is
    /// not a disjunction yields itself.
    pub fn disjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::Or(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Pushes every negation down to the atoms, dualising `G`/`F` on the way.
    ///
    /// Positive implications are left in place. `!(a -> b)` becomes `a & !b`,
    /// `!G a` becomes `F !a` and `!F a` becomes `G !a`.
    pub fn push_negation(&self) -> Formula {
        match self {
            Formula::Atom(_) => self.clone(),
            Formula::Not(inner) => negate(inner),
            Formula::And(a, b) => Formula::and(a.push_negation(), b.push_negation()),
            Formula::Or(a, b) => Formula::or(a.push_negation(), b.push_negation()),
            Formula::Implies(a, b) => Formula::implies(a.push_negation(), b.push_negation()),
            Formula::Always(a) => Formula::always(a.push_negation()),
            Formula::Eventually(a) => Formula::eventually(a.push_negation()),
        }
    }

    /// Canonical text; see the module docs for the grammar.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

// Negation-normal form of `!f`.
fn negate(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) => Formula::not(f.clone()),
        Formula::Not(inner) => inner.push_negation(),
        Formula::And(a, b) => Formula::or(negate(a), negate(b)),
        Formula::Or(a, b) => Formula::and(negate(a), negate(b)),
        Formula::Implies(a, b) => Formula::and(a.push_negation(), negate(b)),
        Formula::Always(a) => Formula::eventually(negate(a)),
        Formula::Eventually(a) => Formula::always(negate(a)),
    }
}

// Binding strength, loosest first.
const PREC_IMPLIES: u8 = 0;
const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_UNARY: u8 = 3;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => PREC_IMPLIES,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        _ => PREC_UNARY,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if precedence(f) < min {
        write!(out, "(")?;
        write_formula(f, out)?;
        write!(out, ")")
    } else {
        write_formula(f, out)
    }
}

fn write_formula(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::Atom(name) => write!(out, "{name}"),
        Formula::Not(a) => {
            write!(out, "!")?;
            write_at(a, PREC_UNARY, out)
        }
        Formula::Always(a) => {
            write!(out, "G ")?;
            write_at(a, PREC_UNARY, out)
        }
        Formula::Eventually(a) => {
            write!(out, "F ")?;
            write_at(a, PREC_UNARY, out)
        }
        // `&` and `|` fold to the left, `->` to the right.
        Formula::And(a, b) => {
            write_at(a, PREC_AND, out)?;
            write!(out, " & ")?;
            write_at(b, PREC_UNARY, out)
        }
        Formula::Or(a, b) => {
            write_at(a, PREC_OR, out)?;
            write!(out, " | ")?;
            write_at(b, PREC_AND, out)
        }
        Formula::Implies(a, b) => {
            write_at(a, PREC_OR, out)?;
            write!(out, " -> ")?;
            write_at(b, PREC_IMPLIES, out)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
