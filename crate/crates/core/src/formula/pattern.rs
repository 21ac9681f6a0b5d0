use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Formula;

/// Property specification patterns over events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternKind {
    /// `G !p`
    Absence,
    /// `F r`
    Existence,
    /// `G p`
    Invariance,
    /// `G (q -> F r)`
    Response,
}

impl PatternKind {
    pub fn arity(self) -> usize {
        match self {
            PatternKind::Response => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PatternKind::Absence => "absence",
            PatternKind::Existence => "existence",
            PatternKind::Invariance => "invariance",
            PatternKind::Response => "response",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("{kind} pattern takes {expected} argument(s), got {found}")]
    Arity {
        kind: PatternKind,
        expected: usize,
        found: usize,
    },
    #[error("pattern argument `{0}` contains a temporal operator")]
    TemporalArgument(Formula),
}

/// A validated pattern instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    kind: PatternKind,
    args: Vec<Formula>,
}

impl Pattern {
    pub fn new(kind: PatternKind, args: Vec<Formula>) -> Result<Self, PatternError> {
        if args.len() != kind.arity() {
            return Err(PatternError::Arity {
                kind,
                expected: kind.arity(),
                found: args.len(),
            });
        }
        if let Some(bad) = args.iter().find(|a| !a.is_temporal_free()) {
            return Err(PatternError::TemporalArgument(bad.clone()));
        }
        Ok(Pattern { kind, args })
    }

    pub fn kind(&self) -> PatternKind {
        self.kind
    }

    pub fn args(&self) -> &[Formula] {
        &self.args
    }

    pub fn to_formula(&self) -> Formula {
        let arg = |i: usize| self.args[i].clone();
        match self.kind {
            PatternKind::Absence => Formula::always(Formula::not(arg(0))),
            PatternKind::Invariance => Formula::always(arg(0)),
            PatternKind::Existence => Formula::eventually(arg(0)),
            PatternKind::Response => {
                Formula::always(Formula::implies(arg(0), Formula::eventually(arg(1))))
            }
        }
    }
}

pub fn make_pattern(kind: PatternKind, args: &[Formula]) -> Result<Formula, PatternError> {
    Pattern::new(kind, args.to_vec()).map(|p| p.to_formula())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::fragment_check;
    use proptest::prelude::*;

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn pattern_examples() {
        let f = make_pattern(PatternKind::Response, &[a("s08"), a("s07")]).unwrap();
        assert_eq!(f.render(), "G (s08 -> F s07)");
        let f = make_pattern(PatternKind::Absence, &[a("p115")]).unwrap();
        assert_eq!(f.render(), "G !p115");
        let f = make_pattern(PatternKind::Existence, &[a("r")]).unwrap();
        assert_eq!(f.render(), "F r");
        let f = make_pattern(PatternKind::Invariance, &[a("p")]).unwrap();
        assert_eq!(f.render(), "G p");
    }

    #[test]
    fn pattern_errors() {
        assert_eq!(
            make_pattern(PatternKind::Response, &[a("q")]),
            Err(PatternError::Arity {
                kind: PatternKind::Response,
                expected: 2,
                found: 1
            })
        );
        assert!(matches!(
            make_pattern(PatternKind::Absence, &[a("p"), a("q")]),
            Err(PatternError::Arity { .. })
        ));
        let temporal = Formula::eventually(a("p"));
        assert_eq!(
            make_pattern(PatternKind::Existence, std::slice::from_ref(&temporal)),
            Err(PatternError::TemporalArgument(temporal))
        );
    }

    fn temporal_free() -> impl Strategy<Value = Formula> {
        let leaf = prop::sample::select(vec!["p", "q", "r"]).prop_map(Formula::atom);
        leaf.prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Formula::and(x, y)),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Formula::or(x, y)),
                (inner.clone(), inner).prop_map(|(x, y)| Formula::implies(x, y)),
            ]
        })
    }

    proptest! {
        #[test]
        fn patterns_stay_in_fragment(
            kind in prop::sample::select(vec![
                PatternKind::Absence,
                PatternKind::Existence,
                PatternKind::Invariance,
                PatternKind::Response,
            ]),
            x in temporal_free(),
            y in temporal_free(),
        ) {
            let args: Vec<Formula> = [x, y].into_iter().take(kind.arity()).collect();
            let f = make_pattern(kind, &args).unwrap();
            prop_assert!(fragment_check(&f).is_ok());
        }
    }
}
