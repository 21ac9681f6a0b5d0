//! Reacting to a trigger formula: build the tree for the trigger conjoined with
//! the object's specification, read candidate actions off the open branches,
//! and repair the specification so that it stays consistent with the trigger.
//!
//! Repair happens in three passes over the object's formulas:
//!
//! 1. a formula inconsistent with the trigger on its own is removed;
//! 2. in a top-level disjunction, every disjunct that is inconsistent with the
//!    trigger together with the object's other surviving formulas is dropped;
//! 3. if the trigger and the survivors are still jointly inconsistent, formulas
//!    are kept greedily (external ones newest first, then mined ones in order)
//!    and the rest are displaced.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;
use thiserror::Error;

use crate::formula::{fragment_check, Formula};
use crate::miner::{AttributedFormula, Origin, Specification};
use crate::tableau::{
    build_tree, is_satisfiable, is_unsatisfiable, Branch, SignedLiteral, TableauError, TruthTree,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReactError {
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("specification for object `{0}` is already contradictory")]
    InconsistentSpecification(String),
    #[error("trigger `{0}` is unsatisfiable")]
    UnsatisfiableTrigger(Formula),
}

impl From<crate::formula::FragmentViolation> for ReactError {
    fn from(v: crate::formula::FragmentViolation) -> Self {
        ReactError::Tableau(TableauError::Fragment(v))
    }
}

#[derive(Debug, Clone)]
pub struct ReactionResult {
    pub object: String,
    pub trigger: Formula,
    pub tree: TruthTree,
    /// Literal sets of the selected open branches.
    pub open_literals: Vec<BTreeSet<SignedLiteral>>,
    /// All literals on the selected closed branches.
    pub closed_literals: BTreeSet<SignedLiteral>,
    /// Formulas inconsistent with the trigger on their own.
    pub removed: Vec<AttributedFormula>,
    /// Disjunctions with some alternatives dropped: (before, after).
    pub rewritten: Vec<(AttributedFormula, AttributedFormula)>,
    /// Formulas dropped because they were jointly inconsistent with the trigger
    /// and the formulas kept ahead of them.
    pub displaced: Vec<AttributedFormula>,
    pub updated_spec: Specification,
    /// Candidate next places, best supported first.
    pub actions: Vec<String>,
}

fn conjoin(first: Formula, rest: impl IntoIterator<Item = Formula>) -> Formula {
    rest.into_iter().fold(first, Formula::and)
}

fn satisfiable_with(f: &Formula, others: &[Formula]) -> Result<bool, TableauError> {
    is_satisfiable(&conjoin(f.clone(), others.iter().cloned()))
}

/// Runs one reasoning cycle for `trigger` observed for or imposed on `object`.
pub fn react(
    sigma: &Specification,
    trigger: &Formula,
    object: &str,
) -> Result<ReactionResult, ReactError> {
    fragment_check(trigger)?;
    if !check_consistency(sigma, object)? {
        return Err(ReactError::InconsistentSpecification(object.to_string()));
    }
    if !is_satisfiable(trigger)? {
        return Err(ReactError::UnsatisfiableTrigger(trigger.clone()));
    }

    let root = conjoin(trigger.clone(), sigma.conjunction(object));
    let tree = build_tree(&root)?;

    let trigger_atoms = trigger.atoms();
    let selected: Vec<&Branch> = tree
        .branches()
        .iter()
        .filter(|b| b.literals().iter().any(|l| trigger_atoms.contains(&l.atom)))
        .collect();
    let open_literals: Vec<BTreeSet<SignedLiteral>> = selected
        .iter()
        .filter(|b| b.is_open())
        .map(|b| b.literals())
        .collect();
    let closed_literals: BTreeSet<SignedLiteral> = selected
        .iter()
        .filter(|b| !b.is_open())
        .flat_map(|b| b.literals())
        .collect();

    let mut updated = sigma.clone();
    let mut removed = Vec::new();
    let mut rewritten = Vec::new();
    let mut displaced = Vec::new();

    for entry in sigma.for_object(object) {
        if !satisfiable_with(trigger, std::slice::from_ref(&entry.formula))? {
            updated.remove(&entry.formula, object);
            removed.push(entry.clone());
        }
    }

    let survivors: Vec<AttributedFormula> = updated.for_object(object).cloned().collect();
    for (i, entry) in survivors.iter().enumerate() {
        let disjuncts = entry.formula.disjuncts();
        if disjuncts.len() < 2 {
            continue;
        }
        let context: Vec<Formula> = survivors
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, e)| e.formula.clone())
            .collect();
        let mut kept = Vec::new();
        for d in &disjuncts {
            let mut with_d = context.clone();
            with_d.push((*d).clone());
            if satisfiable_with(trigger, &with_d)? {
                kept.push((*d).clone());
            }
        }
        // All alternatives failing means the context itself clashes with the
        // trigger; the joint pass below deals with that.
        if kept.is_empty() || kept.len() == disjuncts.len() {
            continue;
        }
        let after_formula = Formula::disjunction(kept).expect("non-empty");
        let mut after = entry.clone();
        after.formula = after_formula.clone();
        updated.replace(&entry.formula, object, after_formula);
        rewritten.push((entry.clone(), after));
    }

    let survivors: Vec<AttributedFormula> = updated.for_object(object).cloned().collect();
    let mut order: Vec<&AttributedFormula> = survivors
        .iter()
        .rev()
        .filter(|e| e.origin == Origin::External)
        .collect();
    order.extend(survivors.iter().filter(|e| e.origin != Origin::External));
    let mut kept: Vec<Formula> = Vec::new();
    for entry in order {
        kept.push(entry.formula.clone());
        if !satisfiable_with(trigger, &kept)? {
            kept.pop();
            updated.remove(&entry.formula, object);
            displaced.push(entry.clone());
        }
    }

    updated.insert(AttributedFormula::new(
        trigger.clone(),
        object,
        Origin::External,
    ));

    let actions = rank_actions(&open_literals, &trigger_atoms);

    Ok(ReactionResult {
        object: object.to_string(),
        trigger: trigger.clone(),
        tree,
        open_literals,
        closed_literals,
        removed,
        rewritten,
        displaced,
        updated_spec: updated,
        actions,
    })
}

// Positive atoms at witness worlds, by number of open branches supporting them,
// ties in name order.
fn rank_actions(open: &[BTreeSet<SignedLiteral>], exclude: &BTreeSet<String>) -> Vec<String> {
    let mut support: BTreeMap<&str, usize> = BTreeMap::new();
    for set in open {
        let atoms: BTreeSet<&str> = set
            .iter()
            .filter(|l| l.positive && l.label.is_witness() && !exclude.contains(&l.atom))
            .map(|l| l.atom.as_str())
            .collect();
        for a in atoms {
            *support.entry(a).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = support.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    ranked.into_iter().map(|(a, _)| a.to_string()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entailment {
    Entailed,
    NotEntailed,
}

/// Does the object's specification entail `f`? Decided by refuting the
/// specification together with the negation of `f`.
pub fn check_entailment(
    sigma: &Specification,
    object: &str,
    f: &Formula,
) -> Result<Entailment, ReactError> {
    let negated = Formula::not(f.clone()).push_negation();
    let root = match sigma.conjunction(object) {
        Some(c) => Formula::and(c, negated),
        None => negated,
    };
    Ok(if is_unsatisfiable(&root)? {
        Entailment::Entailed
    } else {
        Entailment::NotEntailed
    })
}

/// True iff the object's formulas are jointly satisfiable. An object with no
/// formulas is trivially consistent.
pub fn check_consistency(sigma: &Specification, object: &str) -> Result<bool, ReactError> {
    match sigma.conjunction(object) {
        Some(c) => Ok(is_satisfiable(&c)?),
        None => Ok(true),
    }
}

impl ReactionResult {
    /// JSON summary; formulas in their text syntax.
    pub fn to_json(&self, with_tree: bool) -> String {
        let entry = |e: &AttributedFormula| json!({"object": e.object, "formula": e.formula.render(), "origin": e.origin});
        let mut doc = json!({
            "object": self.object,
            "trigger": self.trigger.render(),
            "actions": self.actions,
            "open_literals": self.open_literals,
            "closed_literals": self.closed_literals,
            "removed": self.removed.iter().map(entry).collect::<Vec<_>>(),
            "rewritten": self.rewritten.iter().map(|(b, a)| json!({
                "before": entry(b),
                "after": entry(a),
            })).collect::<Vec<_>>(),
            "displaced": self.displaced.iter().map(entry).collect::<Vec<_>>(),
        });
        if with_tree {
            doc["tree"] = json!(self.tree.dump());
        }
        serde_json::to_string_pretty(&doc).expect("reaction serializes")
    }
}
