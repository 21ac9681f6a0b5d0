//! Labeled semantic tableaux for the temporal fragment.
//!
//! Entries carry a world label: [`WorldLabel::Now`] for the initial moment and
//! [`WorldLabel::Witness`] for the worlds introduced by `F`. `G a` is instantiated
//! at every world present on the branch and again whenever a new witness
//! appears. A branch closes when it holds an atom and its negation at the same
//! label.
//!
//! Time is reflexive: `G a` and `F a` both include the current moment. An open,
//! finished branch describes a lasso whose loop visits `Now` and every witness,
//! so one witness per distinct eventuality serves the whole branch; this bounds
//! the number of worlds and makes construction terminate.

mod build;
mod dump;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::formula::{fragment_check, Formula, FragmentViolation};

pub use build::DEFAULT_NODE_BUDGET;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableauError {
    #[error(transparent)]
    Fragment(#[from] FragmentViolation),
    #[error("truth tree exceeded the budget of {budget} nodes")]
    ResourceExhausted { budget: usize },
}

/// World at which an entry is asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorldLabel {
    Now,
    /// Witness ids start at 1 and are allocated in order of instantiation.
    Witness(u32),
}

impl WorldLabel {
    pub fn is_witness(self) -> bool {
        matches!(self, WorldLabel::Witness(_))
    }
}

/// `a`, `b`, ..., `z`, `aa`, `ab`, ...
fn witness_letters(mut id: u32) -> String {
    let mut out = Vec::new();
    while id > 0 {
        id -= 1;
        out.push(b'a' + (id % 26) as u8);
        id /= 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii letters")
}

impl fmt::Display for WorldLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorldLabel::Now => Ok(()),
            WorldLabel::Witness(id) => write!(f, "1.[{}]", witness_letters(*id)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledFormula {
    pub label: WorldLabel,
    pub formula: Formula,
}

impl LabeledFormula {
    pub fn new(label: WorldLabel, formula: Formula) -> Self {
        LabeledFormula { label, formula }
    }

    pub fn now(formula: Formula) -> Self {
        LabeledFormula {
            label: WorldLabel::Now,
            formula,
        }
    }
}

impl fmt::Display for LabeledFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            WorldLabel::Now => write!(f, "{}", self.formula),
            label => write!(f, "{label}: {}", self.formula),
        }
    }
}

/// An atom or negated atom asserted at a world.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedLiteral {
    pub atom: String,
    pub positive: bool,
    pub label: WorldLabel,
}

impl SignedLiteral {
    pub fn new(atom: impl Into<String>, positive: bool, label: WorldLabel) -> Self {
        SignedLiteral {
            atom: atom.into(),
            positive,
            label,
        }
    }

    pub fn to_labeled(&self) -> LabeledFormula {
        let atom = Formula::Atom(self.atom.clone());
        let formula = if self.positive {
            atom
        } else {
            Formula::not(atom)
        };
        LabeledFormula::new(self.label, formula)
    }
}

impl fmt::Display for SignedLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.positive { "" } else { "!" };
        match self.label {
            WorldLabel::Now => write!(f, "{sign}{}", self.atom),
            label => write!(f, "{sign}{}@{label}", self.atom),
        }
    }
}

impl Serialize for SignedLiteral {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchStatus {
    Open,
    Closed,
}

/// A finished root-to-leaf path of the tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub entries: Vec<LabeledFormula>,
    pub status: BranchStatus,
    /// Indices into `entries` of the complementary literals that closed the branch.
    pub closing_pair: Option<(usize, usize)>,
}

impl Branch {
    pub fn is_open(&self) -> bool {
        self.status == BranchStatus::Open
    }

    pub fn literals(&self) -> BTreeSet<SignedLiteral> {
        self.entries
            .iter()
            .filter_map(|e| {
                e.formula
                    .as_literal()
                    .map(|(atom, positive)| SignedLiteral::new(atom, positive, e.label))
            })
            .collect()
    }

    /// Worlds in order of first appearance on the branch, `Now` first.
    pub fn worlds(&self) -> Vec<WorldLabel> {
        let mut out = vec![WorldLabel::Now];
        for e in &self.entries {
            if !out.contains(&e.label) {
                out.push(e.label);
            }
        }
        out
    }

    /// Positive atoms per world; atoms the branch leaves unconstrained are false.
    /// Read as a lasso looping back to `Now`, this is a model of the root formula
    /// whenever the branch is open.
    pub fn valuation(&self) -> Vec<(WorldLabel, BTreeSet<String>)> {
        let literals = self.literals();
        self.worlds()
            .into_iter()
            .map(|w| {
                let atoms = literals
                    .iter()
                    .filter(|l| l.label == w && l.positive)
                    .map(|l| l.atom.clone())
                    .collect();
                (w, atoms)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub entry: LabeledFormula,
    pub children: Vec<usize>,
    /// Set on leaves: index of the branch that ends here.
    pub leaf_of: Option<usize>,
}

/// A finished truth tree.
#[derive(Debug, Clone)]
pub struct TruthTree {
    root: Formula,
    branches: Vec<Branch>,
    witness_count: usize,
    nodes: Vec<Node>,
}

impl TruthTree {
    pub fn root(&self) -> &Formula {
        &self.root
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Number of fresh witnesses introduced by `F` while building the tree.
    pub fn witness_count(&self) -> usize {
        self.witness_count
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn open_branches(&self) -> impl Iterator<Item = &Branch> {
        self.branches.iter().filter(|b| b.is_open())
    }

    pub fn closed_branches(&self) -> impl Iterator<Item = &Branch> {
        self.branches.iter().filter(|b| !b.is_open())
    }

    pub fn has_open_branch(&self) -> bool {
        self.branches.iter().any(Branch::is_open)
    }

    pub fn is_closed(&self) -> bool {
        !self.has_open_branch()
    }

    /// Indented text rendering, one entry per line, with `OPEN` / `CLOSED(i,j)`
    /// at the end of every branch.
    pub fn dump(&self) -> String {
        dump::render(self)
    }
}

pub fn build_tree(f: &Formula) -> Result<TruthTree, TableauError> {
    build_tree_with_budget(f, DEFAULT_NODE_BUDGET)
}

pub fn build_tree_with_budget(f: &Formula, budget: usize) -> Result<TruthTree, TableauError> {
    fragment_check(f)?;
    build::build(f, budget)
}

/// True iff the finished tree has an open branch.
pub fn is_satisfiable(f: &Formula) -> Result<bool, TableauError> {
    Ok(build_tree(f)?.has_open_branch())
}

/// True iff every branch of the finished tree is closed.
pub fn is_unsatisfiable(f: &Formula) -> Result<bool, TableauError> {
    Ok(build_tree(f)?.is_closed())
}

/// True iff the tree for the negation (in negation-normal form) is closed.
pub fn is_valid(f: &Formula) -> Result<bool, TableauError> {
    is_unsatisfiable(&Formula::not(f.clone()).push_negation())
}

/// One literal set per open branch; closed branches are skipped.
pub fn open_literal_sets(tree: &TruthTree) -> Vec<BTreeSet<SignedLiteral>> {
    tree.open_branches().map(Branch::literals).collect()
}
