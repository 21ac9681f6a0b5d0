use std::collections::{HashMap, HashSet};

use super::{Branch, BranchStatus, LabeledFormula, Node, TableauError, TruthTree, WorldLabel};
use crate::formula::Formula;

pub const DEFAULT_NODE_BUDGET: usize = 100_000;

enum Rule {
    Literal,
    Alpha(Vec<Formula>),
    Beta(Vec<Formula>),
    Always(Formula),
    Eventually,
}

fn rule(f: &Formula) -> Rule {
    use Formula::*;
    match f {
        Atom(_) => Rule::Literal,
        And(a, b) => Rule::Alpha(vec![(**a).clone(), (**b).clone()]),
        Or(a, b) => Rule::Beta(vec![(**a).clone(), (**b).clone()]),
        Implies(a, b) => Rule::Beta(vec![Formula::not((**a).clone()), (**b).clone()]),
        Always(a) => Rule::Always((**a).clone()),
        Eventually(_) => Rule::Eventually,
        Not(inner) => match &**inner {
            Atom(_) => Rule::Literal,
            Not(a) => Rule::Alpha(vec![(**a).clone()]),
            And(a, b) => Rule::Beta(vec![
                Formula::not((**a).clone()),
                Formula::not((**b).clone()),
            ]),
            Or(a, b) => Rule::Alpha(vec![
                Formula::not((**a).clone()),
                Formula::not((**b).clone()),
            ]),
            Implies(a, b) => Rule::Alpha(vec![(**a).clone(), Formula::not((**b).clone())]),
            // Excluded by the fragment; kept total through the temporal dualities.
            Always(a) => Rule::Alpha(vec![Formula::eventually(Formula::not((**a).clone()))]),
            Eventually(a) => Rule::Alpha(vec![Formula::always(Formula::not((**a).clone()))]),
        },
    }
}

#[derive(Clone, Default)]
struct BranchState {
    entries: Vec<LabeledFormula>,
    done: Vec<bool>,
    present: HashSet<LabeledFormula>,
    literals: HashMap<(WorldLabel, String, bool), usize>,
    worlds: Vec<WorldLabel>,
    witness_for: HashMap<Formula, WorldLabel>,
    // `G` entries and the worlds they have been instantiated at.
    always: Vec<(Formula, Vec<WorldLabel>)>,
    tip: Option<usize>,
    closing: Option<(usize, usize)>,
}

impl BranchState {
    fn first_undone(&self, pred: impl Fn(&Formula) -> bool) -> Option<usize> {
        (0..self.entries.len()).find(|&i| !self.done[i] && pred(&self.entries[i].formula))
    }

    // A β child already holds when it is on the branch, or when it is an
    // eventuality whose witness is already on the branch.
    fn holds(&self, label: WorldLabel, child: &Formula) -> bool {
        if self
            .present
            .contains(&LabeledFormula::new(label, child.clone()))
        {
            return true;
        }
        matches!(child, Formula::Eventually(body) if self.witness_for.contains_key(&**body))
    }

    fn contradicts(&self, label: WorldLabel, child: &Formula) -> bool {
        child
            .as_literal()
            .is_some_and(|(atom, pos)| self.literals.contains_key(&(label, atom.to_string(), !pos)))
    }
}

struct Builder {
    nodes: Vec<Node>,
    branches: Vec<Branch>,
    witness_ids: HashMap<Formula, u32>,
    budget: usize,
}

impl Builder {
    fn add(&mut self, st: &mut BranchState, entry: LabeledFormula) -> Result<(), TableauError> {
        if st.closing.is_some() || st.present.contains(&entry) {
            return Ok(());
        }
        if self.nodes.len() >= self.budget {
            return Err(TableauError::ResourceExhausted {
                budget: self.budget,
            });
        }
        let node = self.nodes.len();
        self.nodes.push(Node {
            entry: entry.clone(),
            children: Vec::new(),
            leaf_of: None,
        });
        if let Some(parent) = st.tip {
            self.nodes[parent].children.push(node);
        }
        st.tip = Some(node);

        let idx = st.entries.len();
        let literal = entry
            .formula
            .as_literal()
            .map(|(a, pos)| (a.to_string(), pos));
        st.entries.push(entry.clone());
        st.done.push(literal.is_some());
        st.present.insert(entry.clone());
        if let Some((atom, positive)) = literal {
            if let Some(&other) = st.literals.get(&(entry.label, atom.clone(), !positive)) {
                st.closing = Some((other, idx));
            }
            st.literals.insert((entry.label, atom, positive), idx);
        }
        Ok(())
    }

    fn finish(&mut self, st: BranchState) {
        let index = self.branches.len();
        if let Some(tip) = st.tip {
            self.nodes[tip].leaf_of = Some(index);
        }
        let status = if st.closing.is_some() {
            BranchStatus::Closed
        } else {
            BranchStatus::Open
        };
        self.branches.push(Branch {
            entries: st.entries,
            status,
            closing_pair: st.closing,
        });
    }

    fn witness(&mut self, body: &Formula) -> WorldLabel {
        let next = self.witness_ids.len() as u32 + 1;
        WorldLabel::Witness(*self.witness_ids.entry(body.clone()).or_insert(next))
    }

    // Expansion order on a branch: α rules and first `G` instantiation in entry
    // order, then `F`, then re-instantiation of `G` at new witnesses, then β.
    fn expand(&mut self, mut st: BranchState) -> Result<(), TableauError> {
        loop {
            if st.closing.is_some() {
                self.finish(st);
                return Ok(());
            }

            let alpha = st.first_undone(|f| matches!(rule(f), Rule::Alpha(_) | Rule::Always(_)));
            if let Some(i) = alpha {
                st.done[i] = true;
                let LabeledFormula { label, formula } = st.entries[i].clone();
                match rule(&formula) {
                    Rule::Alpha(children) => {
                        for child in children {
                            self.add(&mut st, LabeledFormula::new(label, child))?;
                        }
                    }
                    Rule::Always(body) => {
                        let worlds = st.worlds.clone();
                        for &w in &worlds {
                            self.add(&mut st, LabeledFormula::new(w, body.clone()))?;
                        }
                        st.always.push((body, worlds));
                    }
                    _ => unreachable!(),
                }
                continue;
            }

            if let Some(i) = st.first_undone(|f| matches!(f, Formula::Eventually(_))) {
                st.done[i] = true;
                let Formula::Eventually(body) = st.entries[i].formula.clone() else {
                    unreachable!()
                };
                if !st.witness_for.contains_key(&*body) {
                    let w = self.witness(&body);
                    st.worlds.push(w);
                    st.witness_for.insert((*body).clone(), w);
                    self.add(&mut st, LabeledFormula::new(w, *body))?;
                }
                continue;
            }

            let mut swept = false;
            for k in 0..st.always.len() {
                let pending: Vec<WorldLabel> = st
                    .worlds
                    .iter()
                    .copied()
                    .filter(|w| !st.always[k].1.contains(w))
                    .collect();
                for w in pending {
                    let body = st.always[k].0.clone();
                    self.add(&mut st, LabeledFormula::new(w, body))?;
                    st.always[k].1.push(w);
                    swept = true;
                }
            }
            if swept {
                continue;
            }

            if let Some(i) = st.first_undone(|f| matches!(rule(f), Rule::Beta(_))) {
                st.done[i] = true;
                let LabeledFormula { label, formula } = st.entries[i].clone();
                let Rule::Beta(children) = rule(&formula) else {
                    unreachable!()
                };
                if children.iter().any(|c| st.holds(label, c)) {
                    continue;
                }
                let mut kept = children.clone();
                // At witness worlds, alternatives that are already refuted are not spawned.
                if label.is_witness() {
                    kept.retain(|c| !st.contradicts(label, c));
                    if kept.is_empty() {
                        kept = children;
                    }
                }
                if kept.len() == 1 {
                    let child = kept.pop().expect("one child");
                    self.add(&mut st, LabeledFormula::new(label, child))?;
                    continue;
                }
                for child in kept {
                    let mut next = st.clone();
                    self.add(&mut next, LabeledFormula::new(label, child))?;
                    self.expand(next)?;
                }
                return Ok(());
            }

            self.finish(st);
            return Ok(());
        }
    }
}

/// Builds the finished tree. The caller has checked fragment membership.
pub(super) fn build(root: &Formula, budget: usize) -> Result<TruthTree, TableauError> {
    let mut builder = Builder {
        nodes: Vec::new(),
        branches: Vec::new(),
        witness_ids: HashMap::new(),
        budget,
    };
    let mut st = BranchState {
        worlds: vec![WorldLabel::Now],
        ..Default::default()
    };
    builder.add(&mut st, LabeledFormula::now(root.clone()))?;
    builder.expand(st)?;
    Ok(TruthTree {
        root: root.clone(),
        branches: builder.branches,
        witness_count: builder.witness_ids.len(),
        nodes: builder.nodes,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::super::*;
    use crate::formula::parse;

    fn tree(text: &str) -> TruthTree {
        build_tree(&parse(text).unwrap()).unwrap()
    }

    fn lit(atom: &str, positive: bool, label: WorldLabel) -> SignedLiteral {
        SignedLiteral::new(atom, positive, label)
    }

    const A: WorldLabel = WorldLabel::Witness(1);
    const B: WorldLabel = WorldLabel::Witness(2);

    #[test]
    fn response_with_trigger_has_one_closed_and_one_open_branch() {
        let t = tree("v10 & (v10 -> F p110)");
        assert_eq!(t.branches().len(), 2);
        let closed = &t.branches()[0];
        assert_eq!(closed.status, BranchStatus::Closed);
        let (i, j) = closed.closing_pair.unwrap();
        assert_eq!(closed.entries[i].formula, parse("v10").unwrap());
        assert_eq!(closed.entries[j].formula, parse("!v10").unwrap());
        assert_eq!(
            open_literal_sets(&t),
            vec![BTreeSet::from([
                lit("v10", true, WorldLabel::Now),
                lit("p110", true, A)
            ])]
        );
        assert_eq!(t.witness_count(), 1);
    }

    #[test]
    fn contradiction_closes_single_branch() {
        let t = tree("p & !p");
        assert_eq!(t.branches().len(), 1);
        assert!(t.is_closed());
        assert!(open_literal_sets(&t).is_empty());
    }

    #[test]
    fn closure_after_passage_ban() {
        let t = tree("G !p115 & v11 & ((v11 -> F p115) | (v11 -> F p116))");
        let open: Vec<_> = t.open_branches().collect();
        assert_eq!(open.len(), 1);
        let lits = open[0].literals();
        assert!(lits.contains(&lit("p116", true, B)));
        assert!(lits.contains(&lit("v11", true, WorldLabel::Now)));
        // the p115 witness branch is closed by the G instance at that witness
        let witness_closed = t.closed_branches().any(|b| {
            let (i, j) = b.closing_pair.unwrap();
            b.entries[i].label == A
                && b.entries[j].label == A
                && b.entries[i].formula == parse("p115").unwrap()
                && b.entries[j].formula == parse("!p115").unwrap()
        });
        assert!(witness_closed, "{}", t.dump());
    }

    #[test]
    fn mined_specification_tree_is_all_open() {
        let t = tree("G !e2 & G (s03 -> F s08) & G (s08 -> F s07)");
        assert!(t.closed_branches().next().is_none(), "{}", t.dump());
        assert!(t.has_open_branch());
        // s08 is witnessed first, s07 second
        let labels: BTreeSet<_> = t
            .branches()
            .iter()
            .flat_map(|b| b.literals())
            .filter(|l| l.positive)
            .map(|l| (l.atom, l.label))
            .collect();
        assert!(labels.contains(&("s08".to_string(), A)));
        assert!(labels.contains(&("s07".to_string(), B)));
    }

    #[test]
    fn decision_procedures() {
        let f = |s: &str| parse(s).unwrap();
        assert!(is_satisfiable(&f("v10 & (v10 -> F p110)")).unwrap());
        assert!(!is_satisfiable(&f("p & !p")).unwrap());
        assert!(!is_satisfiable(&f("F p & G !p")).unwrap());
        assert!(is_unsatisfiable(&f("p & !p")).unwrap());
        assert!(is_unsatisfiable(&f("G !p115 & F p115")).unwrap());
        assert!(!is_unsatisfiable(&f("F r")).unwrap());
        assert!(is_valid(&f("p | !p")).unwrap());
        assert!(!is_valid(&f("F p")).unwrap());
        assert!(is_valid(&f("G p -> F p")).unwrap());
    }

    #[test]
    fn fragment_violations_are_rejected() {
        let f = parse("G F G p").unwrap();
        assert!(matches!(build_tree(&f), Err(TableauError::Fragment(_))));
        // the negation of a response leaves the fragment
        let f = parse("G (p -> F q)").unwrap();
        assert!(matches!(is_valid(&f), Err(TableauError::Fragment(_))));
    }

    #[test]
    fn budget_is_enforced() {
        let f = parse("(a | b) & (c | d) & (e | g)").unwrap();
        assert!(matches!(
            build_tree_with_budget(&f, 5),
            Err(TableauError::ResourceExhausted { budget: 5 })
        ));
        assert!(build_tree_with_budget(&f, 1000).is_ok());
    }

    #[test]
    fn two_alternatives_give_two_open_sets() {
        let t = tree("v11 & ((v11 -> F p115) | (v11 -> F p116))");
        assert_eq!(
            open_literal_sets(&t),
            vec![
                BTreeSet::from([lit("v11", true, WorldLabel::Now), lit("p115", true, A)]),
                BTreeSet::from([lit("v11", true, WorldLabel::Now), lit("p116", true, B)]),
            ]
        );
    }
}
