//! Mining per-object specifications from a behavior, and merging them into one
//! attributed specification.
//!
//! For every object the miner emits
//!
//! * `G !v` for each vertex the object never visited (safety),
//! * `G (u -> F v)` for each pair of consecutive distinct places in its
//!   time-ordered trace (response),
//! * `F v` for a trace that stays in one place (existence); see [`MiningMode`]
//!   for the final-place case.

mod specification;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::environment::{validate, AttributedGraph, Behavior, Event, ValidationReport};
use crate::formula::Formula;

pub use specification::{AttributedFormula, Origin, SpecError, Specification};

#[derive(Debug, Error)]
pub enum MineError {
    #[error("behavior is empty")]
    EmptyBehavior,
    #[error(transparent)]
    Validation(#[from] ValidationReport),
    #[error("object `{0}` appears in more than one input specification")]
    AttributionClash(String),
}

/// Which reading of the existence rule to apply to multi-place traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MiningMode {
    /// Step-by-step run of the scan loop: besides the single-place case, a final
    /// place that was observed at least twice in a row also yields `F v`.
    Literal,
    /// `F v` only when the whole trace stays in one place.
    #[default]
    PaperExample,
}

impl fmt::Display for MiningMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MiningMode::Literal => "literal",
            MiningMode::PaperExample => "paper-example",
        })
    }
}

impl FromStr for MiningMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(MiningMode::Literal),
            "paper-example" => Ok(MiningMode::PaperExample),
            other => Err(format!("unknown mining mode `{other}`")),
        }
    }
}

/// Work counters from a mining run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MineStats {
    /// Adjacent-event comparisons made by the trace scan, per object.
    pub comparisons: BTreeMap<String, usize>,
    /// Response formulas produced per object before duplicates collapse.
    pub responses: BTreeMap<String, usize>,
}

/// Groups events by object, preserving input order inside each group.
pub fn partition(behavior: &Behavior) -> Result<BTreeMap<String, Vec<Event>>, MineError> {
    if behavior.is_empty() {
        return Err(MineError::EmptyBehavior);
    }
    let mut groups: BTreeMap<String, Vec<Event>> = BTreeMap::new();
    for e in &behavior.events {
        groups.entry(e.object.clone()).or_default().push(e.clone());
    }
    Ok(groups)
}

pub fn mine(
    behavior: &Behavior,
    graph: &AttributedGraph,
    mode: MiningMode,
) -> Result<BTreeMap<String, Specification>, MineError> {
    mine_with_stats(behavior, graph, mode).map(|(specs, _)| specs)
}

pub fn mine_with_stats(
    behavior: &Behavior,
    graph: &AttributedGraph,
    mode: MiningMode,
) -> Result<(BTreeMap<String, Specification>, MineStats), MineError> {
    let groups = partition(behavior)?;
    validate(behavior, graph)?;
    let mut stats = MineStats::default();
    let mut out = BTreeMap::new();
    for (object, events) in groups {
        let (spec, comparisons, responses) = mine_object(&object, events, graph, mode);
        stats.comparisons.insert(object.clone(), comparisons);
        stats.responses.insert(object.clone(), responses);
        out.insert(object, spec);
    }
    Ok((out, stats))
}

// A maximal stretch of consecutive events at one node.
struct Run<'a> {
    node: &'a str,
    len: usize,
}

fn mine_object(
    object: &str,
    mut events: Vec<Event>,
    graph: &AttributedGraph,
    mode: MiningMode,
) -> (Specification, usize, usize) {
    let mut spec = Specification::new();
    let atom = |v: &str| Formula::atom(v);

    let visited: HashSet<&str> = events.iter().map(|e| e.node.as_str()).collect();
    for v in graph.vertices() {
        if !visited.contains(v.as_str()) {
            let f = Formula::always(Formula::not(atom(v)));
            spec.insert(AttributedFormula::new(f, object, Origin::Saf));
        }
    }

    // Stable: events sharing a timestamp keep their input order.
    events.sort_by_key(|e| e.time);

    let mut comparisons = 0;
    let mut runs: Vec<Run> = Vec::new();
    if let Some(first) = events.first() {
        runs.push(Run {
            node: &first.node,
            len: 1,
        });
    }
    for pair in events.windows(2) {
        comparisons += 1;
        let last = runs.last_mut().expect("runs start non-empty");
        if pair[0].node == pair[1].node {
            last.len += 1;
        } else {
            runs.push(Run {
                node: &pair[1].node,
                len: 1,
            });
        }
    }

    let mut responses = 0;
    for pair in runs.windows(2) {
        let f = Formula::always(Formula::implies(
            atom(pair[0].node),
            Formula::eventually(atom(pair[1].node)),
        ));
        spec.insert(AttributedFormula::new(f, object, Origin::Liv2));
        responses += 1;
    }

    let last = runs.last().expect("object has at least one event");
    let existence = match mode {
        MiningMode::PaperExample => runs.len() == 1,
        MiningMode::Literal => runs.len() == 1 || last.len >= 2,
    };
    if existence {
        let f = Formula::eventually(atom(last.node));
        spec.insert(AttributedFormula::new(f, object, Origin::Liv1));
    }

    (spec, comparisons, responses)
}

/// Unions per-object specifications, attributing every formula to its object.
pub fn merge(specs: Vec<(String, Specification)>) -> Result<Specification, MineError> {
    let mut seen = HashSet::new();
    let mut sigma = Specification::new();
    for (object, spec) in specs {
        if !seen.insert(object.clone()) {
            return Err(MineError::AttributionClash(object));
        }
        for entry in spec.iter() {
            let mut entry = entry.clone();
            entry.object = object.clone();
            sigma.insert(entry);
        }
    }
    Ok(sigma)
}

/// Separates a merged specification by object.
pub fn split(sigma: &Specification) -> BTreeMap<String, Specification> {
    let mut out: BTreeMap<String, Specification> = BTreeMap::new();
    for entry in sigma.iter() {
        out.entry(entry.object.clone())
            .or_default()
            .insert(entry.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{parse_events, Timestamp};
    use crate::formula::parse;

    pub(crate) const O5_LOG: &str = "\
o5,s03,t2015.02.12.09.30.15
o5,s08,t2015.02.12.09.32.40
o5,s08,t2015.02.12.09.33.30
o5,s08,t2015.02.12.09.34.20
o5,s07,t2015.02.12.09.35.20
o5,s07,t2015.02.12.11.37.15
";

    fn graph() -> AttributedGraph {
        AttributedGraph::with_vertices(["e2", "s03", "s07", "s08"]).unwrap()
    }

    fn texts(spec: &Specification) -> Vec<String> {
        spec.iter().map(|e| e.formula.render()).collect()
    }

    #[test]
    fn worked_example_paper_mode() {
        let b = parse_events(O5_LOG).unwrap();
        let specs = mine(&b, &graph(), MiningMode::PaperExample).unwrap();
        assert_eq!(specs.len(), 1);
        assert_eq!(
            texts(&specs["o5"]),
            ["G !e2", "G (s03 -> F s08)", "G (s08 -> F s07)"]
        );
        let origins: Vec<Origin> = specs["o5"].iter().map(|e| e.origin).collect();
        assert_eq!(origins, [Origin::Saf, Origin::Liv2, Origin::Liv2]);
    }

    #[test]
    fn worked_example_literal_mode() {
        let b = parse_events(O5_LOG).unwrap();
        let specs = mine(&b, &graph(), MiningMode::Literal).unwrap();
        assert_eq!(
            texts(&specs["o5"]),
            ["G !e2", "G (s03 -> F s08)", "G (s08 -> F s07)", "F s07"]
        );
    }

    #[test]
    fn single_event_yields_existence() {
        let b = parse_events("o1,s03,t2015.02.12.09.30.15").unwrap();
        for mode in [MiningMode::Literal, MiningMode::PaperExample] {
            let specs = mine(&b, &graph(), mode).unwrap();
            assert_eq!(texts(&specs["o1"]), ["G !e2", "G !s07", "G !s08", "F s03"]);
        }
    }

    #[test]
    fn literal_mode_skips_single_final_event() {
        // the scan ends on a mismatch, so no existence formula
        let b = parse_events("o1,s03,t2015.02.12.09.30.15\no1,s08,t2015.02.12.09.31.15").unwrap();
        let specs = mine(&b, &graph(), MiningMode::Literal).unwrap();
        assert_eq!(texts(&specs["o1"]), ["G !e2", "G !s07", "G (s03 -> F s08)"]);
    }

    #[test]
    fn cyclic_traces_collapse_duplicates() {
        let log = "o1,s03,t2015.02.12.09.30.10\no1,s08,t2015.02.12.09.30.11\n\
                   o1,s03,t2015.02.12.09.30.12\no1,s08,t2015.02.12.09.30.13\n";
        let (specs, stats) = mine_with_stats(
            &parse_events(log).unwrap(),
            &graph(),
            MiningMode::PaperExample,
        )
        .unwrap();
        assert_eq!(
            texts(&specs["o1"]),
            ["G !e2", "G !s07", "G (s03 -> F s08)", "G (s08 -> F s03)"]
        );
        assert_eq!(stats.responses["o1"], 3);
        assert_eq!(stats.comparisons["o1"], 3);
        assert_eq!(specs["o1"].entries()[2].occurrences, 2);
    }

    #[test]
    fn partition_groups_by_object() {
        let b = parse_events(O5_LOG).unwrap();
        assert_eq!(partition(&b).unwrap()["o5"].len(), 6);
        let two = parse_events("o1,a,t2020.01.01.00.00.00\no2,a,t2020.01.01.00.00.01").unwrap();
        assert_eq!(partition(&two).unwrap().len(), 2);
        assert!(matches!(
            partition(&Behavior::default()),
            Err(MineError::EmptyBehavior)
        ));
    }

    #[test]
    fn mining_rejects_foreign_nodes() {
        let b = parse_events("o1,zz,t2020.01.01.00.00.00").unwrap();
        assert!(matches!(
            mine(&b, &graph(), MiningMode::Literal),
            Err(MineError::Validation(_))
        ));
    }

    #[test]
    fn ties_keep_input_order() {
        let t: Timestamp = "t2020.01.01.00.00.00".parse().unwrap();
        let b = Behavior::new(vec![Event::new("o", "s08", t), Event::new("o", "s03", t)]);
        let specs = mine(&b, &graph(), MiningMode::PaperExample).unwrap();
        assert!(specs["o"].contains(&parse("G (s08 -> F s03)").unwrap(), "o"));
    }

    #[test]
    fn merge_and_split() {
        let b = parse_events(O5_LOG).unwrap();
        let specs = mine(&b, &graph(), MiningMode::PaperExample).unwrap();
        let sigma = merge(specs.clone().into_iter().collect()).unwrap();
        assert_eq!(sigma.len(), 3);
        assert!(sigma.iter().all(|e| e.object == "o5"));
        assert_eq!(split(&sigma), specs);

        let mut a = Specification::new();
        a.insert(AttributedFormula::new(
            parse("G !e2").unwrap(),
            "x",
            Origin::Saf,
        ));
        let sigma = merge(vec![("o1".into(), a.clone()), ("o2".into(), a.clone())]).unwrap();
        assert_eq!(sigma.len(), 2);
        assert_eq!(sigma.objects().len(), 2);
        let parts = split(&sigma);
        assert_eq!(parts.len(), 2);
        assert!(parts.values().all(|s| s.len() == 1));

        assert!(matches!(
            merge(vec![("o1".into(), a.clone()), ("o1".into(), a)]),
            Err(MineError::AttributionClash(o)) if o == "o1"
        ));
        assert!(merge(Vec::new()).unwrap().is_empty());
        assert!(split(&Specification::new()).is_empty());
    }
}
