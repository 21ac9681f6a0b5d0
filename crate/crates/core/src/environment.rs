//! The smart-environment model: an attributed graph of places, and the
//! presence events registered on it.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{is_identifier, is_reserved};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid graph document: {0}")]
    GraphSyntax(#[from] serde_json::Error),
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("node id `{0}` is not a valid atom name")]
    InvalidNodeId(String),
    #[error("edge ({from}, {to}) refers to unknown node `{missing}`")]
    DanglingEdge {
        from: String,
        to: String,
        missing: String,
    },
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: invalid timestamp `{text}`")]
    InvalidTimestamp { line: usize, text: String },
    #[error("line {line}: unknown node `{node}`")]
    UnknownNode { line: usize, node: String },
}

/// Vertices, edges, display names and sensor sets of an environment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttributedGraph {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
    names: BTreeMap<String, String>,
    sensors: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    nodes: Vec<NodeDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    edges: Vec<(String, String)>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sensors: Option<BTreeSet<String>>,
}

impl AttributedGraph {
    /// A graph with the given vertices and nothing else.
    pub fn with_vertices<I, S>(ids: I) -> Result<Self, EnvError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut g = AttributedGraph::default();
        for id in ids {
            g.add_vertex(id.into())?;
        }
        Ok(g)
    }

    fn add_vertex(&mut self, id: String) -> Result<(), EnvError> {
        if !is_identifier(&id) || is_reserved(&id) {
            return Err(EnvError::InvalidNodeId(id));
        }
        if self.contains(&id) {
            return Err(EnvError::DuplicateNode(id));
        }
        self.vertices.push(id);
        Ok(())
    }

    pub fn add_edge(&mut self, from: &str, to: &str) -> Result<(), EnvError> {
        for end in [from, to] {
            if !self.contains(end) {
                return Err(EnvError::DanglingEdge {
                    from: from.into(),
                    to: to.into(),
                    missing: end.into(),
                });
            }
        }
        let edge = (from.to_string(), to.to_string());
        if !self.edges.contains(&edge) {
            self.edges.push(edge);
        }
        Ok(())
    }

    pub fn contains(&self, id: &str) -> bool {
        self.vertices.iter().any(|v| v == id)
    }

    /// Vertices in document order.
    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(String, String)] {
        &self.edges
    }

    pub fn name(&self, id: &str) -> Option<&str> {
        self.names.get(id).map(String::as_str)
    }

    pub fn sensors(&self, id: &str) -> Option<&BTreeSet<String>> {
        self.sensors.get(id)
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            nodes: self
                .vertices
                .iter()
                .map(|id| NodeDoc {
                    id: id.clone(),
                    name: self.names.get(id).cloned(),
                    sensors: self.sensors.get(id).cloned(),
                })
                .collect(),
            edges: self.edges.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("graph serializes")
    }
}

/// Parses and validates a graph document.
pub fn load_graph(document: &str) -> Result<AttributedGraph, EnvError> {
    let doc: GraphDoc = serde_json::from_str(document)?;
    let mut g = AttributedGraph::default();
    for node in doc.nodes {
        g.add_vertex(node.id.clone())?;
        if let Some(name) = node.name {
            g.names.insert(node.id.clone(), name);
        }
        if let Some(sensors) = node.sensors {
            g.sensors.insert(node.id, sensors);
        }
    }
    for (from, to) in &doc.edges {
        g.add_edge(from, to)?;
    }
    Ok(g)
}

/// Wall-clock time with one-second resolution. Orders chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Timestamp {
    pub year: u16,
    pub month: u8,
    pub day: u8,
    pub hour: u8,
    pub minute: u8,
    pub second: u8,
}

fn days_in_month(year: u16, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if (year.is_multiple_of(4) && !year.is_multiple_of(100)) || year.is_multiple_of(400) => {
            29
        }
        2 => 28,
        _ => 0,
    }
}

impl Timestamp {
    pub fn new(year: u16, month: u8, day: u8, hour: u8, minute: u8, second: u8) -> Option<Self> {
        let valid = (1..=12).contains(&month)
            && day >= 1
            && day <= days_in_month(year, month)
            && hour < 24
            && minute < 60
            && second < 60;
        valid.then_some(Timestamp {
            year,
            month,
            day,
            hour,
            minute,
            second,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expected `tYYYY.MM.DD.HH.MM.SS`, got `{0}`")]
pub struct TimestampError(pub String);

impl FromStr for Timestamp {
    type Err = TimestampError;

    /// Parses `tYYYY.MM.DD.HH.MM.SS`, zero-padded.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || TimestampError(s.to_string());
        let body = s.strip_prefix('t').ok_or_else(err)?;
        let parts: Vec<&str> = body.split('.').collect();
        let widths = [4, 2, 2, 2, 2, 2];
        if parts.len() != widths.len()
            || parts
                .iter()
                .zip(widths)
                .any(|(p, w)| p.len() != w || !p.bytes().all(|b| b.is_ascii_digit()))
        {
            return Err(err());
        }
        let n = |i: usize| parts[i].parse::<u16>().map_err(|_| err());
        let small = |i: usize| n(i).map(|v| v as u8);
        Timestamp::new(n(0)?, small(1)?, small(2)?, small(3)?, small(4)?, small(5)?).ok_or_else(err)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t{:04}.{:02}.{:02}.{:02}.{:02}.{:02}",
            self.year, self.month, self.day, self.hour, self.minute, self.second
        )
    }
}

/// Presence of `object` at `node` at `time`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub object: String,
    pub node: String,
    pub time: Timestamp,
}

impl Event {
    pub fn new(object: impl Into<String>, node: impl Into<String>, time: Timestamp) -> Self {
        Event {
            object: object.into(),
            node: node.into(),
            time,
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.object, self.node, self.time)
    }
}

/// Registered events in input order. Repeats are kept.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Behavior {
    pub events: Vec<Event>,
}

impl Behavior {
    pub fn new(events: Vec<Event>) -> Self {
        Behavior { events }
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    /// Event log text, one `object,node,timestamp` line per event.
    pub fn to_csv(&self) -> String {
        self.events.iter().map(|e| format!("{e}\n")).collect()
    }
}

/// Parses an event log without checking nodes against a graph.
///
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_events(document: &str) -> Result<Behavior, EnvError> {
    parse_lines(document, |_, _| Ok(()))
}

/// Parses an event log and rejects the first event whose node is not a vertex.
pub fn load_events(document: &str, graph: &AttributedGraph) -> Result<Behavior, EnvError> {
    parse_lines(document, |line, node| {
        if graph.contains(node) {
            Ok(())
        } else {
            Err(EnvError::UnknownNode {
                line,
                node: node.to_string(),
            })
        }
    })
}

fn parse_lines(
    document: &str,
    check_node: impl Fn(usize, &str) -> Result<(), EnvError>,
) -> Result<Behavior, EnvError> {
    let mut events = Vec::new();
    for (i, raw) in document.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        let [object, node, time] = fields.as_slice() else {
            return Err(EnvError::MalformedLine {
                line,
                reason: format!("expected 3 comma-separated fields, found {}", fields.len()),
            });
        };
        if object.is_empty() || node.is_empty() {
            return Err(EnvError::MalformedLine {
                line,
                reason: "empty field".into(),
            });
        }
        let time: Timestamp = time.parse().map_err(|_| EnvError::InvalidTimestamp {
            line,
            text: time.to_string(),
        })?;
        check_node(line, node)?;
        events.push(Event::new(*object, *node, time));
    }
    Ok(Behavior { events })
}

/// Events whose node is not a vertex of the graph, with their positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<(usize, Event)>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} event(s) refer to unknown nodes",
            self.violations.len()
        )?;
        for (i, e) in &self.violations {
            write!(f, "\n  #{i}: {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

pub fn validate(behavior: &Behavior, graph: &AttributedGraph) -> Result<(), ValidationReport> {
    let vertices: HashSet<&str> = graph.vertices().iter().map(String::as_str).collect();
    let violations: Vec<(usize, Event)> = behavior
        .events
        .iter()
        .enumerate()
        .filter(|(_, e)| !vertices.contains(e.node.as_str()))
        .map(|(i, e)| (i, e.clone()))
        .collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ValidationReport { violations })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOUR_NODES: &str = r#"{"nodes":[{"id":"e2"},{"id":"s03"},{"id":"s07"},{"id":"s08"}]}"#;

    fn ts(y: u16, mo: u8, d: u8, h: u8, mi: u8, s: u8) -> Timestamp {
        Timestamp::new(y, mo, d, h, mi, s).unwrap()
    }

    #[test]
    fn loads_four_node_graph() {
        let g = load_graph(FOUR_NODES).unwrap();
        assert_eq!(g.vertices(), ["e2", "s03", "s07", "s08"]);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn graph_errors() {
        let dangling = r#"{"nodes":[{"id":"a"}],"edges":[["a","b"]]}"#;
        assert!(matches!(
            load_graph(dangling),
            Err(EnvError::DanglingEdge { missing, .. }) if missing == "b"
        ));
        let dup = r#"{"nodes":[{"id":"a"},{"id":"a"}]}"#;
        assert!(matches!(load_graph(dup), Err(EnvError::DuplicateNode(_))));
        let unknown = r#"{"nodes":[{"id":"a","colour":"red"}]}"#;
        assert!(matches!(load_graph(unknown), Err(EnvError::GraphSyntax(_))));
        let bad_id = r#"{"nodes":[{"id":"3a"}]}"#;
        assert!(matches!(
            load_graph(bad_id),
            Err(EnvError::InvalidNodeId(_))
        ));
        assert_eq!(load_graph(r#"{"nodes":[]}"#).unwrap().vertices().len(), 0);
    }

    #[test]
    fn graph_attributes_round_trip() {
        let doc = r#"{"nodes":[{"id":"s03","name":"staircase 3","sensors":["presence"]},
                     {"id":"s08"}],"edges":[["s03","s08"]]}"#;
        let g = load_graph(doc).unwrap();
        assert_eq!(g.name("s03"), Some("staircase 3"));
        assert!(g.sensors("s03").unwrap().contains("presence"));
        assert_eq!(g.sensors("s08"), None);
        assert_eq!(load_graph(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn parses_event_lines() {
        let g = load_graph(FOUR_NODES).unwrap();
        let b = load_events("o5,s03,t2015.02.12.09.30.15\n", &g).unwrap();
        assert_eq!(
            b.events,
            vec![Event::new("o5", "s03", ts(2015, 2, 12, 9, 30, 15))]
        );

        let err = load_events("o5,zz,t2015.02.12.09.30.15", &g).unwrap_err();
        assert!(matches!(err, EnvError::UnknownNode { line: 1, ref node } if node == "zz"));
        let err = load_events("o5,s03,2015-02-12", &g).unwrap_err();
        assert!(matches!(err, EnvError::InvalidTimestamp { line: 1, .. }));
        let err = load_events("# header\no5,s03", &g).unwrap_err();
        assert!(matches!(err, EnvError::MalformedLine { line: 2, .. }));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let b = parse_events("# log\n\n  o1,a,t2020.01.01.00.00.00  \n").unwrap();
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn timestamp_validation() {
        assert!("t2015.02.29.00.00.00".parse::<Timestamp>().is_err());
        assert!("t2016.02.29.00.00.00".parse::<Timestamp>().is_ok());
        assert!("t2015.2.12.09.30.15".parse::<Timestamp>().is_err());
        assert!("t2015.02.12.24.00.00".parse::<Timestamp>().is_err());
        assert!("t2015.13.01.00.00.00".parse::<Timestamp>().is_err());
        let t: Timestamp = "t2015.02.11.09.30.15".parse().unwrap();
        assert_eq!(t.to_string(), "t2015.02.11.09.30.15");
    }

    #[test]
    fn validation_report_lists_foreign_nodes() {
        let g = load_graph(FOUR_NODES).unwrap();
        let t = ts(2015, 2, 12, 9, 30, 15);
        let b = Behavior::new(vec![Event::new("o5", "s03", t), Event::new("o5", "x9", t)]);
        let report = validate(&b, &g).unwrap_err();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].0, 1);
        assert!(validate(&Behavior::default(), &g).is_ok());
    }
}
