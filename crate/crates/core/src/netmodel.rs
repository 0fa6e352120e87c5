//! Capacitated acyclic networks with sources and sinks.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::rational::Rational;

/// A directed link `tail -> head` that carries at most `capacity` units per
/// channel use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub capacity: Rational,
}

/// Source `index` is generated at node `at`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Source {
    pub index: u32,
    pub at: String,
}

/// Node `at` must decode every source listed in `demands`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sink {
    pub at: String,
    pub demands: BTreeSet<u32>,
}

/// A network as read from disk. The edge order is significant: it fixes the
/// variable order of every derived object.
///
/// Nothing is enforced on construction; call [`Network::validate`] (or
/// [`Network::checked`]) before handing a network to the rest of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Network {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    pub sources: Vec<Source>,
    pub sinks: Vec<Sink>,
}

/// One broken network invariant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    NoEdges,
    DuplicateNode(String),
    DuplicateEdge(String),
    UnknownNode { edge: String, node: String },
    NegativeCapacity(String),
    Cycle(Vec<String>),
    DuplicateSource(u32),
    SourceIndexOutOfRange(u32),
    UnknownSourceNode { index: u32, node: String },
    SourceHasInEdges(String),
    DuplicateSink(String),
    UnknownSinkNode(String),
    SinkHasOutEdges(String),
    SourceAtSink(String),
    EmptyDemands(String),
    UnknownSource { sink: String, index: u32 },
}

impl Violation {
    /// The node, edge or source the violation is about; violations are
    /// reported sorted by this key.
    pub fn subject(&self) -> String {
        use alloc::format;
        match self {
            Violation::NoEdges => String::new(),
            Violation::DuplicateNode(n)
            | Violation::DuplicateEdge(n)
            | Violation::NegativeCapacity(n)
            | Violation::SourceHasInEdges(n)
            | Violation::DuplicateSink(n)
            | Violation::UnknownSinkNode(n)
            | Violation::SinkHasOutEdges(n)
            | Violation::SourceAtSink(n)
            | Violation::EmptyDemands(n) => n.clone(),
            Violation::UnknownNode { edge, .. } => edge.clone(),
            Violation::Cycle(nodes) => nodes.first().cloned().unwrap_or_default(),
            Violation::DuplicateSource(i) | Violation::SourceIndexOutOfRange(i) => {
                format!("{i}")
            }
            Violation::UnknownSourceNode { index, .. } => format!("{index}"),
            Violation::UnknownSource { sink, .. } => sink.clone(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoEdges => write!(f, "network has no edges"),
            Violation::DuplicateNode(n) => write!(f, "duplicate node `{n}`"),
            Violation::DuplicateEdge(e) => write!(f, "duplicate edge id `{e}`"),
            Violation::UnknownNode { edge, node } => {
                write!(f, "edge `{edge}` references unknown node `{node}`")
            }
            Violation::NegativeCapacity(e) => write!(f, "edge `{e}` has negative capacity"),
            Violation::Cycle(nodes) => write!(f, "cycle detected through nodes {}", nodes.join(", ")),
            Violation::DuplicateSource(i) => write!(f, "duplicate source index {i}"),
            Violation::SourceIndexOutOfRange(i) => {
                write!(f, "source index {i} outside 1..=|S|")
            }
            Violation::UnknownSourceNode { index, node } => {
                write!(f, "source {index} placed at unknown node `{node}`")
            }
            Violation::SourceHasInEdges(n) => write!(f, "In(S) nonempty: source node `{n}` has incoming edges"),
            Violation::DuplicateSink(n) => write!(f, "sink node `{n}` listed twice"),
            Violation::UnknownSinkNode(n) => write!(f, "sink placed at unknown node `{n}`"),
            Violation::SinkHasOutEdges(n) => write!(f, "Out(T) nonempty: sink node `{n}` has outgoing edges"),
            Violation::SourceAtSink(n) => write!(f, "node `{n}` is both a source and a sink"),
            Violation::EmptyDemands(n) => write!(f, "sink `{n}` demands nothing"),
            Violation::UnknownSource { sink, index } => {
                write!(f, "unknown source {index} demanded by sink `{sink}`")
            }
        }
    }
}

/// A node or an edge, for the `In`/`Out` queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Element<'a> {
    Node(&'a str),
    Edge(&'a str),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetworkError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("invalid network: {}", .0.iter().map(|v| alloc::format!("{v}")).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl Network {
    /// All invariant violations, sorted by subject id. Empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.edges.is_empty() {
            out.push(Violation::NoEdges);
        }

        let mut node_set = BTreeSet::new();
        for n in &self.nodes {
            if !node_set.insert(n.as_str()) {
                out.push(Violation::DuplicateNode(n.clone()));
            }
        }

        let mut edge_ids = BTreeSet::new();
        let mut edges_ok = true;
        for e in &self.edges {
            if !edge_ids.insert(e.id.as_str()) {
                out.push(Violation::DuplicateEdge(e.id.clone()));
            }
            for end in [&e.tail, &e.head] {
                if !node_set.contains(end.as_str()) {
                    edges_ok = false;
                    out.push(Violation::UnknownNode {
                        edge: e.id.clone(),
                        node: end.clone(),
                    });
                }
            }
            if e.capacity.is_negative() {
                out.push(Violation::NegativeCapacity(e.id.clone()));
            }
        }
        if edges_ok {
            if let Err(cycle) = self.topological_nodes() {
                out.push(Violation::Cycle(cycle));
            }
        }

        let mut seen_idx = BTreeSet::new();
        let n_sources = self.sources.len() as u32;
        let mut source_nodes = BTreeSet::new();
        for s in &self.sources {
            if !seen_idx.insert(s.index) {
                out.push(Violation::DuplicateSource(s.index));
            }
            if s.index == 0 || s.index > n_sources {
                out.push(Violation::SourceIndexOutOfRange(s.index));
            }
            if !node_set.contains(s.at.as_str()) {
                out.push(Violation::UnknownSourceNode {
                    index: s.index,
                    node: s.at.clone(),
                });
            }
            source_nodes.insert(s.at.as_str());
        }
        for n in &source_nodes {
            if self.edges.iter().any(|e| e.head == *n) {
                out.push(Violation::SourceHasInEdges((*n).into()));
            }
        }

        let mut sink_nodes = BTreeSet::new();
        for t in &self.sinks {
            if !sink_nodes.insert(t.at.as_str()) {
                out.push(Violation::DuplicateSink(t.at.clone()));
            }
            if !node_set.contains(t.at.as_str()) {
                out.push(Violation::UnknownSinkNode(t.at.clone()));
            }
            if t.demands.is_empty() {
                out.push(Violation::EmptyDemands(t.at.clone()));
            }
            for d in &t.demands {
                if !seen_idx.contains(d) {
                    out.push(Violation::UnknownSource {
                        sink: t.at.clone(),
                        index: *d,
                    });
                }
            }
            if source_nodes.contains(t.at.as_str()) {
                out.push(Violation::SourceAtSink(t.at.clone()));
            }
        }
        for n in &sink_nodes {
            if self.edges.iter().any(|e| e.tail == *n) {
                out.push(Violation::SinkHasOutEdges((*n).into()));
            }
        }

        out.sort_by_key(|v| v.subject());
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Returns the network unchanged if it is valid.
    pub fn checked(self) -> Result<Self, NetworkError> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(NetworkError::Invalid(violations))
        }
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn has_node(&self, id: &str) -> bool {
        self.nodes.iter().any(|n| n == id)
    }

    /// `In(x)`; for an edge `(V, U)` this is `In(V)`. Edge-list order.
    pub fn in_edges(&self, x: Element<'_>) -> Result<Vec<&str>, NetworkError> {
        let node = match x {
            Element::Node(n) if self.has_node(n) => n,
            Element::Node(n) => return Err(NetworkError::UnknownNode(n.into())),
            Element::Edge(e) => self
                .edge(e)
                .map(|e| e.tail.as_str())
                .ok_or_else(|| NetworkError::UnknownEdge(e.into()))?,
        };
        Ok(self
            .edges
            .iter()
            .filter(|e| e.head == node)
            .map(|e| e.id.as_str())
            .collect())
    }

    /// `Out(x)`; for an edge `(V, U)` this is `Out(U)`. Edge-list order.
    pub fn out_edges(&self, x: Element<'_>) -> Result<Vec<&str>, NetworkError> {
        let node = match x {
            Element::Node(n) if self.has_node(n) => n,
            Element::Node(n) => return Err(NetworkError::UnknownNode(n.into())),
            Element::Edge(e) => self
                .edge(e)
                .map(|e| e.head.as_str())
                .ok_or_else(|| NetworkError::UnknownEdge(e.into()))?,
        };
        Ok(self
            .edges
            .iter()
            .filter(|e| e.tail == node)
            .map(|e| e.id.as_str())
            .collect())
    }

    /// Sources generated at `node`, ascending by index.
    pub fn sources_at(&self, node: &str) -> Vec<u32> {
        let mut v: Vec<u32> = self
            .sources
            .iter()
            .filter(|s| s.at == node)
            .map(|s| s.index)
            .collect();
        v.sort_unstable();
        v
    }

    pub fn source_indices(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.sources.iter().map(|s| s.index).collect();
        v.sort_unstable();
        v
    }

    /// Kahn's algorithm, always picking the earliest-listed ready node, so the
    /// order only depends on the file. On failure returns the nodes that lie on
    /// a cycle or between two.
    pub fn topological_nodes(&self) -> Result<Vec<String>, Vec<String>> {
        let index: BTreeMap<&str, usize> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut indeg = alloc::vec![0usize; self.nodes.len()];
        let mut succ: Vec<Vec<usize>> = alloc::vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            if let (Some(&t), Some(&h)) = (index.get(e.tail.as_str()), index.get(e.head.as_str())) {
                indeg[h] += 1;
                succ[t].push(h);
            }
        }
        let mut ready: BTreeSet<usize> = (0..self.nodes.len()).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(i) = ready.pop_first() {
            order.push(self.nodes[i].clone());
            for &j in &succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.insert(j);
                }
            }
        }
        if order.len() == self.nodes.len() {
            Ok(order)
        } else {
            // Peel nodes that only lie downstream of a cycle.
            let mut left: Vec<bool> = indeg.iter().map(|&d| d > 0).collect();
            loop {
                let sinks: Vec<usize> = (0..left.len())
                    .filter(|&i| left[i] && !succ[i].iter().any(|&j| left[j]))
                    .collect();
                if sinks.is_empty() {
                    break;
                }
                for i in sinks {
                    left[i] = false;
                }
            }
            let mut rest: Vec<String> = (0..self.nodes.len())
                .filter(|&i| left[i])
                .map(|i| self.nodes[i].clone())
                .collect();
            rest.sort();
            Err(rest)
        }
    }
}

/// Non-negative objective weights `w_S`, keyed by source index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Weights(BTreeMap<u32, Rational>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightsError {
    #[error("weight for source {0} is negative")]
    Negative(u32),
    #[error("weight given for unknown source {0}")]
    UnknownSource(u32),
    #[error("{given} weights given for {sources} sources")]
    Arity { given: usize, sources: usize },
}

impl Weights {
    pub fn new(map: BTreeMap<u32, Rational>) -> Result<Self, WeightsError> {
        if let Some((s, _)) = map.iter().find(|(_, w)| w.is_negative()) {
            return Err(WeightsError::Negative(*s));
        }
        Ok(Weights(map))
    }

    /// Positional weights: the `k`-th value belongs to source `k + 1`.
    pub fn positional(values: Vec<Rational>) -> Result<Self, WeightsError> {
        Self::new(
            values
                .into_iter()
                .enumerate()
                .map(|(i, w)| (i as u32 + 1, w))
                .collect(),
        )
    }

    /// Weight 1 on every listed source.
    pub fn uniform(sources: &[u32]) -> Self {
        Weights(sources.iter().map(|&s| (s, Rational::one())).collect())
    }

    pub fn get(&self, source: u32) -> Rational {
        self.0.get(&source).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.0.iter().map(|(k, v)| (*k, v))
    }

    /// Checks that every key names a source in `sources`.
    pub fn check_against(&self, sources: &[u32]) -> Result<(), WeightsError> {
        match self.0.keys().find(|k| !sources.contains(k)) {
            Some(k) => Err(WeightsError::UnknownSource(*k)),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn edge(id: &str, tail: &str, head: &str) -> Edge {
        Edge {
            id: id.into(),
            tail: tail.into(),
            head: head.into(),
            capacity: Rational::one(),
        }
    }

    fn butterfly() -> Network {
        Network {
            nodes: ["s1", "s2", "m", "n", "t1", "t2"].iter().map(|s| s.to_string()).collect(),
            edges: vec![
                edge("e_a", "s1", "m"),
                edge("e_b", "s2", "m"),
                edge("e_c", "m", "n"),
                edge("e_d", "n", "t1"),
                edge("e_e", "n", "t2"),
                edge("e_f", "s1", "t2"),
                edge("e_g", "s2", "t1"),
            ],
            sources: vec![
                Source { index: 1, at: "s1".into() },
                Source { index: 2, at: "s2".into() },
            ],
            sinks: vec![
                Sink { at: "t1".into(), demands: [1].into() },
                Sink { at: "t2".into(), demands: [2].into() },
            ],
        }
    }

    #[test]
    fn butterfly_is_valid() {
        assert_eq!(butterfly().validate(), vec![]);
    }

    #[test]
    fn in_and_out_of_bottleneck() {
        let net = butterfly();
        assert_eq!(net.in_edges(Element::Edge("e_c")).unwrap(), vec!["e_a", "e_b"]);
        assert_eq!(net.out_edges(Element::Edge("e_c")).unwrap(), vec!["e_d", "e_e"]);
        assert!(net.in_edges(Element::Node("s1")).unwrap().is_empty());
        assert!(net.out_edges(Element::Node("t2")).unwrap().is_empty());
        assert_eq!(
            net.in_edges(Element::Edge("nope")),
            Err(NetworkError::UnknownEdge("nope".into()))
        );
        assert_eq!(
            net.out_edges(Element::Node("x")),
            Err(NetworkError::UnknownNode("x".into()))
        );
    }

    #[test]
    fn edge_in_out_match_endpoints() {
        let net = butterfly();
        for e in &net.edges {
            assert_eq!(
                net.in_edges(Element::Edge(&e.id)).unwrap(),
                net.in_edges(Element::Node(&e.tail)).unwrap()
            );
            assert_eq!(
                net.out_edges(Element::Edge(&e.id)).unwrap(),
                net.out_edges(Element::Node(&e.head)).unwrap()
            );
        }
    }

    #[test]
    fn detects_cycle() {
        let net = Network {
            nodes: vec!["a".into(), "b".into()],
            edges: vec![edge("e1", "a", "b"), edge("e2", "b", "a")],
            ..Default::default()
        };
        let v = net.validate();
        assert!(v.iter().any(|v| matches!(v, Violation::Cycle(_))));
        assert!(v.iter().any(|v| v.to_string().starts_with("cycle detected")));
    }

    #[test]
    fn source_with_in_edge() {
        let mut net = butterfly();
        net.edges.push(edge("e_x", "m", "s1"));
        let v = net.validate();
        assert!(v.contains(&Violation::SourceHasInEdges("s1".into())));
        assert!(v.iter().any(|v| v.to_string().contains("In(S) nonempty")));
    }

    #[test]
    fn unknown_demand() {
        let mut net = butterfly();
        net.sinks[0].demands.insert(3);
        let v = net.validate();
        assert_eq!(
            v,
            vec![Violation::UnknownSource {
                sink: "t1".into(),
                index: 3
            }]
        );
        assert!(v[0].to_string().contains("unknown source"));
    }

    #[test]
    fn degenerate_source_equals_sink() {
        let net = Network {
            nodes: vec!["v".into()],
            edges: vec![],
            sources: vec![Source { index: 1, at: "v".into() }],
            sinks: vec![Sink { at: "v".into(), demands: [1].into() }],
        };
        let v = net.validate();
        assert!(v.contains(&Violation::NoEdges));
        assert!(v.contains(&Violation::SourceAtSink("v".into())));
    }

    #[test]
    fn violations_sorted_by_subject() {
        let mut net = butterfly();
        net.edges[6].capacity = Rational::from_integer(-1);
        net.edges[0].capacity = Rational::from_integer(-1);
        let v = net.validate();
        assert_eq!(
            v,
            vec![
                Violation::NegativeCapacity("e_a".into()),
                Violation::NegativeCapacity("e_g".into())
            ]
        );
    }

    #[test]
    fn topological_order_is_stable() {
        let net = butterfly();
        let order = net.topological_nodes().unwrap();
        assert_eq!(order, vec!["s1", "s2", "m", "n", "t1", "t2"]);
        assert_eq!(net.clone().topological_nodes().unwrap(), order);
    }

    #[test]
    fn weights() {
        let w = Weights::positional(vec![Rational::one(), Rational::new(1, 2)]).unwrap();
        assert_eq!(w.get(2), Rational::new(1, 2));
        assert_eq!(w.get(3), Rational::zero());
        assert!(w.check_against(&[1, 2]).is_ok());
        assert_eq!(w.check_against(&[1]), Err(WeightsError::UnknownSource(2)));
        assert_eq!(
            Weights::positional(vec![Rational::from_integer(-1)]),
            Err(WeightsError::Negative(1))
        );
    }
}
