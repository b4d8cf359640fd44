//! Undirected weighted graphs with a partial label map.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stable node identifier. Ordering is lexicographic on the string form and
/// fixes matrix row order everywhere downstream.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v.to_string())
    }
}

/// Categorical node label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Label(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

/// Immutable undirected graph with strictly positive edge weights.
///
/// Nodes are held in sorted `NodeId` order; adjacency rows list neighbours by
/// node index in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    adjacency: Vec<Vec<(usize, f64)>>,
    labels: BTreeMap<NodeId, Label>,
}

impl WeightedGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn index_of(&self, id: &NodeId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.index.contains_key(id)
    }

    /// Neighbours of node `i` as `(index, weight)` pairs.
    pub fn neighbours(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    /// Edge weight, 0 when absent.
    pub fn weight(&self, a: &NodeId, b: &NodeId) -> f64 {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.adjacency[i]
                .binary_search_by_key(&j, |&(k, _)| k)
                .map(|p| self.adjacency[i][p].1)
                .unwrap_or(0.0),
            _ => 0.0,
        }
    }

    /// Weighted degree of node `i`.
    pub fn degree(&self, i: usize) -> f64 {
        self.adjacency[i].iter().map(|&(_, w)| w).sum()
    }

    pub fn labels(&self) -> &BTreeMap<NodeId, Label> {
        &self.labels
    }

    pub fn label(&self, id: &NodeId) -> Option<&Label> {
        self.labels.get(id)
    }

    pub fn is_labelled(&self, id: &NodeId) -> bool {
        self.labels.contains_key(id)
    }

    /// Labelled nodes in node order.
    pub fn labelled(&self) -> impl Iterator<Item = &NodeId> + '_ {
        self.nodes.iter().filter(|n| self.labels.contains_key(*n))
    }

    /// Unlabelled nodes in node order.
    pub fn unlabelled(&self) -> impl Iterator<Item = &NodeId> + '_ {
        self.nodes.iter().filter(|n| !self.labels.contains_key(*n))
    }

    pub fn labelled_count(&self) -> usize {
        self.labels.len()
    }

    pub fn unlabelled_count(&self) -> usize {
        self.nodes.len() - self.labels.len()
    }

    /// Dense symmetric adjacency matrix, rows and columns in node order.
    pub fn to_dense_adjacency(&self) -> Vec<Vec<f64>> {
        let n = self.nodes.len();
        let mut a = vec![vec![0.0; n]; n];
        for (i, row) in self.adjacency.iter().enumerate() {
            for &(j, w) in row {
                a[i][j] = w;
            }
        }
        a
    }

    /// Edges `(a, b, w)` with `a < b`, in node order.
    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(move |(i, row)| {
            row.iter()
                .filter(move |&&(j, _)| j > i)
                .map(move |&(j, w)| (&self.nodes[i], &self.nodes[j], w))
        })
    }

    /// Copy of the graph with `drop` removed, along with incident edges and
    /// labels.
    pub fn without_nodes(&self, drop: &BTreeSet<NodeId>) -> WeightedGraph {
        let mut b = GraphBuilder::default();
        for n in self.nodes.iter().filter(|n| !drop.contains(*n)) {
            b.add_node(n.clone());
        }
        for (x, y, w) in self.edges() {
            if !drop.contains(x) && !drop.contains(y) {
                b.add_edge(x.clone(), y.clone(), w);
            }
        }
        for (n, l) in &self.labels {
            if !drop.contains(n) {
                b.set_label(n.clone(), l.clone());
            }
        }
        b.build().expect("subgraph of a valid graph is valid")
    }

    /// Copy of the graph with every edge weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<WeightedGraph> {
        let mut g = self.clone();
        for row in &mut g.adjacency {
            for (_, w) in row.iter_mut() {
                *w *= factor;
                if *w <= 0.0 || !w.is_finite() {
                    return Err(Error::InvalidArgument(format!("scale factor {factor}")));
                }
            }
        }
        Ok(g)
    }

    /// Copy of the graph with a replaced label map.
    pub fn with_labels(&self, labels: BTreeMap<NodeId, Label>) -> Result<WeightedGraph> {
        if let Some(bad) = labels.keys().find(|n| !self.contains(n)) {
            return Err(Error::LabelOnUnknownNode(bad.clone()));
        }
        let mut g = self.clone();
        g.labels = labels;
        Ok(g)
    }
}

/// Accumulates nodes, edges and labels, validating on [`GraphBuilder::build`].
///
/// Repeated undirected pairs are summed.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: BTreeSet<NodeId>,
    edges: BTreeMap<(NodeId, NodeId), f64>,
    labels: BTreeMap<NodeId, Label>,
    error: Option<Error>,
}

impl GraphBuilder {
    pub fn add_node(&mut self, id: impl Into<NodeId>) -> &mut Self {
        self.nodes.insert(id.into());
        self
    }

    pub fn add_edge(&mut self, a: impl Into<NodeId>, b: impl Into<NodeId>, weight: f64) -> &mut Self {
        let (a, b) = (a.into(), b.into());
        if self.error.is_some() {
            return self;
        }
        if a == b {
            self.error = Some(Error::SelfLoop(a));
            return self;
        }
        if weight <= 0.0 || !weight.is_finite() {
            self.error = Some(Error::NonPositiveWeight { a, b, weight });
            return self;
        }
        self.nodes.insert(a.clone());
        self.nodes.insert(b.clone());
        let key = if a < b { (a, b) } else { (b, a) };
        *self.edges.entry(key).or_insert(0.0) += weight;
        self
    }

    pub fn set_label(&mut self, id: impl Into<NodeId>, label: impl Into<Label>) -> &mut Self {
        let (id, label) = (id.into(), label.into());
        if self.error.is_none() {
            if let Some(prev) = self.labels.get(&id) {
                if *prev != label {
                    self.error = Some(Error::ConflictingLabel(id));
                    return self;
                }
            }
            self.labels.insert(id, label);
        }
        self
    }

    pub fn build(self) -> Result<WeightedGraph> {
        if let Some(e) = self.error {
            return Err(e);
        }
        if let Some(bad) = self.labels.keys().find(|n| !self.nodes.contains(*n)) {
            return Err(Error::LabelOnUnknownNode(bad.clone()));
        }
        let nodes: Vec<NodeId> = self.nodes.into_iter().collect();
        let index: HashMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for ((a, b), w) in self.edges {
            let (i, j) = (index[&a], index[&b]);
            adjacency[i].push((j, w));
            adjacency[j].push((i, w));
        }
        for row in &mut adjacency {
            row.sort_unstable_by_key(|&(j, _)| j);
        }
        Ok(WeightedGraph { nodes, index, adjacency, labels: self.labels })
    }
}

impl<A: Into<NodeId>, B: Into<NodeId>> Extend<(A, B, f64)> for GraphBuilder {
    fn extend<T: IntoIterator<Item = (A, B, f64)>>(&mut self, iter: T) {
        for (a, b, w) in iter {
            self.add_edge(a, b, w);
        }
    }
}

/// Builds a graph from an edge list and a partial label map.
pub fn build_graph<A, B>(
    edges: impl IntoIterator<Item = (A, B, f64)>,
    labels: impl IntoIterator<Item = (NodeId, Label)>,
) -> Result<WeightedGraph>
where
    A: Into<NodeId>,
    B: Into<NodeId>,
{
    let mut b = GraphBuilder::default();
    b.extend(edges);
    for (n, l) in labels {
        b.set_label(n, l);
    }
    b.build()
}

/// Split of the unlabelled nodes by whether a labelled node is reachable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Reachability {
    pub reachable: BTreeSet<NodeId>,
    pub stranded: BTreeSet<NodeId>,
}

/// Breadth-first search outward from every labelled node.
pub fn reachable_to_labelled(graph: &WeightedGraph) -> Reachability {
    let n = graph.node_count();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for id in graph.labelled() {
        let i = graph.index_of(id).unwrap();
        seen[i] = true;
        queue.push_back(i);
    }
    while let Some(i) = queue.pop_front() {
        for &(j, _) in graph.neighbours(i) {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    let mut out = Reachability::default();
    for (i, id) in graph.nodes().iter().enumerate() {
        if graph.is_labelled(id) {
            continue;
        }
        if seen[i] {
            out.reachable.insert(id.clone());
        } else {
            out.stranded.insert(id.clone());
        }
    }
    out
}

/// Reads `node_a,node_b,weight` lines (no header).
pub fn read_edge_list<R: Read>(reader: R) -> Result<Vec<(NodeId, NodeId, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(Error::Parse { line, message: format!("expected 3 fields, got {}", rec.len()) });
        }
        let w: f64 = rec[2]
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("bad weight `{}`", &rec[2]) })?;
        out.push((NodeId::from(&rec[0]), NodeId::from(&rec[1]), w));
    }
    Ok(out)
}

/// Reads `node,label` lines (no header).
pub fn read_labels<R: Read>(reader: R) -> Result<BTreeMap<NodeId, Label>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 {
            return Err(Error::Parse { line, message: format!("expected 2 fields, got {}", rec.len()) });
        }
        out.insert(NodeId::from(&rec[0]), Label::from(&rec[1]));
    }
    Ok(out)
}

pub fn write_edge_list<W: Write>(graph: &WeightedGraph, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for (a, b, weight) in graph.edges() {
        w.write_record([a.as_str(), b.as_str(), &weight.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_labels<W: Write>(labels: &BTreeMap<NodeId, Label>, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for (n, l) in labels {
        w.write_record([n.as_str(), l.as_str()])?;
    }
    w.flush()?;
    Ok(())
}
