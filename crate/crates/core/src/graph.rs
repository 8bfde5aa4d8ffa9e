//! Static unweighted contact graphs and their summary statistics.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::pairs;

/// Undirected simple graph on nodes `0..n`.
///
/// Edges are stored once as `(i, j)` with `i < j`, sorted lexicographically;
/// neighbor lists are sorted ascending. Both views are built together and never
/// mutated afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adjacency: alloc::vec![Vec::new(); n],
        }
    }

    /// Build from arbitrary edge pairs. Duplicates and reversed duplicates
    /// collapse; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on node {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {n} nodes"
                )));
            }
            list.push(if a < b { (a, b) } else { (b, a) });
        }
        Ok(Self::from_canonical(n, list))
    }

    /// `edges` must already satisfy `i < j < n`; they are sorted and deduplicated here.
    pub(crate) fn from_canonical(n: usize, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut adjacency = alloc::vec![Vec::new(); n];
        for &(i, j) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph { n, edges, adjacency }
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list, `i < j`, lexicographic.
    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Dense row-major 0/1 adjacency, used where every pair is visited anyway.
    pub fn adjacency_bits(&self) -> Vec<bool> {
        let mut bits = alloc::vec![false; self.n * self.n];
        for &(i, j) in &self.edges {
            bits[i * self.n + j] = true;
            bits[j * self.n + i] = true;
        }
        bits
    }

    /// Triangle count at every node.
    pub fn triangles_per_node(&self) -> Vec<u64> {
        let mut tri = alloc::vec![0u64; self.n];
        for &(u, v) in &self.edges {
            // common neighbours w > v, so each triangle u < v < w is seen once
            let (a, b) = (&self.adjacency[u], &self.adjacency[v]);
            let (mut p, mut q) = (a.partition_point(|&w| w <= v), b.partition_point(|&w| w <= v));
            while p < a.len() && q < b.len() {
                match a[p].cmp(&b[q]) {
                    core::cmp::Ordering::Less => p += 1,
                    core::cmp::Ordering::Greater => q += 1,
                    core::cmp::Ordering::Equal => {
                        tri[u] += 1;
                        tri[v] += 1;
                        tri[a[p]] += 1;
                        p += 1;
                        q += 1;
                    }
                }
            }
        }
        tri
    }
}

/// Label ↔ index map, indices assigned in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeLabels {
    labels: Vec<String>,
    #[serde(skip)]
    index: BTreeMap<String, usize>,
}

impl NodeLabels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Labels `"0"`, `"1"`, ... for graphs whose nodes are plain indices.
    pub fn numeric(n: usize) -> Self {
        Self::from_labels((0..n).map(|i| i.to_string()).collect())
            .expect("numeric labels are unique")
    }

    pub fn from_labels(labels: Vec<String>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate node label `{l}`")));
            }
        }
        Ok(NodeLabels { labels, index })
    }

    /// Index of `label`, assigning the next free index on first sight.
    pub fn intern(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), i);
        i
    }

    pub fn get(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.labels
    }

    /// Rebuild the lookup table after deserialization.
    pub fn reindex(self) -> Result<Self> {
        Self::from_labels(self.labels)
    }
}

/// A graph together with the labels its nodes were read from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: NodeLabels,
}

/// One observed proximity contact. `time` is carried but never interpreted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactEvent {
    pub time: String,
    pub node_a: String,
    pub node_b: String,
}

impl ContactEvent {
    pub fn new(time: impl Into<String>, node_a: impl Into<String>, node_b: impl Into<String>) -> Result<Self> {
        let (node_a, node_b) = (node_a.into(), node_b.into());
        if node_a == node_b {
            return Err(Error::InvalidGraph(format!("contact of `{node_a}` with itself")));
        }
        Ok(ContactEvent { time: time.into(), node_a, node_b })
    }
}

/// Presence of `person` at event `event_id` (e.g. a talk).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttendanceRecord {
    pub event_id: String,
    pub person: String,
}

impl AttendanceRecord {
    pub fn new(event_id: impl Into<String>, person: impl Into<String>) -> Self {
        AttendanceRecord { event_id: event_id.into(), person: person.into() }
    }
}

fn split_tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty())
}

/// Parse a line-oriented edge list.
///
/// Blank lines and lines starting with `#` are skipped. Each remaining line
/// holds two labels separated by commas and/or whitespace. A `%N <count>`
/// line declares the node count; in that case every label must be an integer
/// in `0..count` and is used directly as the node index, so isolated nodes and
/// indices survive a write/read cycle.
pub fn parse_edge_list(text: &str) -> Result<LabeledGraph> {
    let mut declared: Option<usize> = None;
    let mut raw: Vec<(usize, String, String)> = Vec::new();
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("%N") {
            let parse_err = || Error::Parse {
                line: lineno,
                message: format!("bad node-count header `{line}`"),
            };
            if declared.is_some() || !raw.is_empty() {
                return Err(Error::Parse {
                    line: lineno,
                    message: "node-count header must come once, before any edge".into(),
                });
            }
            let count = rest.trim().parse::<usize>().map_err(|_| parse_err())?;
            declared = Some(count);
            continue;
        }
        let tokens: Vec<&str> = split_tokens(line).collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 2 node labels, found {}", tokens.len()),
            });
        }
        if tokens[0] == tokens[1] {
            return Err(Error::SelfLoop { line: lineno, label: tokens[0].to_string() });
        }
        raw.push((lineno, tokens[0].to_string(), tokens[1].to_string()));
    }

    match declared {
        Some(n) => {
            let mut edges = Vec::with_capacity(raw.len());
            for (lineno, a, b) in &raw {
                let idx = |s: &str| -> Result<usize> {
                    s.parse::<usize>().ok().filter(|&i| i < n).ok_or_else(|| Error::Parse {
                        line: *lineno,
                        message: format!("label `{s}` is not a node index below the declared count {n}"),
                    })
                };
                let (i, j) = (idx(a)?, idx(b)?);
                // "1" and "01" name the same node under a count header
                if i == j {
                    return Err(Error::SelfLoop { line: *lineno, label: a.clone() });
                }
                edges.push((i.min(j), i.max(j)));
            }
            Ok(LabeledGraph { graph: Graph::from_canonical(n, edges), labels: NodeLabels::numeric(n) })
        }
        None => {
            let mut labels = NodeLabels::new();
            let mut edges = Vec::with_capacity(raw.len());
            for (_, a, b) in &raw {
                let (i, j) = (labels.intern(a), labels.intern(b));
                edges.push((i.min(j), i.max(j)));
            }
            Ok(LabeledGraph { graph: Graph::from_canonical(labels.len(), edges), labels })
        }
    }
}

/// Render a graph as an edge list with a `%N` header, one `i j` line per edge.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + g.n_edges() * 10);
    out.push_str(&format!("%N {}\n", g.n_nodes()));
    for &(i, j) in g.edges() {
        out.push_str(&format!("{i} {j}\n"));
    }
    out
}

/// An edge joins two people iff at least one contact between them was
/// recorded, at any time.
pub fn contacts_to_graph(events: &[ContactEvent]) -> Result<LabeledGraph> {
    let mut labels = NodeLabels::new();
    let mut edges = Vec::with_capacity(events.len());
    for e in events {
        if e.node_a == e.node_b {
            return Err(Error::InvalidGraph(format!("contact of `{}` with itself", e.node_a)));
        }
        let (i, j) = (labels.intern(&e.node_a), labels.intern(&e.node_b));
        edges.push((i.min(j), i.max(j)));
    }
    Ok(LabeledGraph { graph: Graph::from_canonical(labels.len(), edges), labels })
}

/// Everyone attending the same event is connected to everyone else there;
/// the graph is the union of these cliques.
pub fn attendance_to_graph(records: &[AttendanceRecord]) -> LabeledGraph {
    let mut labels = NodeLabels::new();
    let mut events: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for r in records {
        let i = labels.intern(&r.person);
        events.entry(r.event_id.as_str()).or_default().push(i);
    }
    let mut edges = Vec::new();
    for members in events.values_mut() {
        members.sort_unstable();
        members.dedup();
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                edges.push((i, j));
            }
        }
    }
    LabeledGraph { graph: Graph::from_canonical(labels.len(), edges), labels }
}

/// `M / C(N, 2)`.
pub fn density(g: &Graph) -> Result<f64> {
    if g.n_nodes() < 2 {
        return Err(Error::UndefinedStatistic("density needs at least 2 nodes"));
    }
    Ok(g.n_edges() as f64 / pairs(g.n_nodes()) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusteringMode {
    /// Mean of local coefficients; nodes of degree < 2 count as 0.
    #[default]
    AverageLocal,
    /// `3 × triangles / connected triples`.
    GlobalTransitivity,
}

impl ClusteringMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ClusteringMode::AverageLocal => "average_local",
            ClusteringMode::GlobalTransitivity => "global_transitivity",
        }
    }
}

pub fn clustering_coefficient(g: &Graph, mode: ClusteringMode) -> f64 {
    let tri = g.triangles_per_node();
    match mode {
        ClusteringMode::AverageLocal => {
            if g.n_nodes() == 0 {
                return 0.0;
            }
            let total: f64 = (0..g.n_nodes())
                .map(|v| {
                    let d = g.degree(v);
                    if d < 2 { 0.0 } else { tri[v] as f64 / pairs(d) as f64 }
                })
                .sum();
            total / g.n_nodes() as f64
        }
        ClusteringMode::GlobalTransitivity => {
            let triples: u64 = (0..g.n_nodes()).map(|v| pairs(g.degree(v))).sum();
            if triples == 0 {
                return 0.0;
            }
            // each triangle appears at its three corners
            let closed: u64 = tri.iter().sum();
            closed as f64 / triples as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub degrees: Vec<usize>,
    pub average: f64,
    pub maximum: usize,
}

pub fn degree_stats(g: &Graph) -> Result<DegreeStats> {
    if g.n_nodes() == 0 {
        return Err(Error::UndefinedStatistic("average degree of an empty node set"));
    }
    let degrees = g.degrees();
    let maximum = degrees.iter().copied().max().unwrap_or(0);
    Ok(DegreeStats {
        average: 2.0 * g.n_edges() as f64 / g.n_nodes() as f64,
        maximum,
        degrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn g(n: usize, e: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, e.iter().copied()).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        g(n, &e)
    }

    #[test]
    fn edge_list_basic() {
        let lg = parse_edge_list("a b\nb c\n").unwrap();
        assert_eq!(lg.graph.n_nodes(), 3);
        assert_eq!(lg.graph.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(lg.labels.get("c"), Some(2));
    }

    #[test]
    fn edge_list_dedup() {
        let lg = parse_edge_list("a b\nb a\na b").unwrap();
        assert_eq!((lg.graph.n_nodes(), lg.graph.n_edges()), (2, 1));
    }

    #[test]
    fn edge_list_self_loop_line_number() {
        assert_eq!(
            parse_edge_list("a a").unwrap_err(),
            Error::SelfLoop { line: 1, label: "a".into() }
        );
        match parse_edge_list("# c\nx,y\nz z\n").unwrap_err() {
            Error::SelfLoop { line, .. } => assert_eq!(line, 3),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn edge_list_malformed() {
        match parse_edge_list("a b\na b c\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e:?}"),
        }
        assert!(matches!(parse_edge_list("a\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn edge_list_comma_and_comments() {
        let lg = parse_edge_list("# header\n\n1,2\n2 , 3\n  # indented comment\n").unwrap();
        assert_eq!(lg.graph.n_edges(), 2);
        assert_eq!(lg.labels.as_slice(), &["1", "2", "3"]);
    }

    #[test]
    fn node_count_header_keeps_isolated_nodes() {
        let lg = parse_edge_list("%N 5\n3 1\n").unwrap();
        assert_eq!(lg.graph.n_nodes(), 5);
        assert_eq!(lg.graph.edges(), &[(1, 3)]);
        assert_eq!(lg.graph.degree(0), 0);
        assert!(matches!(parse_edge_list("%N 2\n0 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("0 1\n%N 2\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn edge_list_writer_round_trips() {
        let graph = g(6, &[(0, 4), (2, 3), (1, 4)]);
        let back = parse_edge_list(&write_edge_list(&graph)).unwrap();
        assert_eq!(back.graph, graph);
    }

    #[test]
    fn contacts_collapse_time() {
        let ev = |t: &str, a: &str, b: &str| ContactEvent::new(t, a, b).unwrap();
        let lg = contacts_to_graph(&[ev("1", "a", "b"), ev("2", "a", "b"), ev("3", "b", "c")]).unwrap();
        assert_eq!((lg.graph.n_nodes(), lg.graph.n_edges()), (3, 2));

        let empty = contacts_to_graph(&[]).unwrap();
        assert_eq!((empty.graph.n_nodes(), empty.graph.n_edges()), (0, 0));

        let lg = contacts_to_graph(&[ev("1", "a", "b"), ev("1", "c", "d")]).unwrap();
        assert_eq!((lg.graph.n_nodes(), lg.graph.n_edges()), (4, 2));
        assert!(!lg.graph.has_edge(1, 2));

        assert!(ContactEvent::new("0", "x", "x").is_err());
    }

    #[test]
    fn attendance_cliques() {
        let r = |e: &str, p: &str| AttendanceRecord::new(e, p);
        let tri = attendance_to_graph(&[r("e1", "a"), r("e1", "b"), r("e1", "c")]);
        assert_eq!(tri.graph.n_edges(), 3);

        let path = attendance_to_graph(&[r("e1", "a"), r("e1", "b"), r("e2", "b"), r("e2", "c")]);
        assert_eq!(path.graph.edges(), &[(0, 1), (1, 2)]);

        let single = attendance_to_graph(&[r("e1", "a")]);
        assert_eq!((single.graph.n_nodes(), single.graph.n_edges()), (1, 0));

        // repeated attendance of one person is not a self-loop
        let dup = attendance_to_graph(&[r("e1", "a"), r("e1", "a"), r("e1", "b")]);
        assert_eq!(dup.graph.n_edges(), 1);
    }

    #[test]
    fn density_examples() {
        assert_eq!(density(&complete(4)).unwrap(), 1.0);
        assert_eq!(density(&g(4, &[(0, 1), (1, 2), (2, 3)])).unwrap(), 0.5);
        assert!(density(&Graph::empty(1)).is_err());
    }

    #[test]
    fn density_infectious_scale() {
        // a 201-node graph with 659 edges, as in the Infectious day network
        let mut e = Vec::new();
        'outer: for i in 0..201 {
            for j in i + 1..201 {
                if e.len() == 659 {
                    break 'outer;
                }
                e.push((i, j));
            }
        }
        let graph = g(201, &e);
        assert!((density(&graph).unwrap() - 0.0328).abs() < 1e-4);
        assert!((degree_stats(&graph).unwrap().average - 6.557).abs() < 1e-3);
    }

    /// Local clustering by checking every neighbour pair.
    fn brute_force_local(g: &Graph) -> f64 {
        let n = g.n_nodes();
        let mut total = 0.0;
        for v in 0..n {
            let nb = g.neighbors(v);
            if nb.len() < 2 {
                continue;
            }
            let mut closed = 0;
            let mut all = 0;
            for (x, &a) in nb.iter().enumerate() {
                for &b in &nb[x + 1..] {
                    all += 1;
                    if g.has_edge(a, b) {
                        closed += 1;
                    }
                }
            }
            total += closed as f64 / all as f64;
        }
        total / n as f64
    }

    #[test]
    fn clustering_matches_brute_force() {
        let mut rng = crate::seed::stream(21, &[]);
        for _ in 0..30 {
            let n = rand::Rng::random_range(&mut rng, 2..25);
            let graph = crate::models::EdgeProbabilityModel::Er { n_nodes: n, p: 0.3 }.sample_graph(&mut rng);
            let fast = clustering_coefficient(&graph, ClusteringMode::AverageLocal);
            assert!((fast - brute_force_local(&graph)).abs() < 1e-12);
        }
    }

    #[test]
    fn clustering_examples() {
        let tri = complete(3);
        let p3 = g(3, &[(0, 1), (1, 2)]);
        for mode in [ClusteringMode::AverageLocal, ClusteringMode::GlobalTransitivity] {
            assert_eq!(clustering_coefficient(&tri, mode), 1.0);
            assert_eq!(clustering_coefficient(&p3, mode), 0.0);
            assert_eq!(clustering_coefficient(&Graph::empty(0), mode), 0.0);
        }
        // K4 minus edge (2,3): nodes 0 and 1 close 2 of 3 neighbour pairs,
        // nodes 2 and 3 close their only pair
        let k4e = g(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        assert_relative_eq!(brute_force_local(&k4e), 5.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(
            clustering_coefficient(&k4e, ClusteringMode::AverageLocal),
            5.0 / 6.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            clustering_coefficient(&k4e, ClusteringMode::GlobalTransitivity),
            0.75,
            epsilon = 1e-15
        );
    }

    #[test]
    fn degree_examples() {
        let star = g(4, &[(0, 1), (0, 2), (0, 3)]);
        let s = degree_stats(&star).unwrap();
        assert_eq!(s.degrees, vec![3, 1, 1, 1]);
        assert_eq!((s.average, s.maximum), (1.5, 3));
        let k = degree_stats(&complete(4)).unwrap();
        assert_eq!((k.average, k.maximum), (3.0, 3));
        assert!(degree_stats(&Graph::empty(0)).is_err());
        assert_eq!(degree_stats(&Graph::empty(3)).unwrap().maximum, 0);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::from_edges(3, [(1, 1)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
    }
}
