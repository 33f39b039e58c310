//! Simple undirected graphs over `0..n`, stored as one adjacency bit-row per
//! vertex so that cut submatrices can be extracted by masking.

use crate::bits::BitSet;
use crate::error::{Error, Result};

pub type VertexSet = BitSet;

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    rows: Vec<BitSet>,
    m: usize,
    name: Option<String>,
}

/// Vertex renumbering produced by [`Graph::induced_subgraph`].
#[derive(Debug, Clone)]
pub struct IndexMap {
    pub new_to_old: Vec<usize>,
    pub old_to_new: Vec<Option<usize>>,
}

impl IndexMap {
    pub fn identity(n: usize) -> Self {
        IndexMap {
            new_to_old: (0..n).collect(),
            old_to_new: (0..n).map(Some).collect(),
        }
    }

    /// Map a set of old vertices into the new indexing; members outside the
    /// kept set are dropped.
    pub fn image(&self, old: &VertexSet) -> VertexSet {
        old.iter()
            .filter_map(|v| self.old_to_new.get(v).copied().flatten())
            .collect()
    }

    /// Map a set of new vertices back to the old indexing.
    pub fn preimage(&self, new: &VertexSet) -> VertexSet {
        new.iter().map(|v| self.new_to_old[v]).collect()
    }
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            rows: vec![BitSet::new(); n],
            m: 0,
            name: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn set_name(&mut self, name: Option<String>) {
        self.name = name;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u < self.n && v < self.n, "vertex out of range");
        debug_assert!(u != v, "self-loops are not representable");
        if !self.rows[u].contains(v) {
            self.rows[u].insert(v);
            self.rows[v].insert(u);
            self.m += 1;
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.rows[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &BitSet {
        &self.rows[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        0..self.n
    }

    pub fn vertex_set(&self) -> VertexSet {
        BitSet::all(self.n)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n {
            for v in self.rows[u].iter() {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Neighbors of `a` outside of `a`.
    pub fn neighborhood_of_set(&self, a: &VertexSet) -> VertexSet {
        let mut out = BitSet::new();
        for v in a.iter() {
            out.union_with(&self.rows[v]);
        }
        out.difference_with(a);
        out
    }

    /// `G[a]` together with the renumbering old -> new. Vertices keep their
    /// relative order.
    pub fn induced_subgraph(&self, a: &VertexSet) -> Result<(Graph, IndexMap)> {
        if let Some(v) = a.iter().find(|&v| v >= self.n) {
            return Err(Error::contract(format!(
                "induced_subgraph: vertex {v} out of range (n = {})",
                self.n
            )));
        }
        let new_to_old: Vec<usize> = a.iter().collect();
        let mut old_to_new = vec![None; self.n];
        for (new, &old) in new_to_old.iter().enumerate() {
            old_to_new[old] = Some(new);
        }
        let mut g = Graph::new(new_to_old.len());
        for (new_u, &old_u) in new_to_old.iter().enumerate() {
            for old_v in self.rows[old_u].intersection(a).iter() {
                let new_v = old_to_new[old_v].unwrap();
                if new_u < new_v {
                    g.add_edge(new_u, new_v);
                }
            }
        }
        Ok((
            g,
            IndexMap {
                new_to_old,
                old_to_new,
            },
        ))
    }

    /// `G - a`, with the renumbering of the kept vertices.
    pub fn remove_vertices(&self, a: &VertexSet) -> Result<(Graph, IndexMap)> {
        self.induced_subgraph(&a.complement(self.n))
    }

    /// Maximal connected vertex sets, ordered by their minimum vertex.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let mut seen = BitSet::new();
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen.contains(start) {
                continue;
            }
            let comp = self.component_of(start);
            seen.union_with(&comp);
            out.push(comp);
        }
        out
    }

    /// The connected component containing `v`.
    pub fn component_of(&self, v: usize) -> VertexSet {
        let mut comp = BitSet::from_iter([v]);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for w in self.rows[u].iter() {
                if !comp.contains(w) {
                    comp.insert(w);
                    stack.push(w);
                }
            }
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.component_of(0).len() == self.n
    }

    /// True iff the graph is a forest.
    pub fn is_acyclic(&self) -> bool {
        // A graph is a forest iff m = n - #components.
        self.m + self.connected_components().len() == self.n
    }

    /// True iff the graph has no edges.
    pub fn is_edgeless(&self) -> bool {
        self.m == 0
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

// --- .gr file format ------------------------------------------------------
//
// Optional comment lines starting with "c "; exactly one header line
// "p graph <n> <m>"; then m lines "<u> <v>" with 1-based endpoints.

impl Graph {
    pub fn parse_gr(text: &str) -> Result<Graph> {
        let mut graphs = parse_gr_sections(text, false)?;
        Ok(graphs.pop().expect("single section"))
    }

    /// Parse a file containing several concatenated .gr sections. A preceding
    /// `c name <label>` comment names the following graph.
    pub fn parse_multi_gr(text: &str) -> Result<Vec<Graph>> {
        parse_gr_sections(text, true)
    }

    pub fn write_gr(&self, comments: &[String]) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            out.push_str(&format!("c name {name}\n"));
        }
        for c in comments {
            out.push_str(&format!("c {c}\n"));
        }
        out.push_str(&format!("p graph {} {}\n", self.n, self.m));
        for (u, v) in self.edges() {
            out.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        out
    }
}

fn parse_gr_sections(text: &str, multi: bool) -> Result<Vec<Graph>> {
    let mut graphs: Vec<Graph> = Vec::new();
    let mut current: Option<(Graph, usize)> = None; // graph, declared m
    let mut pending_name: Option<String> = None;
    let mut edges_seen = 0usize;

    let err = |line: usize, msg: String| Error::Parse { line, msg };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "c" || line.starts_with("c ") {
            if let Some(label) = line.strip_prefix("c name ") {
                pending_name = Some(label.trim().to_string());
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            if current.is_some() {
                if !multi {
                    return Err(err(lineno, "unexpected second header".into()));
                }
                let (g, declared) = current.take().unwrap();
                if edges_seen != declared {
                    return Err(err(
                        lineno,
                        format!("expected {declared} edge lines, found {edges_seen}"),
                    ));
                }
                graphs.push(g);
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "graph" {
                return Err(err(lineno, format!("malformed header \"{line}\"")));
            }
            let n: usize = fields[1]
                .parse()
                .map_err(|_| err(lineno, format!("bad vertex count \"{}\"", fields[1])))?;
            let m: usize = fields[2]
                .parse()
                .map_err(|_| err(lineno, format!("bad edge count \"{}\"", fields[2])))?;
            let mut g = Graph::new(n);
            g.name = pending_name.take();
            current = Some((g, m));
            edges_seen = 0;
            continue;
        }
        // Edge line.
        let (g, declared) = current
            .as_mut()
            .ok_or_else(|| err(lineno, "edge before header".into()))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err(lineno, format!("malformed edge line \"{line}\"")));
        }
        let u: usize = fields[0]
            .parse()
            .map_err(|_| err(lineno, format!("bad endpoint \"{}\"", fields[0])))?;
        let v: usize = fields[1]
            .parse()
            .map_err(|_| err(lineno, format!("bad endpoint \"{}\"", fields[1])))?;
        if u == 0 || v == 0 || u > g.n || v > g.n {
            return Err(err(
                lineno,
                format!("vertex out of range 1..={} in \"{line}\"", g.n),
            ));
        }
        if u == v {
            return Err(err(lineno, format!("self-loop at vertex {u}")));
        }
        edges_seen += 1;
        if edges_seen > *declared {
            return Err(err(
                lineno,
                format!("more edge lines than the declared {declared}"),
            ));
        }
        g.add_edge(u - 1, v - 1); // duplicates collapse silently
    }

    match current {
        Some((g, declared)) => {
            if edges_seen != declared {
                return Err(err(
                    text.lines().count(),
                    format!("expected {declared} edge lines, found {edges_seen}"),
                ));
            }
            graphs.push(g);
        }
        None => {
            return Err(err(text.lines().count().max(1), "no header found".into()));
        }
    }
    Ok(graphs)
}

// --- small construction helpers used all over the test suites --------------

pub fn path(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n {
        g.add_edge(v - 1, v);
    }
    g
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3);
    let mut g = path(n);
    g.add_edge(n - 1, 0);
    g
}

pub fn complete(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            g.add_edge(u, v);
        }
    }
    g
}

pub fn edgeless(n: usize) -> Graph {
    Graph::new(n)
}

/// Star `K_{1,k}` with the center at vertex 0.
pub fn star(leaves: usize) -> Graph {
    let mut g = Graph::new(leaves + 1);
    for v in 1..=leaves {
        g.add_edge(0, v);
    }
    g
}

/// Disjoint union, keeping the left graph's vertices first.
pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
    let mut g = Graph::new(a.n() + b.n());
    for (u, v) in a.edges() {
        g.add_edge(u, v);
    }
    for (u, v) in b.edges() {
        g.add_edge(a.n() + u, a.n() + v);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_k2() {
        let g = Graph::parse_gr("p graph 2 1\n1 2\n").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn parse_c5() {
        let g = Graph::parse_gr("p graph 5 5\n1 2\n2 3\n3 4\n4 5\n5 1\n").unwrap();
        assert_eq!(g, cycle(5));
    }

    #[test]
    fn parse_edgeless() {
        let g = Graph::parse_gr("p graph 3 0\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match Graph::parse_gr("c ok\np graph 2 1\n1 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        match Graph::parse_gr("p graph 2 1\n1 1\n") {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("self-loop"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(Graph::parse_gr("p graf 2 1\n1 2\n").is_err());
        assert!(Graph::parse_gr("1 2\n").is_err());
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = Graph::parse_gr("p graph 2 2\n1 2\n2 1\n").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn multi_section_parse() {
        let text = "c name K3\np graph 3 3\n1 2\n2 3\n1 3\nc name P3\np graph 3 2\n1 2\n2 3\n";
        let gs = Graph::parse_multi_gr(text).unwrap();
        assert_eq!(gs.len(), 2);
        assert_eq!(gs[0].name(), Some("K3"));
        assert_eq!(gs[1].name(), Some("P3"));
        assert_eq!(gs[0], complete(3).with_name("K3"));
    }

    #[test]
    fn induced_subgraph_examples() {
        let c5 = cycle(5);
        // Two adjacent vertices of C5 give K2.
        let (g, _) = c5.induced_subgraph(&BitSet::from_iter([0, 1])).unwrap();
        assert_eq!(g, complete(2));
        // The whole vertex set gives C5 back.
        let (g, map) = c5.induced_subgraph(&c5.vertex_set()).unwrap();
        assert_eq!(g, c5);
        assert_eq!(map.new_to_old, vec![0, 1, 2, 3, 4]);
        // Two non-adjacent vertices give the edgeless graph on 2 vertices.
        let (g, _) = c5.induced_subgraph(&BitSet::from_iter([0, 2])).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.n(), 2);
        // Out-of-range member is a contract violation.
        assert!(c5.induced_subgraph(&BitSet::from_iter([7])).is_err());
    }

    #[test]
    fn deletion_semantics() {
        let c5 = cycle(5);
        let (g, _) = c5.remove_vertices(&BitSet::from_iter([1])).unwrap();
        assert_eq!(g.n(), 4);
        assert!(g.is_acyclic());
    }

    #[test]
    fn components() {
        assert_eq!(cycle(5).connected_components().len(), 1);
        assert!(Graph::new(0).connected_components().is_empty());
        let g = disjoint_union(&complete(2), &Graph::new(1));
        let comps = g.connected_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].to_vec(), vec![0, 1]);
        assert_eq!(comps[1].to_vec(), vec![2]);
    }

    #[test]
    fn acyclicity() {
        assert!(path(4).is_acyclic());
        assert!(!cycle(5).is_acyclic());
        assert!(!disjoint_union(&complete(3), &complete(3)).is_acyclic());
        assert!(Graph::new(0).is_acyclic());
    }

    #[test]
    fn gr_roundtrip() {
        let g = cycle(5).with_name("C5");
        let text = g.write_gr(&[]);
        let h = Graph::parse_gr(&text).unwrap();
        assert_eq!(g, h);
        assert_eq!(h.name(), Some("C5"));
    }
}
