//! Splits, split-modules, the canonical split decomposition, and the
//! partition of the vertex set into inclusion-maximal split-modules of
//! rank-width at most c.
//!
//! A split-module is one side of a split of its connected component: the
//! vertices with neighbors outside (its frontier) all see the same outside
//! neighborhood. The whole component and the empty set count by convention.

use std::collections::HashSet;

use crate::bits::BitSet;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::par;
use crate::rankwidth::{is_rank_width_at_most, rank_width_exact, RankWidth};

/// Largest component for which the subset-scan split finder is run.
pub const SPLIT_SCAN_LIMIT: usize = 26;

/// True iff `a` is contained in one connected component and all members with
/// outside neighbors share one outside neighborhood.
pub fn is_split_module(g: &Graph, a: &VertexSet) -> bool {
    if a.is_empty() {
        return true;
    }
    if a.iter().any(|v| v >= g.n()) {
        return false;
    }
    let comp = g.component_of(a.first().unwrap());
    if !a.is_subset_of(&comp) {
        return false;
    }
    shares_outside_neighborhood(g, a)
}

fn shares_outside_neighborhood(g: &Graph, a: &VertexSet) -> bool {
    let mut shared: Option<BitSet> = None;
    for v in a.iter() {
        let out = g.neighbors(v).difference(a);
        if out.is_empty() {
            continue;
        }
        match &shared {
            None => shared = Some(out),
            Some(s) => {
                if *s != out {
                    return false;
                }
            }
        }
    }
    true
}

/// The members of split-module `a` with neighbors outside `a`; empty for a
/// full component.
pub fn frontier(g: &Graph, a: &VertexSet) -> Result<VertexSet> {
    if !is_split_module(g, a) {
        return Err(Error::contract(format!(
            "frontier: {:?} is not a split-module",
            a.to_vec()
        )));
    }
    Ok(a.iter()
        .filter(|&v| !g.neighbors(v).difference(a).is_empty())
        .collect())
}

/// A split-module together with its frontier and host component index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitModule {
    pub vertices: VertexSet,
    pub frontier: VertexSet,
    pub host_component: usize,
}

impl SplitModule {
    pub fn of(g: &Graph, vertices: VertexSet) -> Result<SplitModule> {
        let frontier = frontier(g, &vertices)?;
        let host_component = match vertices.first() {
            Some(v) => {
                let comps = g.connected_components();
                comps
                    .iter()
                    .position(|c| c.contains(v))
                    .expect("vertex in some component")
            }
            None => 0,
        };
        Ok(SplitModule {
            vertices,
            frontier,
            host_component,
        })
    }
}

// --- canonical split decomposition ----------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BagKind {
    Prime,
    Clique,
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// An original graph vertex.
    Vertex(usize),
    /// A marker standing for everything beyond the given tree edge.
    Marker(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BagSlot {
    pub bag: usize,
    pub slot: usize,
}

#[derive(Debug, Clone)]
pub struct Bag {
    /// Quotient graph on the slots.
    pub label: Graph,
    pub slots: Vec<Slot>,
    pub kind: BagKind,
}

/// Canonical split tree of one connected component: marker-linked bags, each
/// prime or degenerate, whose recomposition yields the component.
#[derive(Debug, Clone)]
pub struct SplitTree {
    pub component: VertexSet,
    pub bags: Vec<Bag>,
    /// Tree edges as matching marker slots, indexed by the id carried in
    /// [`Slot::Marker`].
    pub edges: Vec<(BagSlot, BagSlot)>,
}

fn classify(label: &Graph) -> BagKind {
    let n = label.n();
    if label.edge_count() == n * (n.saturating_sub(1)) / 2 {
        return BagKind::Clique;
    }
    if star_center(label).is_some() {
        return BagKind::Star;
    }
    BagKind::Prime
}

/// The center of a star: adjacent to all others, all others pairwise
/// non-adjacent.
fn star_center(label: &Graph) -> Option<usize> {
    let n = label.n();
    if n < 2 || label.edge_count() != n - 1 {
        return None;
    }
    (0..n).find(|&c| label.degree(c) == n - 1)
}

/// Canonical split decomposition, one tree per connected component, ordered
/// by minimum vertex.
pub fn split_decomposition(g: &Graph) -> Result<Vec<SplitTree>> {
    g.connected_components()
        .into_iter()
        .map(|comp| decompose_component(g, comp))
        .collect()
}

fn decompose_component(g: &Graph, comp: VertexSet) -> Result<SplitTree> {
    if comp.len() > SPLIT_SCAN_LIMIT {
        return Err(Error::capacity(format!(
            "component of size {} exceeds the split-scan limit {SPLIT_SCAN_LIMIT}",
            comp.len()
        )));
    }
    let (local, map) = g.induced_subgraph(&comp)?;
    let payloads: Vec<Slot> = map.new_to_old.iter().map(|&v| Slot::Vertex(v)).collect();
    let mut b = Builder {
        bags: Vec::new(),
        n_edges: 0,
    };
    b.decompose(local, payloads);
    let mut tree = SplitTree {
        component: comp,
        bags: b.bags,
        edges: Vec::new(),
    };
    tree.edges = endpoints(&tree.bags, b.n_edges);
    canonicalize(&mut tree);
    Ok(tree)
}

struct Builder {
    bags: Vec<Bag>,
    n_edges: usize,
}

impl Builder {
    fn decompose(&mut self, q: Graph, slots: Vec<Slot>) {
        debug_assert_eq!(q.n(), slots.len());
        let kind = classify(&q);
        if kind == BagKind::Prime && q.n() >= 4 {
            if let Some(mask) = find_split_mask(&q) {
                let eid = self.n_edges;
                self.n_edges += 1;
                let (qa, sa) = side_with_marker(&q, &slots, &BitSet::from_mask(mask), eid);
                let co = BitSet::from_mask(mask).complement(q.n());
                let (qb, sb) = side_with_marker(&q, &slots, &co, eid);
                self.decompose(qa, sa);
                self.decompose(qb, sb);
                return;
            }
        }
        self.bags.push(Bag {
            label: q,
            slots,
            kind,
        });
    }
}

/// Quotient on `side` plus a marker adjacent to the side's frontier.
fn side_with_marker(q: &Graph, slots: &[Slot], side: &BitSet, eid: usize) -> (Graph, Vec<Slot>) {
    let (mut sub, map) = q.induced_subgraph(side).expect("side in range");
    let marker = sub.n();
    let mut bigger = Graph::new(marker + 1);
    for (u, v) in sub.edges() {
        bigger.add_edge(u, v);
    }
    for v in side.iter() {
        if !q.neighbors(v).difference(side).is_empty() {
            bigger.add_edge(map.old_to_new[v].unwrap(), marker);
        }
    }
    sub = bigger;
    let mut new_slots: Vec<Slot> = map.new_to_old.iter().map(|&v| slots[v]).collect();
    new_slots.push(Slot::Marker(eid));
    (sub, new_slots)
}

/// First non-trivial split side containing vertex 0, in ascending mask
/// order; `None` when the graph is prime. Subset scan, capped by
/// [`SPLIT_SCAN_LIMIT`].
fn find_split_mask(q: &Graph) -> Option<u64> {
    let n = q.n();
    debug_assert!(n >= 4 && n <= SPLIT_SCAN_LIMIT);
    let adj: Vec<u64> = (0..n).map(|v| q.neighbors(v).as_mask()).collect();
    let full: u64 = (1 << n) - 1;
    // Masks containing vertex 0: mask = (x << 1) | 1.
    let hit = par::find_first_in_range(0..(1 << (n - 1)) as u64, |x| {
        let mask = (x << 1) | 1;
        let size = mask.count_ones() as usize;
        size >= 2 && size <= n - 2 && is_split_mask(&adj, mask, full)
    });
    hit.map(|x| (x << 1) | 1)
}

fn is_split_mask(adj: &[u64], mask: u64, full: u64) -> bool {
    let outside = full & !mask;
    let mut shared = 0u64;
    let mut m = mask;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        let out = adj[v] & outside;
        if out != 0 {
            if shared == 0 {
                shared = out;
            } else if shared != out {
                return false;
            }
        }
    }
    true
}

/// Recover edge endpoints by scanning marker slots.
fn endpoints(bags: &[Bag], n_edges: usize) -> Vec<(BagSlot, BagSlot)> {
    let mut half: Vec<Vec<BagSlot>> = vec![Vec::new(); n_edges];
    for (bi, bag) in bags.iter().enumerate() {
        for (si, slot) in bag.slots.iter().enumerate() {
            if let Slot::Marker(eid) = slot {
                half[*eid].push(BagSlot { bag: bi, slot: si });
            }
        }
    }
    half.into_iter()
        .map(|h| {
            debug_assert_eq!(h.len(), 2, "marker without a partner");
            (h[0], h[1])
        })
        .collect()
}

/// Merge neighboring degenerate bags until the tree is canonical: no two
/// cliques share a tree edge, and no two stars are joined center-to-leaf.
fn canonicalize(tree: &mut SplitTree) {
    loop {
        let mut merged = false;
        for eid in 0..tree.edges.len() {
            let (s1, s2) = tree.edges[eid];
            if s1.bag == usize::MAX {
                continue; // retired edge
            }
            let k1 = tree.bags[s1.bag].kind;
            let k2 = tree.bags[s2.bag].kind;
            let mergeable = match (k1, k2) {
                (BagKind::Clique, BagKind::Clique) => true,
                (BagKind::Star, BagKind::Star) => {
                    let c1 = star_center(&tree.bags[s1.bag].label) == Some(s1.slot);
                    let c2 = star_center(&tree.bags[s2.bag].label) == Some(s2.slot);
                    c1 != c2
                }
                _ => false,
            };
            if mergeable {
                merge_bags(tree, eid);
                merged = true;
                break;
            }
        }
        if !merged {
            break;
        }
    }
    compact(tree);
}

/// Contract the tree edge `eid`, fusing its two bags into one.
fn merge_bags(tree: &mut SplitTree, eid: usize) {
    let (s1, s2) = tree.edges[eid];
    let (b1, b2) = (s1.bag, s2.bag);
    debug_assert_ne!(b1, b2);
    let bag1 = tree.bags[b1].clone();
    let bag2 = tree.bags[b2].clone();
    let keep1: Vec<usize> = (0..bag1.slots.len()).filter(|&i| i != s1.slot).collect();
    let keep2: Vec<usize> = (0..bag2.slots.len()).filter(|&i| i != s2.slot).collect();
    let n = keep1.len() + keep2.len();
    let mut label = Graph::new(n);
    let pos1: std::collections::HashMap<usize, usize> =
        keep1.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let pos2: std::collections::HashMap<usize, usize> = keep2
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new + keep1.len()))
        .collect();
    for (u, v) in bag1.label.edges() {
        if u != s1.slot && v != s1.slot {
            label.add_edge(pos1[&u], pos1[&v]);
        }
    }
    for (u, v) in bag2.label.edges() {
        if u != s2.slot && v != s2.slot {
            label.add_edge(pos2[&u], pos2[&v]);
        }
    }
    for u in bag1.label.neighbors(s1.slot).iter() {
        for v in bag2.label.neighbors(s2.slot).iter() {
            label.add_edge(pos1[&u], pos2[&v]);
        }
    }
    let mut slots = Vec::with_capacity(n);
    slots.extend(keep1.iter().map(|&i| bag1.slots[i]));
    slots.extend(keep2.iter().map(|&i| bag2.slots[i]));
    let kind = classify(&label);
    tree.bags[b1] = Bag { label, slots, kind };
    // Retire bag b2 and edge eid, then refresh endpoints from the slots.
    tree.bags[b2].slots.clear();
    tree.bags[b2].label = Graph::new(0);
    tree.edges[eid] = (
        BagSlot {
            bag: usize::MAX,
            slot: 0,
        },
        BagSlot {
            bag: usize::MAX,
            slot: 0,
        },
    );
    refresh_endpoints(tree);
}

fn refresh_endpoints(tree: &mut SplitTree) {
    let mut half: Vec<Vec<BagSlot>> = vec![Vec::new(); tree.edges.len()];
    for (bi, bag) in tree.bags.iter().enumerate() {
        for (si, slot) in bag.slots.iter().enumerate() {
            if let Slot::Marker(eid) = slot {
                half[*eid].push(BagSlot { bag: bi, slot: si });
            }
        }
    }
    for (eid, h) in half.into_iter().enumerate() {
        if h.len() == 2 {
            tree.edges[eid] = (h[0], h[1]);
        }
    }
}

/// Drop retired bags and edges, renumbering the survivors.
fn compact(tree: &mut SplitTree) {
    let live_bags: Vec<usize> = (0..tree.bags.len())
        .filter(|&b| !tree.bags[b].slots.is_empty() || tree.bags[b].label.n() > 0)
        .collect();
    let live_edges: Vec<usize> = (0..tree.edges.len())
        .filter(|&e| tree.edges[e].0.bag != usize::MAX)
        .collect();
    let edge_rename: std::collections::HashMap<usize, usize> = live_edges
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    let mut bags: Vec<Bag> = Vec::with_capacity(live_bags.len());
    for &b in &live_bags {
        let mut bag = tree.bags[b].clone();
        for slot in bag.slots.iter_mut() {
            if let Slot::Marker(eid) = slot {
                *slot = Slot::Marker(edge_rename[eid]);
            }
        }
        bags.push(bag);
    }
    tree.bags = bags;
    tree.edges = endpoints(&tree.bags, live_edges.len());
}

// --- reading the tree -------------------------------------------------------

impl SplitTree {
    /// Bag-level adjacency: for each bag, its incident (edge id, neighbor
    /// bag) pairs.
    fn bag_adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for (eid, (s1, s2)) in self.edges.iter().enumerate() {
            adj[s1.bag].push((eid, s2.bag));
            adj[s2.bag].push((eid, s1.bag));
        }
        adj
    }

    /// Original vertices carried by bags reachable from `from` without using
    /// tree edge `avoid`.
    fn leaves_beyond(&self, from: usize, avoid: usize) -> VertexSet {
        let adj = self.bag_adjacency();
        let mut seen = vec![false; self.bags.len()];
        let mut out = BitSet::new();
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(b) = stack.pop() {
            for slot in &self.bags[b].slots {
                if let Slot::Vertex(v) = slot {
                    out.insert(*v);
                }
            }
            for &(eid, nb) in &adj[b] {
                if eid != avoid && !seen[nb] {
                    seen[nb] = true;
                    stack.push(nb);
                }
            }
        }
        out
    }

    /// The vertex content of one branch at a bag: a single vertex for a
    /// vertex slot, everything beyond the tree edge for a marker slot.
    pub fn branch(&self, bag: usize, slot: usize) -> VertexSet {
        match self.bags[bag].slots[slot] {
            Slot::Vertex(v) => BitSet::from_iter([v]),
            Slot::Marker(eid) => {
                let (s1, s2) = self.edges[eid];
                let other = if s1.bag == bag && s1.slot == slot { s2 } else { s1 };
                self.leaves_beyond(other.bag, eid)
            }
        }
    }

    /// Rebuild the component graph by contracting every tree edge; the
    /// result is the induced subgraph of the original graph on the
    /// component, over the original vertex ids.
    pub fn recompose(&self, n: usize) -> Graph {
        let mut t = self.clone();
        while let Some(eid) = (0..t.edges.len()).find(|&e| t.edges[e].0.bag != usize::MAX) {
            merge_bags(&mut t, eid);
        }
        compact(&mut t);
        debug_assert_eq!(t.bags.len(), 1);
        let bag = &t.bags[0];
        let mut g = Graph::new(n);
        for (u, v) in bag.label.edges() {
            match (bag.slots[u], bag.slots[v]) {
                (Slot::Vertex(a), Slot::Vertex(b)) => g.add_edge(a, b),
                _ => unreachable!("marker survived full contraction"),
            }
        }
        g
    }

    /// Every split-module of the component realizable from the tree:
    /// branches and their complements everywhere, arbitrary branch unions at
    /// degenerate bags, plus the trivial ones. Exponential in the maximum
    /// degenerate-bag degree; meant for desk-scale cross-checks.
    pub fn all_split_modules(&self) -> Vec<VertexSet> {
        let mut out: HashSet<VertexSet> = HashSet::new();
        out.insert(BitSet::new());
        out.insert(self.component.clone());
        for (bi, bag) in self.bags.iter().enumerate() {
            let branches: Vec<VertexSet> = (0..bag.slots.len())
                .map(|si| self.branch(bi, si))
                .collect();
            for b in &branches {
                out.insert(b.clone());
                out.insert(self.component.difference(b));
            }
            if bag.kind != BagKind::Prime {
                let k = branches.len();
                assert!(k <= 20, "degenerate bag too large for enumeration");
                for subset in 1u32..(1 << k) - 1 {
                    let mut union = BitSet::new();
                    for (i, b) in branches.iter().enumerate() {
                        if subset & (1 << i) != 0 {
                            union.union_with(b);
                        }
                    }
                    out.insert(union);
                }
            }
        }
        let mut v: Vec<VertexSet> = out.into_iter().collect();
        v.sort();
        v
    }

    /// The candidate split-modules needed to recover the maximal-class
    /// partition: branch complements, tree-edge sides and pairwise branch
    /// unions at degenerate bags. Polynomially many.
    fn class_candidates(&self) -> Vec<VertexSet> {
        let mut out: HashSet<VertexSet> = HashSet::new();
        out.insert(self.component.clone());
        for (bi, bag) in self.bags.iter().enumerate() {
            let branches: Vec<VertexSet> = (0..bag.slots.len())
                .map(|si| self.branch(bi, si))
                .collect();
            for b in &branches {
                out.insert(b.clone());
                out.insert(self.component.difference(b));
            }
            if bag.kind != BagKind::Prime {
                for i in 0..branches.len() {
                    for j in i + 1..branches.len() {
                        out.insert(branches[i].union(&branches[j]));
                    }
                }
            }
        }
        let mut v: Vec<VertexSet> = out.into_iter().collect();
        v.sort();
        v
    }
}

/// Union of the recompositions of all component trees.
pub fn recompose_forest(trees: &[SplitTree], n: usize) -> Graph {
    let mut g = Graph::new(n);
    for tree in trees {
        for (u, v) in tree.recompose(n).edges() {
            g.add_edge(u, v);
        }
    }
    g
}

// --- the maximal-class partition --------------------------------------------

/// Partition of V into the inclusion-maximal split-modules of rank-width at
/// most `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitModulePartition {
    pub classes: Vec<VertexSet>,
    pub c: usize,
}

impl SplitModulePartition {
    pub fn class_of(&self, v: usize) -> Option<usize> {
        self.classes.iter().position(|cl| cl.contains(v))
    }
}

/// The unique partition of V into inclusion-maximal split-modules of
/// rank-width at most `c`.
///
/// When rw(g) <= c the whole of each component qualifies and the component
/// partition is returned; rw(g) = c+1 is rejected because the underlying
/// relation is only guaranteed to be an equivalence from c+2 on.
pub fn sim_c_classes(g: &Graph, c: usize, caps: &Caps) -> Result<SplitModulePartition> {
    match rank_width_exact(g, Some(c + 1), caps)? {
        RankWidth::Exact { width, .. } if width <= c => {
            let mut classes = g.connected_components();
            classes.sort_by_key(|cl| cl.first());
            return Ok(SplitModulePartition { classes, c });
        }
        RankWidth::Exact { .. } => return Err(Error::AmbiguousThreshold(c + 1)),
        RankWidth::ExceedsCap => {}
    }

    let trees = split_decomposition(g)?;
    let mut uf = UnionFind::new(g.n());
    for tree in &trees {
        let candidates = tree.class_candidates();
        let small_rw: Vec<Result<bool>> = par::map_slice(&candidates, |cand| {
            let (sub, _) = g.induced_subgraph(cand)?;
            is_rank_width_at_most(&sub, c, caps)
        });
        for (cand, ok) in candidates.iter().zip(small_rw) {
            if ok? {
                let mut it = cand.iter();
                if let Some(first) = it.next() {
                    for v in it {
                        uf.union(first, v);
                    }
                }
            }
        }
    }
    let mut classes = uf.groups();
    classes.sort_by_key(|cl| cl.first());

    // The theory guarantees the groups are themselves split-modules of
    // rank-width <= c above the threshold; verify before handing them out.
    let mut cover = BitSet::new();
    for class in &classes {
        if class.intersects(&cover) {
            return Err(Error::invariant("classes are not disjoint"));
        }
        cover.union_with(class);
        if !is_split_module(g, class) {
            return Err(Error::invariant(format!(
                "class {:?} is not a split-module",
                class.to_vec()
            )));
        }
        let (sub, _) = g.induced_subgraph(class)?;
        if !is_rank_width_at_most(&sub, c, caps)? {
            return Err(Error::invariant(format!(
                "class {:?} has rank-width above {c}",
                class.to_vec()
            )));
        }
    }
    if cover != g.vertex_set() {
        return Err(Error::invariant("classes do not cover V"));
    }
    Ok(SplitModulePartition { classes, c })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn groups(&mut self) -> Vec<VertexSet> {
        let n = self.parent.len();
        let mut by_root: std::collections::BTreeMap<usize, BitSet> = Default::default();
        for v in 0..n {
            let r = self.find(v);
            by_root.entry(r).or_default().insert(v);
        }
        by_root.into_values().collect()
    }
}
