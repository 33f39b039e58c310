//! Cut-rank and exact rank-width at desk scale.
//!
//! Rank-width is computed by a dynamic program over vertex subsets of each
//! connected component: `f(S)` is the best achievable maximum cut-rank over
//! all rooted binary trees with leaf set `S`, counting the cut above every
//! node including `S` itself, and the final width is the best way of joining
//! two such trees by an edge. The O(3^n) cost is acceptable below the
//! configured exact limit.

use crate::bits::BitSet;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::gf2::rank_of_rows;
use crate::graph::{Graph, VertexSet};
use crate::par;

/// GF(2) rank of the `u` x `V \ u` adjacency submatrix.
pub fn cut_rank(g: &Graph, u: &VertexSet) -> usize {
    let outside = u.complement(g.n());
    let rows: Vec<BitSet> = u
        .iter()
        .map(|v| g.neighbors(v).intersection(&outside))
        .collect();
    rank_of_rows(rows)
}

/// An unrooted tree of maximum degree 3 whose leaves are the graph vertices.
#[derive(Debug, Clone)]
pub struct RankDecomposition {
    adj: Vec<Vec<usize>>,
    leaf_vertex: Vec<Option<usize>>,
    width: usize,
}

impl RankDecomposition {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, nbrs) in self.adj.iter().enumerate() {
            for &b in nbrs {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// For a leaf node, the graph vertex mapped to it.
    pub fn leaf_vertex(&self, node: usize) -> Option<usize> {
        self.leaf_vertex[node]
    }

    /// Graph vertices whose leaves lie on `a`'s side of the tree edge (a, b).
    pub fn side_leaves(&self, a: usize, b: usize) -> VertexSet {
        let mut side = BitSet::new();
        let mut stack = vec![a];
        let mut seen = vec![false; self.adj.len()];
        seen[b] = true;
        seen[a] = true;
        while let Some(x) = stack.pop() {
            if let Some(v) = self.leaf_vertex[x] {
                side.insert(v);
            }
            for &y in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        side
    }

    /// Check tree shape and the leaf bijection against `g`, and recompute the
    /// width from scratch. Returns the recomputed width.
    pub fn validate(&self, g: &Graph) -> Result<usize> {
        let t = self.adj.len();
        let mut leaves = BitSet::new();
        for node in 0..t {
            let d = self.adj[node].len();
            match self.leaf_vertex[node] {
                Some(v) => {
                    if d > 1 {
                        return Err(Error::invariant(format!("leaf node {node} has degree {d}")));
                    }
                    if leaves.contains(v) {
                        return Err(Error::invariant(format!("vertex {v} mapped twice")));
                    }
                    leaves.insert(v);
                }
                None => {
                    if d != 3 {
                        return Err(Error::invariant(format!(
                            "internal node {node} has degree {d}, expected 3"
                        )));
                    }
                }
            }
        }
        if leaves != g.vertex_set() {
            return Err(Error::invariant("leaf map is not a bijection onto V"));
        }
        let mut width = 0;
        for (a, b) in self.tree_edges() {
            width = width.max(cut_rank(g, &self.side_leaves(a, b)));
        }
        Ok(width)
    }
}

/// Result of [`rank_width_exact`].
#[derive(Debug, Clone)]
pub enum RankWidth {
    /// Exact width, with a witness decomposition when the graph has at least
    /// one vertex (a single-leaf marker tree for n = 1).
    Exact {
        width: usize,
        witness: Option<RankDecomposition>,
    },
    /// The width is strictly larger than the requested cap.
    ExceedsCap,
}

impl RankWidth {
    pub fn width(&self) -> Option<usize> {
        match self {
            RankWidth::Exact { width, .. } => Some(*width),
            RankWidth::ExceedsCap => None,
        }
    }
}

// Hard bound above which the mask tables no longer fit; the configured
// exact limit may not exceed it.
const MASK_LIMIT: usize = 24;

/// Exact rank-width with optional cap. With `cap = Some(k)`, DP states of
/// cut-rank above `k` are pruned and `ExceedsCap` is reported as soon as no
/// decomposition of width <= k exists; this is how callers establish the
/// rank-width >= c+2 threshold cheaply.
pub fn rank_width_exact(g: &Graph, cap: Option<usize>, caps: &Caps) -> Result<RankWidth> {
    let comps = g.connected_components();
    let limit = caps.exact_rw_limit.min(MASK_LIMIT);
    if let Some(big) = comps.iter().find(|c| c.len() > limit) {
        return Err(Error::capacity(format!(
            "component of size {} exceeds the exact rank-width limit {limit}; \
             use cap-bounded mode on a smaller graph or raise the limit",
            big.len()
        )));
    }
    if g.n() == 0 {
        return Ok(RankWidth::Exact {
            width: 0,
            witness: None,
        });
    }

    let mut width = 0;
    let mut parts: Vec<RankDecomposition> = Vec::new();
    for comp in &comps {
        let (sub, map) = g.induced_subgraph(comp)?;
        match component_rank_width(&sub, cap) {
            None => return Ok(RankWidth::ExceedsCap),
            Some((w, tree)) => {
                width = width.max(w);
                parts.push(relabel_leaves(tree, &map.new_to_old));
            }
        }
    }
    if let Some(k) = cap {
        if width > k {
            return Ok(RankWidth::ExceedsCap);
        }
    }
    let witness = Some(join_decompositions(parts, width));
    Ok(RankWidth::Exact { width, witness })
}

/// `rw(g) <= k`, using the fast distance-hereditary style reduction for
/// k <= 1 and the capped subset DP otherwise.
pub fn is_rank_width_at_most(g: &Graph, k: usize, caps: &Caps) -> Result<bool> {
    if k == 0 {
        return Ok(g.is_edgeless());
    }
    if k == 1 {
        return Ok(rank_width_at_most_one(g));
    }
    match rank_width_exact(g, Some(k), caps)? {
        RankWidth::Exact { width, .. } => Ok(width <= k),
        RankWidth::ExceedsCap => Ok(false),
    }
}

/// rw(G) <= 1 holds exactly for distance-hereditary graphs, which are the
/// graphs reducible to single vertices by repeatedly deleting pendant
/// vertices and twins.
fn rank_width_at_most_one(g: &Graph) -> bool {
    for comp in g.connected_components() {
        let (mut h, _) = g.induced_subgraph(&comp).expect("component in range");
        loop {
            if h.n() <= 1 {
                break;
            }
            let mut removed = None;
            'search: for v in 0..h.n() {
                if h.degree(v) <= 1 {
                    removed = Some(v);
                    break;
                }
                for u in 0..v {
                    let mut nu = h.neighbors(u).clone();
                    let mut nv = h.neighbors(v).clone();
                    nu.remove(v);
                    nv.remove(u);
                    if nu == nv {
                        removed = Some(v);
                        break 'search;
                    }
                }
            }
            match removed {
                Some(v) => {
                    let keep = BitSet::from_iter([v]).complement(h.n());
                    h = h.induced_subgraph(&keep).expect("in range").0;
                }
                None => return false,
            }
        }
    }
    true
}

const INF: u8 = u8::MAX;

/// DP on one connected component. Returns `None` when a cap is set and
/// exceeded, otherwise the width and a witness tree (component-local vertex
/// numbering).
fn component_rank_width(g: &Graph, cap: Option<usize>) -> Option<(usize, RankDecomposition)> {
    let n = g.n();
    if n == 1 {
        let tree = RankDecomposition {
            adj: vec![vec![]],
            leaf_vertex: vec![Some(0)],
            width: 0,
        };
        return Some((0, tree));
    }
    let cap8 = cap.map_or(INF, |c| c.min(INF as usize - 1) as u8);
    let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).as_mask() as u32).collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };

    // Cut-rank for every subset.
    let rho: Vec<u8> = par::map_range(0..=full as usize, |mask| mask_cut_rank(&adj, mask as u32));

    let size = full as usize + 1;
    let mut f = vec![INF; size];
    let mut choice = vec![0u32; size];
    for mask in 1..=full {
        let m = mask as usize;
        if rho[m] > cap8 {
            continue; // pruned state
        }
        if mask & (mask - 1) == 0 {
            f[m] = rho[m];
            continue;
        }
        let low = mask & mask.wrapping_neg();
        let mut best = INF;
        let mut best_t = 0u32;
        // Proper submasks containing the lowest bit, so each bipartition is
        // seen once.
        let mut t = (mask - 1) & mask;
        while t != 0 {
            if t & low != 0 {
                let other = mask & !t;
                let cand = f[t as usize].max(f[other as usize]);
                if cand < best {
                    best = cand;
                    best_t = t;
                }
            }
            t = (t - 1) & mask;
        }
        if best != INF {
            f[m] = best.max(rho[m]);
            choice[m] = best_t;
        }
        if f[m] > cap8 {
            f[m] = INF;
        }
    }

    // Top split: join two rooted trees by an edge.
    let mut best = INF;
    let mut best_a = 0u32;
    for a in 1..full {
        if a & 1 == 0 {
            continue; // fix vertex 0 on the a-side
        }
        let b = full & !a;
        let cand = f[a as usize].max(f[b as usize]);
        if cand < best {
            best = cand;
            best_a = a;
        }
    }
    if best == INF {
        return None;
    }

    let mut tree = RankDecomposition {
        adj: Vec::new(),
        leaf_vertex: Vec::new(),
        width: best as usize,
    };
    let ra = build_rooted(&mut tree, &choice, best_a);
    let rb = build_rooted(&mut tree, &choice, full & !best_a);
    tree.adj[ra].push(rb);
    tree.adj[rb].push(ra);
    Some((best as usize, tree))
}

fn mask_cut_rank(adj: &[u32], mask: u32) -> u8 {
    let mut rows: Vec<u32> = Vec::new();
    let mut m = mask;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        let row = adj[v] & !mask;
        if row != 0 {
            rows.push(row);
        }
    }
    let mut rank = 0u8;
    for i in 0..rows.len() {
        if rows[i] == 0 {
            continue;
        }
        let pivot = rows[i] & rows[i].wrapping_neg();
        for j in i + 1..rows.len() {
            if rows[j] & pivot != 0 {
                rows[j] ^= rows[i];
            }
        }
        rank += 1;
    }
    rank
}

fn build_rooted(tree: &mut RankDecomposition, choice: &[u32], mask: u32) -> usize {
    if mask & (mask - 1) == 0 {
        let v = mask.trailing_zeros() as usize;
        tree.adj.push(vec![]);
        tree.leaf_vertex.push(Some(v));
        return tree.adj.len() - 1;
    }
    let t = choice[mask as usize];
    let left = build_rooted(tree, choice, t);
    let right = build_rooted(tree, choice, mask & !t);
    tree.adj.push(vec![left, right]);
    tree.leaf_vertex.push(None);
    let node = tree.adj.len() - 1;
    tree.adj[left].push(node);
    tree.adj[right].push(node);
    node
}

fn relabel_leaves(mut tree: RankDecomposition, new_to_old: &[usize]) -> RankDecomposition {
    for lv in tree.leaf_vertex.iter_mut() {
        if let Some(v) = lv {
            *v = new_to_old[*v];
        }
    }
    tree
}

/// Link per-component decompositions into one tree; every linking edge has
/// cut-rank 0 because it separates whole components.
fn join_decompositions(parts: Vec<RankDecomposition>, width: usize) -> RankDecomposition {
    let mut iter = parts.into_iter();
    let mut acc = iter.next().expect("at least one component");
    acc.width = width;
    for part in iter {
        let offset = acc.adj.len();
        for nbrs in part.adj {
            acc.adj.push(nbrs.into_iter().map(|x| x + offset).collect());
        }
        acc.leaf_vertex.extend(part.leaf_vertex);
        let end = acc.adj.len();
        let a = attachment_point(&mut acc, 0, offset);
        let b = attachment_point(&mut acc, offset, end);
        acc.adj[a].push(b);
        acc.adj[b].push(a);
    }
    acc
}

/// A node of degree < 3 in the node range [lo, hi), subdividing an edge when
/// none exists.
fn attachment_point(tree: &mut RankDecomposition, lo: usize, hi: usize) -> usize {
    for node in lo..hi {
        if tree.adj[node].len() < 3 && (tree.leaf_vertex[node].is_none() || tree.adj[node].is_empty())
        {
            return node;
        }
    }
    // All nodes saturated: subdivide the first edge inside the range.
    let a = (lo..hi)
        .find(|&x| tree.adj[x].iter().any(|&y| y >= lo && y < hi))
        .expect("range has an edge");
    let b = *tree.adj[a].iter().find(|&&y| y >= lo && y < hi).unwrap();
    let x = tree.adj.len();
    tree.adj.push(vec![a, b]);
    tree.leaf_vertex.push(None);
    tree.adj[a].retain(|&y| y != b);
    tree.adj[b].retain(|&y| y != a);
    tree.adj[a].push(x);
    tree.adj[b].push(x);
    x
}
