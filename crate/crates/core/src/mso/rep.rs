//! Search for small type-preserving representatives.
//!
//! Given an interpreted structure, find a graph of at most `size_cap`
//! vertices carrying boundary sets with the same q-type. Candidates are
//! enumerated by increasing vertex count, deduplicated up to isomorphism by
//! canonical adjacency-mask ordering, filtered through cheap low-round type
//! equalities first, and the first full match in the canonical order is
//! returned, so the output is deterministic and of minimum vertex count.

use std::collections::HashMap;

use rustc_hash::FxHashMap;

use crate::bits::BitSet;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::mso::types::{mso_type, TypeId, TypeTable};
use crate::rankwidth::is_rank_width_at_most;

/// Candidate filters for the search.
#[derive(Debug, Clone)]
pub struct RepOptions {
    pub size_cap: usize,
    /// Boundary sets are singletons standing for distinguished vertices;
    /// candidates must use pairwise-distinct singletons whose mutual
    /// adjacencies match the target's.
    pub singleton_boundaries: bool,
    /// Only acyclic candidates (keeps forest remainders forests).
    pub require_acyclic: bool,
    /// Only candidates of rank-width at most this (keeps modulator modules
    /// within their rank-width budget).
    pub max_rank_width: Option<usize>,
    /// Every component of the candidate must touch the boundary (or the
    /// whole candidate must be connected when the boundary is empty), so
    /// that a wired-in replacement stays one side of a split.
    pub component_anchored: bool,
}

impl RepOptions {
    pub fn sets(size_cap: usize) -> Self {
        RepOptions {
            size_cap,
            singleton_boundaries: false,
            require_acyclic: false,
            max_rank_width: None,
            component_anchored: false,
        }
    }

    pub fn singletons(size_cap: usize) -> Self {
        RepOptions {
            size_cap,
            singleton_boundaries: true,
            require_acyclic: false,
            max_rank_width: None,
            component_anchored: false,
        }
    }
}

const ENUM_SIZE_LIMIT: usize = 7;

/// Caches shared across representative searches: the interning table, the
/// canonical candidate graphs per size, and candidate types per
/// (graph, boundary, rounds).
#[derive(Default)]
pub struct RepEngine {
    pub table: TypeTable,
    graphs: HashMap<usize, Vec<Graph>>,
    cand_types: FxHashMap<(usize, usize, Vec<u64>, usize), TypeId>,
}

impl RepEngine {
    pub fn new() -> Self {
        Self::default()
    }

    /// All graphs on `m` vertices up to isomorphism, each the minimal
    /// adjacency mask of its class, in ascending mask order.
    fn canonical_graphs(&mut self, m: usize) -> &[Graph] {
        self.graphs.entry(m).or_insert_with(|| {
            assert!(m <= ENUM_SIZE_LIMIT, "candidate enumeration too large");
            let bits = m * m.saturating_sub(1) / 2;
            let perms = permutations(m);
            // For each permutation, where each edge-bit goes.
            let mut edge_index = vec![vec![0usize; bits]; perms.len()];
            for (pi, perm) in perms.iter().enumerate() {
                let mut k = 0;
                for u in 0..m {
                    for v in u + 1..m {
                        let (a, b) = (perm[u].min(perm[v]), perm[u].max(perm[v]));
                        edge_index[pi][k] = pair_index(a, b, m);
                        k += 1;
                    }
                }
            }
            let mut out = Vec::new();
            'mask: for mask in 0u64..(1 << bits) {
                for idx in &edge_index {
                    let mut image = 0u64;
                    for (k, &t) in idx.iter().enumerate() {
                        if mask & (1 << k) != 0 {
                            image |= 1 << t;
                        }
                    }
                    if image < mask {
                        continue 'mask; // not the canonical representative
                    }
                }
                out.push(graph_of_mask(m, mask));
            }
            out
        })
    }

    fn candidate_type(
        &mut self,
        m: usize,
        graph_idx: usize,
        h: &Graph,
        boundary: &[VertexSet],
        rounds: usize,
        caps: &Caps,
    ) -> Result<TypeId> {
        let key_sets: Vec<u64> = boundary.iter().map(|s| s.as_mask()).collect();
        let key = (m, graph_idx, key_sets, rounds);
        if let Some(&t) = self.cand_types.get(&key) {
            return Ok(t);
        }
        let t = mso_type(h, boundary, &[], rounds, &mut self.table, caps)?;
        self.cand_types.insert(key, t);
        Ok(t)
    }
}

fn pair_index(u: usize, v: usize, m: usize) -> usize {
    // Index of edge (u, v), u < v, in row-major upper-triangular order.
    let before: usize = (0..u).map(|r| m - 1 - r).sum();
    before + (v - u - 1)
}

fn graph_of_mask(m: usize, mask: u64) -> Graph {
    let mut g = Graph::new(m);
    let mut k = 0;
    for u in 0..m {
        for v in u + 1..m {
            if mask & (1 << k) != 0 {
                g.add_edge(u, v);
            }
            k += 1;
        }
    }
    g
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..m).collect();
    fn rec(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, &mut out);
    out
}

/// All graphs of the given order up to isomorphism, minimal-mask canonical,
/// ascending.
pub fn canonical_graphs_of_order(engine: &mut RepEngine, m: usize) -> &[Graph] {
    engine.canonical_graphs(m)
}

/// Find a graph `h` with `|V(h)| <= size_cap` and boundary sets of the same
/// q-type as `(g, boundary)`. Returns `g` itself when it is already within
/// the cap; otherwise the first (hence minimum-order) match in canonical
/// order, or a search-exhausted error.
pub fn find_representative(
    engine: &mut RepEngine,
    g: &Graph,
    boundary: &[VertexSet],
    rounds: usize,
    opts: &RepOptions,
    caps: &Caps,
) -> Result<(Graph, Vec<VertexSet>)> {
    if g.n() <= opts.size_cap {
        return Ok((g.clone(), boundary.to_vec()));
    }
    let l = boundary.len();
    let target_singletons: Vec<usize> = if opts.singleton_boundaries {
        boundary
            .iter()
            .map(|s| {
                if s.len() == 1 {
                    Ok(s.first().unwrap())
                } else {
                    Err(Error::contract(
                        "singleton boundary mode requires singleton sets",
                    ))
                }
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    // Types of the target at every round level, cheap levels first for
    // filtering.
    let mut target: Vec<TypeId> = Vec::new();
    for level in 1..=rounds.max(1) {
        target.push(mso_type(g, boundary, &[], level, &mut engine.table, caps)?);
    }

    let cap = opts.size_cap.min(ENUM_SIZE_LIMIT);
    for m in 1..=cap {
        let count = engine.canonical_graphs(m).len();
        for gi in 0..count {
            let h = engine.canonical_graphs(m)[gi].clone();
            if opts.require_acyclic && !h.is_acyclic() {
                continue;
            }
            if let Some(k) = opts.max_rank_width {
                if !is_rank_width_at_most(&h, k, caps)? {
                    continue;
                }
            }
            let comps = h.connected_components();
            let assignments = boundary_assignments(&h, l, opts, &target_singletons, g);
            'assign: for assign in assignments {
                if opts.component_anchored {
                    let mut anchor = crate::bits::BitSet::new();
                    for s in &assign {
                        anchor.union_with(s);
                    }
                    let ok = if anchor.is_empty() {
                        comps.len() <= 1
                    } else {
                        comps.iter().all(|c| c.intersects(&anchor))
                    };
                    if !ok {
                        continue 'assign;
                    }
                }
                for (level, want) in target.iter().enumerate() {
                    let got = engine.candidate_type(m, gi, &h, &assign, level + 1, caps)?;
                    if got != *want {
                        continue 'assign;
                    }
                }
                return Ok((h, assign));
            }
        }
    }
    Err(Error::RepSearchExhausted {
        cap: opts.size_cap,
        context: format!("target has {} vertices, {} boundary sets, {} rounds", g.n(), l, rounds),
    })
}

/// All boundary interpretations for a candidate, ascending and
/// deterministic: subset tuples in general, distinct vertex tuples with
/// matching mutual adjacency in singleton mode.
fn boundary_assignments(
    h: &Graph,
    l: usize,
    opts: &RepOptions,
    target_singletons: &[usize],
    g: &Graph,
) -> Vec<Vec<VertexSet>> {
    let m = h.n();
    let mut out = Vec::new();
    if opts.singleton_boundaries {
        let mut idx = vec![0usize; l];
        loop {
            let distinct = (0..l).all(|i| (0..i).all(|j| idx[i] != idx[j]));
            if distinct {
                let adj_ok = (0..l).all(|i| {
                    (0..i).all(|j| {
                        h.has_edge(idx[i], idx[j])
                            == g.has_edge(target_singletons[i], target_singletons[j])
                    })
                });
                if adj_ok {
                    out.push(idx.iter().map(|&v| BitSet::from_iter([v])).collect());
                }
            }
            // Increment the mixed-radix counter.
            let mut i = l;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < m {
                    break;
                }
                idx[i] = 0;
            }
            if l == 0 {
                return out;
            }
        }
    } else {
        let top = 1u64 << m;
        let mut masks = vec![0u64; l];
        loop {
            out.push(masks.iter().map(|&x| BitSet::from_mask(x)).collect());
            let mut i = l;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                masks[i] += 1;
                if masks[i] < top {
                    break;
                }
                masks[i] = 0;
            }
            if l == 0 {
                return out;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{edgeless, path};
    use crate::mso::eval::Structure;
    use crate::mso::types::{game_equivalent_with, GameConfig};

    fn certify(engine: &mut RepEngine, g: &Graph, boundary: &[VertexSet], rounds: usize, h: &Graph, hb: &[VertexSet]) {
        let caps = Caps::default();
        let cfg = GameConfig {
            left: Structure::with_sets(g.clone(), boundary.to_vec()),
            right: Structure::with_sets(h.clone(), hb.to_vec()),
            rounds,
        };
        assert!(game_equivalent_with(&cfg, &mut engine.table, &caps).unwrap());
    }

    #[test]
    fn identity_fallback() {
        let mut engine = RepEngine::new();
        let g = path(4);
        let b = vec![BitSet::from_iter([0])];
        let (h, hb) =
            find_representative(&mut engine, &g, &b, 2, &RepOptions::sets(6), &Caps::default())
                .unwrap();
        assert_eq!(h, g);
        assert_eq!(hb, b);
    }

    #[test]
    fn p6_with_one_endpoint_marked_shrinks_at_rank_one() {
        let mut engine = RepEngine::new();
        let g = path(6);
        let b = vec![BitSet::from_iter([0])];
        let (h, hb) =
            find_representative(&mut engine, &g, &b, 1, &RepOptions::sets(3), &Caps::default())
                .unwrap();
        assert!(h.n() <= 3);
        certify(&mut engine, &g, &b, 1, &h, &hb);
    }

    #[test]
    fn edgeless_five_shrinks_to_at_most_two() {
        let mut engine = RepEngine::new();
        let g = edgeless(5);
        let (h, hb) =
            find_representative(&mut engine, &g, &[], 1, &RepOptions::sets(2), &Caps::default())
                .unwrap();
        assert!(h.n() <= 2);
        assert!(hb.is_empty());
        certify(&mut engine, &g, &[], 1, &h, &hb);
    }

    #[test]
    fn exhausted_search_is_an_error() {
        let mut engine = RepEngine::new();
        // A 7-cycle is not 2-equivalent to anything on one vertex.
        let g = crate::graph::cycle(7);
        let r = find_representative(&mut engine, &g, &[], 2, &RepOptions::sets(1), &Caps::default());
        assert!(matches!(r, Err(Error::RepSearchExhausted { .. })));
    }

    #[test]
    fn long_path_with_two_marked_ends_shrinks_with_singletons() {
        let mut engine = RepEngine::new();
        let g = path(8);
        let b = vec![BitSet::from_iter([0]), BitSet::from_iter([7])];
        let opts = RepOptions {
            require_acyclic: true,
            ..RepOptions::singletons(6)
        };
        let (h, hb) = find_representative(&mut engine, &g, &b, 2, &opts, &Caps::default()).unwrap();
        assert!(h.n() <= 6);
        assert!(h.is_acyclic());
        assert_eq!(hb.len(), 2);
        assert_eq!(hb[0].len(), 1);
        certify(&mut engine, &g, &b, 2, &h, &hb);
    }

    #[test]
    fn canonical_enumeration_counts() {
        let mut engine = RepEngine::new();
        // Numbers of graphs up to isomorphism on 1..=5 vertices.
        for (m, want) in [(1usize, 1usize), (2, 2), (3, 4), (4, 11), (5, 34)] {
            assert_eq!(engine.canonical_graphs(m).len(), want);
        }
    }
}
