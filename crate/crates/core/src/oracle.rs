//! Brute-force ground truth. Everything here enumerates exhaustively, in
//! increasing solution size where applicable, so results double as
//! minimality certificates. These are correctness instruments, not meant to
//! be fast; callers stay within the documented desk-scale bounds.

use crate::bits::BitSet;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::mso::eval::{evaluate_naive, Structure};
use crate::mso::MsoFormula;
use crate::rankwidth::{cut_rank, is_rank_width_at_most};
use crate::splitmod::is_split_module;
use crate::wsm::{enumerate_obstructions, ClassDescriptor, HittingInstance};

/// Minimum feedback vertex set size by subset enumeration.
pub fn exact_fvs(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > 18 {
        return Err(Error::capacity("exact_fvs: n > 18"));
    }
    for k in 0..=n {
        if any_combination(n, k, |set| {
            let (rest, _) = g.remove_vertices(set).expect("in range");
            rest.is_acyclic()
        }) {
            return Ok(k);
        }
    }
    unreachable!("deleting everything is always acyclic")
}

/// Minimum hitting set size by subset enumeration over the ground set.
pub fn exact_hitting_set(w: &HittingInstance) -> Result<usize> {
    let n = w.ground.len();
    if n > 20 {
        return Err(Error::capacity("exact_hitting_set: ground > 20"));
    }
    for k in 0..=n {
        if any_combination(n, k, |set| {
            w.sets.iter().all(|s| s.iter().any(|&e| set.contains(e)))
        }) {
            return Ok(k);
        }
    }
    unreachable!("the full ground set hits everything")
}

/// All split-modules of `g`, by testing every subset against the
/// definition. Includes the empty set, all singletons and all full
/// components.
pub fn brute_split_modules(g: &Graph) -> Result<Vec<VertexSet>> {
    let n = g.n();
    if n > 16 {
        return Err(Error::capacity("brute_split_modules: n > 16"));
    }
    let mut out = Vec::new();
    for mask in 0u64..(1 << n) {
        let set = BitSet::from_mask(mask);
        if is_split_module(g, &set) {
            out.push(set);
        }
    }
    Ok(out)
}

/// The maximal-split-module partition computed straight from the brute
/// enumeration: for every vertex, the inclusion-maximal split-module of
/// rank-width at most `c` containing it. Errors if the maximal witnesses do
/// not form a partition (which the theory rules out above the c+2
/// threshold).
pub fn brute_sim_c_partition(g: &Graph, c: usize, caps: &Caps) -> Result<Vec<VertexSet>> {
    let mods = brute_split_modules(g)?;
    let mut small: Vec<VertexSet> = Vec::new();
    for m in mods {
        if m.is_empty() {
            continue;
        }
        let (sub, _) = g.induced_subgraph(&m)?;
        if is_rank_width_at_most(&sub, c, caps)? {
            small.push(m);
        }
    }
    let mut classes: Vec<VertexSet> = Vec::new();
    for v in 0..g.n() {
        let best = small
            .iter()
            .filter(|m| m.contains(v))
            .max_by_key(|m| m.len())
            .cloned()
            .ok_or_else(|| Error::invariant(format!("no split-module contains {v}")))?;
        let strictly_bigger = small.iter().any(|m| m.contains(v) && m.len() > best.len());
        debug_assert!(!strictly_bigger);
        if !classes.contains(&best) {
            // The maximal witness must be unique per vertex and the
            // witnesses must tile the vertex set.
            if classes.iter().any(|cl| cl.intersects(&best)) {
                return Err(Error::invariant(
                    "maximal split-modules do not form a partition",
                ));
            }
            classes.push(best);
        }
    }
    classes.sort_by_key(|cl| cl.first());
    Ok(classes)
}

/// Minimum k such that some family of k pairwise-disjoint split-modules of
/// rank-width at most `c` is a modulator to `target`. Iterative deepening
/// with violation-driven branching over the brute split-module list.
pub fn exact_wsn(g: &Graph, c: usize, target: &ClassDescriptor, caps: &Caps) -> Result<usize> {
    if g.n() > 14 {
        return Err(Error::capacity("exact_wsn: n > 14"));
    }
    let mut candidates: Vec<VertexSet> = Vec::new();
    for m in brute_split_modules(g)? {
        if m.is_empty() {
            continue;
        }
        let (sub, _) = g.induced_subgraph(&m)?;
        if is_rank_width_at_most(&sub, c, caps)? {
            candidates.push(m);
        }
    }
    // Precompute obstruction occurrences once; a violation inside any
    // remainder is an occurrence whose vertices all survive.
    let occurrences = match target {
        ClassDescriptor::Obstructions(obs) => Some(enumerate_obstructions(g, obs)),
        _ => None,
    };
    let mut failed_at: rustc_hash::FxHashMap<VertexSet, usize> = Default::default();
    for k in 0..=g.n() {
        if wsn_search(
            g,
            target,
            &candidates,
            occurrences.as_deref(),
            &BitSet::new(),
            k,
            &mut failed_at,
        ) {
            return Ok(k);
        }
    }
    unreachable!("singleton modules always reach the empty graph")
}

fn wsn_search(
    g: &Graph,
    target: &ClassDescriptor,
    candidates: &[VertexSet],
    occurrences: Option<&[VertexSet]>,
    used: &VertexSet,
    k: usize,
    failed_at: &mut rustc_hash::FxHashMap<VertexSet, usize>,
) -> bool {
    let alive = used.complement(g.n());
    let violation = first_violation(g, target, occurrences, &alive);
    let viol = match violation {
        None => return true,
        Some(v) => v,
    };
    if k == 0 {
        return false;
    }
    // A deleted-vertex set that failed with at least this budget fails now.
    if failed_at.get(used).is_some_and(|&b| b >= k) {
        return false;
    }
    for cand in candidates {
        if cand.intersects(used) || !cand.intersects(&viol) {
            continue;
        }
        let mut used2 = used.clone();
        used2.union_with(cand);
        if wsn_search(g, target, candidates, occurrences, &used2, k - 1, failed_at) {
            return true;
        }
    }
    let entry = failed_at.entry(used.clone()).or_insert(0);
    *entry = (*entry).max(k);
    false
}

/// Some witness that `G[alive]` is not in the class: a cycle, an edge, a
/// vertex, or an obstruction occurrence.
fn first_violation(
    g: &Graph,
    target: &ClassDescriptor,
    occurrences: Option<&[VertexSet]>,
    alive: &VertexSet,
) -> Option<VertexSet> {
    match target {
        ClassDescriptor::Empty => alive.first().map(|v| BitSet::from_iter([v])),
        ClassDescriptor::Edgeless => {
            for u in alive.iter() {
                if let Some(v) = g.neighbors(u).intersection(alive).first() {
                    return Some(BitSet::from_iter([u, v]));
                }
            }
            None
        }
        ClassDescriptor::Forest => find_cycle(g, alive),
        ClassDescriptor::Obstructions(_) => occurrences
            .expect("precomputed")
            .iter()
            .find(|occ| occ.is_subset_of(alive))
            .cloned(),
    }
}

/// Vertex set of some cycle of `G[alive]`, by DFS back-edge detection.
fn find_cycle(g: &Graph, alive: &VertexSet) -> Option<VertexSet> {
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut state = vec![0u8; n]; // 0 unseen, 1 on stack path, 2 done
    for root in alive.iter() {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, usize::MAX)];
        while let Some(&(v, from)) = stack.last() {
            if state[v] == 0 {
                state[v] = 1;
                parent[v] = from;
                for w in g.neighbors(v).intersection(alive).iter() {
                    if w == from {
                        continue;
                    }
                    if state[w] == 1 {
                        // Cycle: w .. v along parents.
                        let mut cyc = BitSet::from_iter([w]);
                        let mut x = v;
                        while x != w {
                            cyc.insert(x);
                            x = parent[x];
                        }
                        return Some(cyc);
                    }
                    if state[w] == 0 {
                        stack.push((w, v));
                    }
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptDirection {
    /// Smallest satisfying set (the <= problems).
    Min,
    /// Largest satisfying set (the >= problems).
    Max,
}

/// Optimum |S| with G |= phi(S), by subset enumeration with the expansion
/// evaluator; `None` when no set satisfies phi.
pub fn exact_opt_mso(
    g: &Graph,
    phi: &MsoFormula,
    direction: OptDirection,
) -> Result<Option<usize>> {
    let n = g.n();
    if n > 16 {
        return Err(Error::capacity("exact_opt_mso: n > 16"));
    }
    if phi.free_set_vars.len() != 1 || !phi.free_point_vars.is_empty() {
        return Err(Error::contract(
            "exact_opt_mso expects exactly one free set variable",
        ));
    }
    let sizes: Vec<usize> = match direction {
        OptDirection::Min => (0..=n).collect(),
        OptDirection::Max => (0..=n).rev().collect(),
    };
    for k in sizes {
        let mut hit = false;
        let found = any_combination(n, k, |set| {
            let s = Structure::with_sets(g.clone(), vec![set.clone()]);
            match evaluate_naive(&s, phi, crate::mso::NAIVE_BUDGET) {
                Ok(b) => b,
                Err(_) => {
                    hit = true;
                    false
                }
            }
        });
        if hit {
            return Err(Error::capacity("exact_opt_mso: evaluation budget exhausted"));
        }
        if found {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Exact rank-width by exhaustive enumeration of all unrooted binary trees
/// with the vertices as leaves. The independent check for the subset DP.
pub fn rank_width_brute(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > 8 {
        return Err(Error::capacity("rank_width_brute: n > 8"));
    }
    if n <= 1 {
        return Ok(0);
    }
    // Tree nodes 0..n are the leaves (leaf i carries vertex i); internal
    // nodes are appended from n upward. Each tree on k leaves is extended by
    // hanging leaf k off a subdivision of every existing edge.
    let mut best = usize::MAX;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    adj[0].push(1);
    adj[1].push(0);
    enumerate_trees(g, &mut adj, 2, &mut best);
    Ok(best)
}

fn enumerate_trees(g: &Graph, adj: &mut Vec<Vec<usize>>, next_leaf: usize, best: &mut usize) {
    let n = g.n();
    if next_leaf == n {
        *best = (*best).min(tree_width(g, adj));
        return;
    }
    let edges: Vec<(usize, usize)> = adj
        .iter()
        .enumerate()
        .flat_map(|(a, nb)| nb.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| a < b)
        .collect();
    for (a, b) in edges {
        // Subdivide (a, b) with x and hang the new leaf off x.
        let x = adj.len();
        adj[a].retain(|&y| y != b);
        adj[b].retain(|&y| y != a);
        adj.push(vec![a, b, next_leaf]);
        adj[next_leaf].push(x);
        adj[a].push(x);
        adj[b].push(x);

        enumerate_trees(g, adj, next_leaf + 1, best);

        adj[a].retain(|&y| y != x);
        adj[b].retain(|&y| y != x);
        adj[next_leaf].clear();
        adj.pop();
        adj[a].push(b);
        adj[b].push(a);
    }
}

fn tree_width(g: &Graph, adj: &[Vec<usize>]) -> usize {
    let n = g.n();
    let mut width = 0;
    for a in 0..adj.len() {
        for &b in &adj[a] {
            if a > b {
                continue;
            }
            // Leaves on a's side of edge (a, b); tree nodes < n are leaves.
            let mut side = BitSet::new();
            let mut stack = vec![a];
            let mut seen = vec![false; adj.len()];
            seen[a] = true;
            seen[b] = true;
            while let Some(x) = stack.pop() {
                if x < n {
                    side.insert(x);
                }
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            width = width.max(cut_rank(g, &side));
        }
    }
    width
}

/// Run `pred` over all size-k subsets of 0..n until one satisfies it.
fn any_combination<F: FnMut(&VertexSet) -> bool>(n: usize, k: usize, mut pred: F) -> bool {
    fn rec<F: FnMut(&VertexSet) -> bool>(
        n: usize,
        k: usize,
        start: usize,
        cur: &mut VertexSet,
        pred: &mut F,
    ) -> bool {
        if k == 0 {
            return pred(cur);
        }
        for v in start..=n.saturating_sub(k) {
            cur.insert(v);
            if rec(n, k - 1, v + 1, cur, pred) {
                return true;
            }
            cur.remove(v);
        }
        false
    }
    let mut cur = BitSet::new();
    rec(n, k, 0, &mut cur, &mut pred)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, disjoint_union, path};
    use crate::mso::parse_formula;
    use crate::rankwidth::{rank_width_exact, RankWidth};
    use crate::wsm::ObstructionSet;

    #[test]
    fn exact_fvs_examples() {
        assert_eq!(exact_fvs(&path(6)).unwrap(), 0);
        assert_eq!(exact_fvs(&cycle(5)).unwrap(), 1);
        let two = disjoint_union(&cycle(3), &cycle(4));
        assert_eq!(exact_fvs(&two).unwrap(), 2);
    }

    #[test]
    fn exact_hitting_examples() {
        let mk = |sets: Vec<Vec<usize>>, n: usize| HittingInstance {
            ground: vec![BitSet::new(); n],
            sets,
            r: 2,
        };
        assert_eq!(exact_hitting_set(&mk(vec![], 3)).unwrap(), 0);
        assert_eq!(exact_hitting_set(&mk(vec![vec![0, 1], vec![1, 2]], 3)).unwrap(), 1);
        assert_eq!(
            exact_hitting_set(&mk(vec![vec![0, 1], vec![2, 3], vec![4, 5]], 6)).unwrap(),
            3
        );
    }

    #[test]
    fn brute_split_modules_examples() {
        let p4 = path(4);
        let mods = brute_split_modules(&p4).unwrap();
        // Empty set, full set, singletons, co-singletons, {0,1}, {2,3}.
        assert_eq!(mods.len(), 12);
        for m in &mods {
            assert!(is_split_module(&p4, m));
        }
        assert!(mods.contains(&BitSet::new()));
        assert!(mods.contains(&BitSet::all(4)));
        // The split tree realizes exactly the same family.
        let trees = crate::splitmod::split_decomposition(&p4).unwrap();
        let mut from_tree = trees[0].all_split_modules();
        from_tree.push(BitSet::new());
        from_tree.sort();
        from_tree.dedup();
        let mut brute = mods.clone();
        brute.sort();
        assert_eq!(from_tree, brute);
    }

    #[test]
    fn exact_wsn_examples() {
        let caps = Caps::default();
        assert_eq!(
            exact_wsn(&path(5), 1, &ClassDescriptor::Forest, &caps).unwrap(),
            0
        );
        // Any single vertex of C5 is a split-module of rank-width 0.
        assert_eq!(
            exact_wsn(&cycle(5), 1, &ClassDescriptor::Forest, &caps).unwrap(),
            1
        );
        // wsn to the empty graph on C5: co-singletons have rank-width 1, so
        // one co-singleton plus one singleton suffice.
        assert_eq!(
            exact_wsn(&cycle(5), 1, &ClassDescriptor::Empty, &caps).unwrap(),
            2
        );
        // A single co-singleton module (C5 - v = P4, rank-width 1) already
        // leaves an edgeless remainder.
        let k2 = ObstructionSet::new(vec![complete(2)]).unwrap();
        assert_eq!(
            exact_wsn(&cycle(5), 1, &ClassDescriptor::Obstructions(k2), &caps).unwrap(),
            1
        );
    }

    #[test]
    fn exact_opt_examples() {
        let vc = parse_formula("all x. all y. (E(x,y) -> (S(x) | S(y)))").unwrap();
        assert_eq!(
            exact_opt_mso(&cycle(5), &vc, OptDirection::Min).unwrap(),
            Some(3)
        );
        let ds = parse_formula("all y. (S(y) | ex x. (S(x) & E(x,y)))").unwrap();
        assert_eq!(
            exact_opt_mso(&complete(3), &ds, OptDirection::Min).unwrap(),
            Some(1)
        );
        let unsat = parse_formula("all x. (S(x) & ~S(x))").unwrap();
        assert_eq!(
            exact_opt_mso(&complete(2), &unsat, OptDirection::Min).unwrap(),
            None
        );
    }

    #[test]
    fn brute_rank_width_agrees_with_dp() {
        use rand::{Rng, SeedableRng};
        let caps = Caps::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = rng.gen_range(2..=6);
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        g.add_edge(u, v);
                    }
                }
            }
            let dp = match rank_width_exact(&g, None, &caps).unwrap() {
                RankWidth::Exact { width, .. } => width,
                _ => unreachable!(),
            };
            assert_eq!(dp, rank_width_brute(&g).unwrap(), "{g:?}");
        }
    }

    #[test]
    fn violation_cycle_finder() {
        let g = cycle(6);
        let cyc = find_cycle(&g, &g.vertex_set()).unwrap();
        assert_eq!(cyc.len(), 6);
        assert!(find_cycle(&path(5), &path(5).vertex_set()).is_none());
    }
}
