//! Approximation algorithms for well-structured modulators: a 3-approximation
//! to forests and an r-approximation to any class given by forbidden induced
//! subgraphs of order at most r, via a reduction to hitting set over the
//! maximal-class partition.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::bits::BitSet;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::par;
use crate::rankwidth::is_rank_width_at_most;
use crate::splitmod::{is_split_module, sim_c_classes, SplitModule};

/// A finite list of forbidden induced subgraphs.
#[derive(Debug, Clone)]
pub struct ObstructionSet {
    pub graphs: Vec<Graph>,
}

impl ObstructionSet {
    pub fn new(graphs: Vec<Graph>) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::contract("obstruction set must be non-empty"));
        }
        if graphs.iter().any(|g| g.n() == 0) {
            return Err(Error::contract("obstruction graphs must be non-empty"));
        }
        Ok(ObstructionSet { graphs })
    }

    /// Maximum order r among the members.
    pub fn max_order(&self) -> usize {
        self.graphs.iter().map(|g| g.n()).max().unwrap_or(0)
    }
}

/// Target graph class of a modulator.
#[derive(Debug, Clone)]
pub enum ClassDescriptor {
    Forest,
    Edgeless,
    Empty,
    Obstructions(ObstructionSet),
}

impl ClassDescriptor {
    pub fn contains(&self, g: &Graph) -> bool {
        match self {
            ClassDescriptor::Forest => g.is_acyclic(),
            ClassDescriptor::Edgeless => g.is_edgeless(),
            ClassDescriptor::Empty => g.n() == 0,
            ClassDescriptor::Obstructions(obs) => enumerate_obstructions(g, obs).is_empty(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClassDescriptor::Forest => "forest",
            ClassDescriptor::Edgeless => "edgeless",
            ClassDescriptor::Empty => "empty",
            ClassDescriptor::Obstructions(_) => "obstructions",
        }
    }
}

/// A set of pairwise-disjoint split-modules, each of rank-width at most `c`,
/// whose removal lands the graph in `target`.
#[derive(Debug, Clone)]
pub struct WsModulator {
    pub modules: Vec<SplitModule>,
    pub c: usize,
    pub target: ClassDescriptor,
}

impl WsModulator {
    pub fn union(&self) -> VertexSet {
        let mut u = BitSet::new();
        for m in &self.modules {
            u.union_with(&m.vertices);
        }
        u
    }

    pub fn k(&self) -> usize {
        self.modules.len()
    }
}

/// All three conditions of a well-structured modulator, plus target-class
/// membership of the remainder.
pub fn verify_wsm(g: &Graph, x: &WsModulator) -> Result<bool> {
    let caps = Caps::default();
    let mut seen = BitSet::new();
    for m in &x.modules {
        if m.vertices.intersects(&seen) {
            return Ok(false);
        }
        seen.union_with(&m.vertices);
        if !is_split_module(g, &m.vertices) {
            return Ok(false);
        }
        let (sub, _) = g.induced_subgraph(&m.vertices)?;
        if !is_rank_width_at_most(&sub, x.c, &caps)? {
            return Ok(false);
        }
    }
    let (rest, _) = g.remove_vertices(&seen)?;
    Ok(x.target.contains(&rest))
}

// --- feedback vertex set, local-ratio style ---------------------------------

/// 2-approximate feedback vertex set: iterated degree-1 pruning, weight
/// reduction along semidisjoint cycles or degree-proportional everywhere
/// else, followed by a reverse minimality filter. Weights are exact
/// rationals.
pub fn fvs_2approx(g: &Graph) -> VertexSet {
    let n = g.n();
    let mut alive = BitSet::all(n);
    let mut weight: Vec<BigRational> = (0..n).map(|_| BigRational::one()).collect();
    let mut picked: Vec<usize> = Vec::new();

    let degree = |alive: &BitSet, v: usize| g.neighbors(v).intersection(alive).len();
    let prune = |alive: &mut BitSet| loop {
        let low: Vec<usize> = alive
            .iter()
            .filter(|&v| g.neighbors(v).intersection(alive).len() <= 1)
            .collect();
        if low.is_empty() {
            break;
        }
        for v in low {
            alive.remove(v);
        }
    };

    loop {
        prune(&mut alive);
        if alive.is_empty() {
            break;
        }
        if let Some(cycle) = semidisjoint_cycle(g, &alive) {
            let gamma = cycle
                .iter()
                .map(|v| weight[v].clone())
                .min()
                .expect("non-empty cycle");
            for v in cycle.iter() {
                weight[v] -= &gamma;
            }
        } else {
            let gamma = alive
                .iter()
                .map(|v| &weight[v] / BigRational::from(BigInt::from(degree(&alive, v) as i64 - 1)))
                .min()
                .expect("non-empty graph");
            for v in alive.iter() {
                let d = degree(&alive, v) as i64 - 1;
                weight[v] -= &gamma * BigRational::from(BigInt::from(d));
            }
        }
        let zeroed: Vec<usize> = alive
            .iter()
            .filter(|&v| weight[v].is_zero() || weight[v].is_negative())
            .collect();
        debug_assert!(!zeroed.is_empty());
        for v in zeroed {
            alive.remove(v);
            picked.push(v);
        }
    }

    // Reverse minimality filter: the approximation guarantee needs the final
    // solution minimal.
    let mut fvs: BitSet = picked.iter().copied().collect();
    for &v in picked.iter().rev() {
        let mut without = fvs.clone();
        without.remove(v);
        let (rest, _) = g.remove_vertices(&without).expect("in range");
        if rest.is_acyclic() {
            fvs = without;
        }
    }
    fvs
}

/// A cycle in `G[alive]` all of whose vertices have degree 2 in `G[alive]`,
/// except possibly one. Assumes degree-1 vertices have been pruned.
fn semidisjoint_cycle(g: &Graph, alive: &BitSet) -> Option<VertexSet> {
    let deg = |v: usize| g.neighbors(v).intersection(alive).len();
    let mut visited = BitSet::new();
    for s in alive.iter().filter(|&v| deg(v) == 2) {
        if visited.contains(s) {
            continue;
        }
        // Walk the maximal degree-2 chain through s.
        let mut chain = vec![s];
        visited.insert(s);
        let mut anchors = Vec::new();
        let nbrs: Vec<usize> = g.neighbors(s).intersection(alive).iter().collect();
        let mut closed = false;
        for &start in &nbrs {
            let mut prev = s;
            let mut cur = start;
            loop {
                if cur == s {
                    closed = true; // pure cycle component
                    break;
                }
                if deg(cur) != 2 {
                    anchors.push(cur);
                    break;
                }
                visited.insert(cur);
                chain.push(cur);
                let next = g
                    .neighbors(cur)
                    .intersection(alive)
                    .iter()
                    .find(|&w| w != prev)
                    .expect("degree 2");
                prev = cur;
                cur = next;
            }
            if closed {
                break;
            }
        }
        if closed {
            return Some(chain.into_iter().collect());
        }
        if anchors.len() == 2 && anchors[0] == anchors[1] {
            let mut cycle: BitSet = chain.into_iter().collect();
            cycle.insert(anchors[0]);
            return Some(cycle);
        }
    }
    None
}

// --- forest modulator --------------------------------------------------------

/// 3-approximation of the smallest well-structured modulator to forests:
/// compute the maximal-class partition, delete every union of up to three
/// classes that induces a cycle (to fixpoint, deterministic order), then
/// cover a 2-approximate feedback vertex set of the remainder by its
/// classes.
pub fn wsm_forest_3approx(g: &Graph, c: usize, caps: &Caps) -> Result<WsModulator> {
    let part = sim_c_classes(g, c, caps)?;
    let classes = part.classes;
    let (mut selected, remaining) = forest_step2_fixpoint(g, &classes)?;

    // Step III: 2-approximate a feedback vertex set of what is left and add
    // every class it touches.
    let alive: BitSet = remaining
        .iter()
        .flat_map(|&i| classes[i].iter())
        .collect();
    let (rest, map) = g.induced_subgraph(&alive)?;
    let s = map.preimage(&fvs_2approx(&rest));
    for &i in &remaining {
        if classes[i].intersects(&s) {
            selected.push(i);
        }
    }

    selected.sort_unstable();
    selected.dedup();
    let modules = selected
        .into_iter()
        .map(|i| SplitModule::of(g, classes[i].clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(WsModulator {
        modules,
        c,
        target: ClassDescriptor::Forest,
    })
}

/// The cycle-elimination fixpoint over class unions: scan subsets of up to
/// three remaining classes in sorted order; whenever a union induces a
/// cycle, move all of its classes into the modulator and restart. Returns
/// (selected, remaining) class indices.
pub fn forest_step2_fixpoint(g: &Graph, classes: &[VertexSet]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut remaining: Vec<usize> = (0..classes.len()).collect();
    let mut selected: Vec<usize> = Vec::new();
    'fixpoint: loop {
        for size in 1..=3usize.min(remaining.len()) {
            let mut combo = vec![0usize; size];
            if next_combination_init(&mut combo, remaining.len()) {
                loop {
                    let union: BitSet = combo
                        .iter()
                        .flat_map(|&i| classes[remaining[i]].iter())
                        .collect();
                    let (sub, _) = g.induced_subgraph(&union)?;
                    if !sub.is_acyclic() {
                        let chosen: Vec<usize> = combo.iter().map(|&i| remaining[i]).collect();
                        selected.extend(chosen.iter().copied());
                        remaining.retain(|i| !chosen.contains(i));
                        continue 'fixpoint;
                    }
                    if !next_combination(&mut combo, remaining.len()) {
                        break;
                    }
                }
            }
        }
        break;
    }
    Ok((selected, remaining))
}

fn next_combination_init(combo: &mut [usize], n: usize) -> bool {
    if combo.len() > n {
        return false;
    }
    for (i, c) in combo.iter_mut().enumerate() {
        *c = i;
    }
    true
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        if combo[i] < n - (k - i) {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
}

// --- obstruction machinery ---------------------------------------------------

/// Every vertex set of `g` inducing a graph isomorphic to a member of
/// `obs`, each set listed once, sorted.
pub fn enumerate_obstructions(g: &Graph, obs: &ObstructionSet) -> Vec<VertexSet> {
    let mut found: std::collections::HashSet<VertexSet> = Default::default();
    for pat in &obs.graphs {
        let k = pat.n();
        if k > g.n() {
            continue;
        }
        let mut combos: Vec<Vec<usize>> = Vec::new();
        let mut combo = vec![0usize; k];
        if next_combination_init(&mut combo, g.n()) {
            loop {
                combos.push(combo.clone());
                if !next_combination(&mut combo, g.n()) {
                    break;
                }
            }
        }
        let hits = par::filter_map_slice(&combos, |c| {
            let set: BitSet = c.iter().copied().collect();
            let (sub, _) = g.induced_subgraph(&set).ok()?;
            isomorphic(&sub, pat).then_some(set)
        });
        found.extend(hits);
    }
    let mut out: Vec<VertexSet> = found.into_iter().collect();
    out.sort();
    out
}

/// Graph isomorphism by degree-filtered backtracking; desk scale.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    let n = a.n();
    if n != b.n() || a.edge_count() != b.edge_count() {
        return false;
    }
    let mut da: Vec<usize> = (0..n).map(|v| a.degree(v)).collect();
    let mut db: Vec<usize> = (0..n).map(|v| b.degree(v)).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }
    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];
    backtrack_iso(a, b, 0, &mut mapping, &mut used)
}

fn backtrack_iso(a: &Graph, b: &Graph, v: usize, mapping: &mut [usize], used: &mut [bool]) -> bool {
    let n = a.n();
    if v == n {
        return true;
    }
    for w in 0..n {
        if used[w] || a.degree(v) != b.degree(w) {
            continue;
        }
        let ok = (0..v).all(|u| a.has_edge(u, v) == b.has_edge(mapping[u], w));
        if ok {
            mapping[v] = w;
            used[w] = true;
            if backtrack_iso(a, b, v + 1, mapping, used) {
                return true;
            }
            used[w] = false;
            mapping[v] = usize::MAX;
        }
    }
    false
}

/// A hitting-set instance over the maximal-class partition: one set per
/// obstruction occurrence, holding the classes it intersects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingInstance {
    pub ground: Vec<VertexSet>,
    pub sets: Vec<Vec<usize>>,
    /// Maximum obstruction order r (sets have at most r members).
    pub r: usize,
}

/// Build the unique hitting-set instance for `g` against `obs`: ground
/// elements are the classes of the maximal-class partition, and every
/// obstruction occurrence contributes the set of classes it meets
/// (duplicates collapsed).
pub fn build_hitting_instance(
    g: &Graph,
    c: usize,
    obs: &ObstructionSet,
    caps: &Caps,
) -> Result<HittingInstance> {
    let part = sim_c_classes(g, c, caps)?;
    let occurrences = enumerate_obstructions(g, obs);
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut seen: std::collections::HashSet<Vec<usize>> = Default::default();
    for occ in occurrences {
        let mut touched: Vec<usize> = part
            .classes
            .iter()
            .enumerate()
            .filter(|(_, cl)| cl.intersects(&occ))
            .map(|(i, _)| i)
            .collect();
        touched.sort_unstable();
        touched.dedup();
        debug_assert!(!touched.is_empty());
        if seen.insert(touched.clone()) {
            sets.push(touched);
        }
    }
    sets.sort();
    Ok(HittingInstance {
        ground: part.classes,
        sets,
        r: obs.max_order(),
    })
}

/// Greedy r-approximation: while some set is unhit, take all of its
/// elements.
pub fn greedy_hitting_set(w: &HittingInstance) -> Vec<usize> {
    let mut hit: std::collections::HashSet<usize> = Default::default();
    for set in &w.sets {
        if !set.iter().any(|e| hit.contains(e)) {
            hit.extend(set.iter().copied());
        }
    }
    let mut out: Vec<usize> = hit.into_iter().collect();
    out.sort_unstable();
    out
}

/// r-approximation of the smallest well-structured modulator to the class
/// forbidding `obs`: greedy hitting set over the per-occurrence class sets.
pub fn wsm_obstruction_approx(
    g: &Graph,
    c: usize,
    obs: &ObstructionSet,
    caps: &Caps,
) -> Result<WsModulator> {
    let w = build_hitting_instance(g, c, obs, caps)?;
    let chosen = greedy_hitting_set(&w);
    let modules = chosen
        .into_iter()
        .map(|i| SplitModule::of(g, w.ground[i].clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(WsModulator {
        modules,
        c,
        target: ClassDescriptor::Obstructions(obs.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, disjoint_union, edgeless, path, star};

    #[test]
    fn fvs_trivial_cases() {
        assert!(fvs_2approx(&path(6)).is_empty());
        assert!(fvs_2approx(&edgeless(4)).is_empty());
        let s = fvs_2approx(&cycle(5));
        assert!(s.len() <= 2 && !s.is_empty());
        let (rest, _) = cycle(5).remove_vertices(&s).unwrap();
        assert!(rest.is_acyclic());
    }

    #[test]
    fn fvs_output_is_always_a_feedback_vertex_set() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..60 {
            let n = rng.gen_range(2..=12);
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.3) {
                        g.add_edge(u, v);
                    }
                }
            }
            let s = fvs_2approx(&g);
            let (rest, _) = g.remove_vertices(&s).unwrap();
            assert!(rest.is_acyclic(), "{g:?} fvs={:?}", s.to_vec());
        }
    }

    #[test]
    fn obstruction_enumeration_examples() {
        let k2 = ObstructionSet::new(vec![complete(2)]).unwrap();
        assert!(enumerate_obstructions(&edgeless(5), &k2).is_empty());
        let k3 = ObstructionSet::new(vec![complete(3)]).unwrap();
        let occ = enumerate_obstructions(&complete(3), &k3);
        assert_eq!(occ, vec![BitSet::all(3)]);
        // P4 contains exactly two induced P3s.
        let p3 = ObstructionSet::new(vec![path(3)]).unwrap();
        let occ = enumerate_obstructions(&path(4), &p3);
        assert_eq!(
            occ,
            vec![BitSet::from_iter([0, 1, 2]), BitSet::from_iter([1, 2, 3])]
        );
    }

    #[test]
    fn isomorphism_checks() {
        assert!(isomorphic(&path(3), &{
            let mut g = Graph::new(3);
            g.add_edge(2, 1);
            g.add_edge(1, 0);
            g
        }));
        assert!(!isomorphic(&path(4), &star(3)));
        assert!(!isomorphic(&cycle(6), &disjoint_union(&complete(3), &complete(3))));
    }

    #[test]
    fn greedy_hitting_examples() {
        let w = HittingInstance {
            ground: vec![BitSet::new(); 3],
            sets: vec![],
            r: 2,
        };
        assert!(greedy_hitting_set(&w).is_empty());
        let w = HittingInstance {
            ground: vec![BitSet::new(); 3],
            sets: vec![vec![0, 1], vec![1, 2]],
            r: 2,
        };
        // First unhit set {0,1} absorbed whole; {1,2} is then hit by 1.
        assert_eq!(greedy_hitting_set(&w), vec![0, 1]);
        // Disjoint sets: everything is taken, ratio r exactly.
        let w = HittingInstance {
            ground: vec![BitSet::new(); 4],
            sets: vec![vec![0, 1], vec![2, 3]],
            r: 2,
        };
        assert_eq!(greedy_hitting_set(&w), vec![0, 1, 2, 3]);
    }

    #[test]
    fn forest_modulator_on_acyclic_input_is_empty() {
        let x = wsm_forest_3approx(&path(6), 1, &Caps::default()).unwrap();
        assert!(x.modules.is_empty());
        assert!(verify_wsm(&path(6), &x).unwrap());
    }

    #[test]
    fn verify_rejects_overlap_and_high_rank() {
        let g = cycle(6);
        let m0 = SplitModule::of(&g, BitSet::from_iter([0])).unwrap();
        let bad = WsModulator {
            modules: vec![m0.clone(), m0.clone()],
            c: 1,
            target: ClassDescriptor::Forest,
        };
        assert!(!verify_wsm(&g, &bad).unwrap());
        // A module of rank-width 2 fails at c = 1.
        let whole = SplitModule::of(&g, g.vertex_set()).unwrap();
        let bad = WsModulator {
            modules: vec![whole],
            c: 1,
            target: ClassDescriptor::Forest,
        };
        assert!(!verify_wsm(&g, &bad).unwrap());
    }
}
