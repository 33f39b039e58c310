//! Kernelization through module replacement.
//!
//! The central step swaps every modulator module for a small graph of the
//! same q-type relative to its frontier, rewiring frontiers faithfully; the
//! resulting pair is q-similar to the original, so the whole graphs agree on
//! every sentence of quantifier rank at most q. On top of that sit the
//! model-checking kernel, the annotated optimization kernel with its win-win
//! solver, and protrusion replacement for forest remainders.

use num_bigint::BigUint;

use crate::bits::BitSet;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::mso::eval::{evaluate, Structure};
use crate::mso::rep::{find_representative, RepEngine, RepOptions};
use crate::mso::types::{game_equivalent_with, mso_type, GameConfig};
use crate::mso::MsoFormula;
use crate::rankwidth::{rank_width_exact, RankWidth};
use crate::splitmod::{sim_c_classes, SplitModule};
use crate::wsm::{
    wsm_forest_3approx, wsm_obstruction_approx, ClassDescriptor, ObstructionSet, WsModulator,
};

// --- annotations -------------------------------------------------------------

/// Weighted triples (X, Y, w): a set Z collects w exactly when X lies inside
/// Z and Y misses Z.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Annotation {
    pub triples: Vec<(VertexSet, VertexSet, BigUint)>,
}

impl Annotation {
    /// Sum of w over triples with X ⊆ z and Y ∩ z = ∅.
    pub fn value(&self, z: &VertexSet) -> BigUint {
        let mut total = BigUint::default();
        for (x, y, w) in &self.triples {
            if x.is_subset_of(z) && !y.intersects(z) {
                total += w;
            }
        }
        total
    }

    /// The annotation making plain optimization a special case: one triple
    /// ({v}, ∅, 1) per vertex, so the value of Z is |Z|.
    pub fn unit(g: &Graph) -> Annotation {
        Annotation {
            triples: g
                .vertices()
                .map(|v| (BitSet::from_iter([v]), BitSet::new(), BigUint::from(1u32)))
                .collect(),
        }
    }
}

// --- kernel output ------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ProvenanceEntry {
    /// Vertices of the replaced part in the graph it was replaced in.
    pub original: VertexSet,
    pub replacement_size: usize,
}

#[derive(Debug, Clone)]
pub struct KernelOutput {
    pub graph: Graph,
    /// The image modulator, valid on `graph`.
    pub modulator: WsModulator,
    pub annotation: Option<Annotation>,
    pub budget: Option<BigUint>,
    pub provenance: Vec<ProvenanceEntry>,
}

// --- module replacement --------------------------------------------------------

/// Replace every module of `x` with a representative of the same q-type
/// relative to its frontier, wiring adjacent frontiers completely and every
/// outside neighbor to the whole image frontier. The output pair is
/// q-similar to `(g, x)`.
pub fn replace_modules(
    g: &Graph,
    x: &WsModulator,
    rounds: usize,
    engine: &mut RepEngine,
    caps: &Caps,
) -> Result<KernelOutput> {
    let union = x.union();
    let outside = union.complement(g.n());
    let (g0, omap) = g.induced_subgraph(&outside)?;

    // Representatives, module-local.
    let mut reps: Vec<(Graph, VertexSet)> = Vec::new();
    for (i, m) in x.modules.iter().enumerate() {
        let (sub, map) = g.induced_subgraph(&m.vertices)?;
        let local_frontier = map.image(&m.frontier);
        let opts = RepOptions {
            max_rank_width: Some(x.c),
            component_anchored: true,
            ..RepOptions::sets(caps.size_cap)
        };
        let rep = find_representative(engine, &sub, &[local_frontier], rounds, &opts, caps)
            .map_err(|e| match e {
                Error::RepSearchExhausted { cap, context } => Error::RepSearchExhausted {
                    cap,
                    context: format!("module {i}: {context}"),
                },
                other => other,
            })?;
        let boundary = rep.1.into_iter().next().expect("one boundary set");
        reps.push((rep.0, boundary));
    }

    let mut offsets = Vec::with_capacity(reps.len());
    let mut total = g0.n();
    for (h, _) in &reps {
        offsets.push(total);
        total += h.n();
    }

    let mut out = Graph::new(total);
    for (u, v) in g0.edges() {
        out.add_edge(u, v);
    }
    for ((h, _), &off) in reps.iter().zip(&offsets) {
        for (u, v) in h.edges() {
            out.add_edge(off + u, off + v);
        }
    }
    // Outside vertices attach to the whole image frontier of each module
    // they touch.
    for (i, m) in x.modules.iter().enumerate() {
        let attachers = g.neighborhood_of_set(&m.vertices).difference(&union);
        for v in attachers.iter() {
            let nv = omap.old_to_new[v].expect("outside vertex kept");
            for b in reps[i].1.iter() {
                out.add_edge(nv, offsets[i] + b);
            }
        }
    }
    // Adjacent modules get the complete connection between image frontiers.
    for i in 0..x.modules.len() {
        for j in i + 1..x.modules.len() {
            if g
                .neighborhood_of_set(&x.modules[i].vertices)
                .intersects(&x.modules[j].vertices)
            {
                for a in reps[i].1.iter() {
                    for b in reps[j].1.iter() {
                        out.add_edge(offsets[i] + a, offsets[j] + b);
                    }
                }
            }
        }
    }

    let modules = reps
        .iter()
        .zip(&offsets)
        .map(|((h, _), &off)| {
            let block: BitSet = (off..off + h.n()).collect();
            SplitModule::of(&out, block)
        })
        .collect::<Result<Vec<_>>>()?;
    let provenance = x
        .modules
        .iter()
        .zip(&reps)
        .map(|(m, (h, _))| ProvenanceEntry {
            original: m.vertices.clone(),
            replacement_size: h.n(),
        })
        .collect();
    Ok(KernelOutput {
        graph: out,
        modulator: WsModulator {
            modules,
            c: x.c,
            target: x.target.clone(),
        },
        annotation: None,
        budget: None,
        provenance,
    })
}

/// Check the four similarity conditions between `(g, x)` and `(g2, x2)`,
/// matching outside vertices in sorted order (which is how
/// [`replace_modules`] lays them out). Intended for desk-scale verification.
pub fn q_similarity_holds(
    g: &Graph,
    x: &WsModulator,
    g2: &Graph,
    x2: &WsModulator,
    rounds: usize,
    caps: &Caps,
) -> Result<bool> {
    if x.modules.len() != x2.modules.len() {
        return Ok(false);
    }
    let out1: Vec<usize> = x.union().complement(g.n()).iter().collect();
    let out2: Vec<usize> = x2.union().complement(g2.n()).iter().collect();
    if out1.len() != out2.len() {
        return Ok(false);
    }
    // Condition 1: the outside parts are isomorphic under the order match.
    for (i, &u) in out1.iter().enumerate() {
        for (j, &v) in out1.iter().enumerate().skip(i + 1) {
            if g.has_edge(u, v) != g2.has_edge(out2[i], out2[j]) {
                return Ok(false);
            }
        }
    }
    // Condition 2: outside adjacency to each frontier is preserved.
    for (i, &u) in out1.iter().enumerate() {
        for (m1, m2) in x.modules.iter().zip(&x2.modules) {
            let a1 = g.neighbors(u).intersects(&m1.frontier);
            let a2 = g2.neighbors(out2[i]).intersects(&m2.frontier);
            if a1 != a2 {
                return Ok(false);
            }
        }
    }
    // Condition 3: frontier pairs are adjacent on one side iff on the other.
    for i in 0..x.modules.len() {
        for j in i + 1..x.modules.len() {
            let a1 = frontier_adjacent(g, &x.modules[i], &x.modules[j]);
            let a2 = frontier_adjacent(g2, &x2.modules[i], &x2.modules[j]);
            if a1 != a2 {
                return Ok(false);
            }
        }
    }
    // Condition 4: per-module q-types relative to the frontier coincide.
    for (m1, m2) in x.modules.iter().zip(&x2.modules) {
        let (s1, map1) = g.induced_subgraph(&m1.vertices)?;
        let (s2, map2) = g2.induced_subgraph(&m2.vertices)?;
        let cfg = GameConfig {
            left: Structure::with_sets(s1, vec![map1.image(&m1.frontier)]),
            right: Structure::with_sets(s2, vec![map2.image(&m2.frontier)]),
            rounds,
        };
        let mut table = crate::mso::types::TypeTable::new();
        if !game_equivalent_with(&cfg, &mut table, caps)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn frontier_adjacent(g: &Graph, a: &SplitModule, b: &SplitModule) -> bool {
    a.frontier
        .iter()
        .any(|v| g.neighbors(v).intersects(&b.frontier))
}

// --- model-checking kernel ------------------------------------------------------

/// Kernel for sentence model checking: find a well-structured modulator to
/// `class`, replace its modules at the sentence's quantifier rank, and (for
/// forests) shrink the acyclic remainder by protrusion replacement. Below
/// the rank-width threshold the instance is solved outright and a trivial
/// equivalent instance is emitted.
pub fn mc_kernel(
    g: &Graph,
    phi: &MsoFormula,
    class: &ClassDescriptor,
    c: usize,
    engine: &mut RepEngine,
    caps: &Caps,
    eval_limit: usize,
) -> Result<KernelOutput> {
    if !phi.is_sentence() {
        return Err(Error::contract("mc_kernel expects a sentence"));
    }
    let rounds = phi.quantifier_rank();
    if let RankWidth::Exact { .. } = rank_width_exact(g, Some(c + 1), caps)? {
        // Below threshold: decide directly, emit a tiny equivalent instance.
        let answer = evaluate(&Structure::sentence(g.clone()), phi, eval_limit)?;
        return trivial_mc_instance(answer, phi, class, eval_limit);
    }

    let x = match class {
        ClassDescriptor::Empty => {
            let part = sim_c_classes(g, c, caps)?;
            let modules = part
                .classes
                .into_iter()
                .map(|cl| SplitModule::of(g, cl))
                .collect::<Result<Vec<_>>>()?;
            WsModulator {
                modules,
                c,
                target: ClassDescriptor::Empty,
            }
        }
        ClassDescriptor::Edgeless => {
            let k2 = ObstructionSet::new(vec![crate::graph::complete(2)])?;
            let mut x = wsm_obstruction_approx(g, c, &k2, caps)?;
            x.target = ClassDescriptor::Edgeless;
            x
        }
        ClassDescriptor::Forest => wsm_forest_3approx(g, c, caps)?,
        ClassDescriptor::Obstructions(obs) => wsm_obstruction_approx(g, c, obs, caps)?,
    };

    let mut ko = replace_modules(g, &x, rounds, engine, caps)?;
    if matches!(class, ClassDescriptor::Forest) {
        ko = shrink_forest_part(ko, rounds, engine, caps)?;
    }
    Ok(ko)
}

/// Smallest graph (by canonical-order search over at most four vertices)
/// whose answer for `phi` matches; packaged with an all-singleton modulator.
fn trivial_mc_instance(
    answer: bool,
    phi: &MsoFormula,
    class: &ClassDescriptor,
    eval_limit: usize,
) -> Result<KernelOutput> {
    let mut engine = RepEngine::new();
    for m in 0..=4usize {
        for h in engine_graphs(&mut engine, m) {
            if evaluate(&Structure::sentence(h.clone()), phi, eval_limit)? == answer {
                let _ = class;
                return Ok(singleton_kernel(h));
            }
        }
    }
    Err(Error::invariant(format!(
        "no trivial {}-instance within four vertices",
        if answer { "yes" } else { "no" }
    )))
}

fn engine_graphs(engine: &mut RepEngine, m: usize) -> Vec<Graph> {
    if m == 0 {
        return vec![Graph::new(0)];
    }
    crate::mso::rep::canonical_graphs_of_order(engine, m).to_vec()
}

fn singleton_kernel(h: Graph) -> KernelOutput {
    let modules = h
        .vertices()
        .map(|v| SplitModule {
            vertices: BitSet::from_iter([v]),
            frontier: if h.neighbors(v).is_empty() {
                BitSet::new()
            } else {
                BitSet::from_iter([v])
            },
            host_component: 0,
        })
        .collect();
    KernelOutput {
        modulator: WsModulator {
            modules,
            c: 0,
            target: ClassDescriptor::Empty,
        },
        graph: h,
        annotation: None,
        budget: None,
        provenance: Vec::new(),
    }
}

// --- protrusion replacement -------------------------------------------------------

/// Replace the protrusion `l` (its boundary is computed as the members with
/// outside neighbors, encoded as singletons) by a q-type-preserving
/// representative; outside edges rewire to the boundary images. Returns the
/// new graph and the old-to-new index map of the kept vertices.
pub fn protrusion_replace(
    g: &Graph,
    l: &VertexSet,
    rounds: usize,
    engine: &mut RepEngine,
    caps: &Caps,
    require_acyclic: bool,
) -> Result<(Graph, Vec<Option<usize>>)> {
    let boundary: Vec<usize> = l
        .iter()
        .filter(|&v| !g.neighbors(v).difference(l).is_empty())
        .collect();
    let (sub, map) = g.induced_subgraph(l)?;
    let local: Vec<VertexSet> = boundary
        .iter()
        .map(|&b| BitSet::from_iter([map.old_to_new[b].expect("in l")]))
        .collect();
    let opts = RepOptions {
        require_acyclic,
        ..RepOptions::singletons(caps.size_cap)
    };
    let (h, hb) = find_representative(engine, &sub, &local, rounds, &opts, caps)?;

    let keep = l.complement(g.n());
    let (g0, omap) = g.induced_subgraph(&keep)?;
    let mut out = Graph::new(g0.n() + h.n());
    for (u, v) in g0.edges() {
        out.add_edge(u, v);
    }
    let off = g0.n();
    for (u, v) in h.edges() {
        out.add_edge(off + u, off + v);
    }
    for (bi, &b) in boundary.iter().enumerate() {
        let image = off + hb[bi].first().expect("singleton image");
        for w in g.neighbors(b).difference(l).iter() {
            out.add_edge(omap.old_to_new[w].expect("kept"), image);
        }
    }
    Ok((out, omap.old_to_new))
}

// --- forest-part shrinking ----------------------------------------------------------

/// Shrink the forest remainder of a kernel by repeated protrusion
/// replacement: unmarked whole trees, then over-long segments between
/// marked vertices, windowed to stay within the game budget. Marks are the
/// modulator-adjacent vertices closed under branch-vertex marking. Each
/// successful replacement strictly shrinks the graph.
pub fn shrink_forest_part(
    ko: KernelOutput,
    rounds: usize,
    engine: &mut RepEngine,
    caps: &Caps,
) -> Result<KernelOutput> {
    let mut graph = ko.graph;
    let mut modules: Vec<(VertexSet, VertexSet)> = ko
        .modulator
        .modulator_sets();
    let mut provenance = ko.provenance;

    loop {
        let x_union: BitSet = modules.iter().flat_map(|(m, _)| m.iter()).collect();
        let candidate = next_protrusion(&graph, &x_union, rounds, caps);
        let l = match candidate {
            Some(l) => l,
            None => break,
        };
        let before = graph.n();
        let (next, old_to_new) =
            protrusion_replace(&graph, &l, rounds, engine, caps, true)?;
        if next.n() >= before {
            // The minimum representative is no smaller; nothing to gain.
            break;
        }
        provenance.push(ProvenanceEntry {
            original: l.clone(),
            replacement_size: next.n() + l.len() - before,
        });
        modules = modules
            .into_iter()
            .map(|(m, f)| (remap_set(&m, &old_to_new), remap_set(&f, &old_to_new)))
            .collect();
        graph = next;
    }

    let modules = modules
        .into_iter()
        .map(|(m, _)| SplitModule::of(&graph, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelOutput {
        modulator: WsModulator {
            modules,
            c: ko.modulator.c,
            target: ko.modulator.target,
        },
        graph,
        annotation: ko.annotation,
        budget: ko.budget,
        provenance,
    })
}

fn remap_set(s: &VertexSet, old_to_new: &[Option<usize>]) -> VertexSet {
    s.iter()
        .map(|v| old_to_new[v].expect("tracked set must survive replacement"))
        .collect()
}

/// Largest structure size the game budget admits at this round count.
fn game_size_limit(rounds: usize, caps: &Caps) -> usize {
    (1..=26).filter(|&n| caps.admits_game(n, rounds)).last().unwrap_or(1)
}

/// The next replaceable part of the forest remainder, deterministic: the
/// smallest candidate protrusion whose size sits in (size_cap, game limit]
/// and whose boundary has at most three vertices. Candidates are whole
/// unmarked-interior segments with their attachments, subtrees hanging
/// below a tree edge, and a vertex together with a prefix of its child
/// subtrees (for high-degree shapes where no single subtree fits). Unions
/// of whole unmarked trees come last, to fold scattered components
/// together.
fn next_protrusion(g: &Graph, x: &VertexSet, rounds: usize, caps: &Caps) -> Option<VertexSet> {
    let limit = game_size_limit(rounds, caps);
    if limit <= caps.size_cap {
        return None; // the game budget admits nothing worth replacing
    }
    let rest = x.complement(g.n());
    let (h, map) = g.induced_subgraph(&rest).expect("in range");
    debug_assert!(h.is_acyclic(), "remainder must be a forest");
    let marks = compute_marks(g, &h, &map);
    let trees = h.connected_components();

    let boundary_of = |l: &VertexSet| -> usize {
        let l_g = map.preimage(l);
        l_g.iter()
            .filter(|&v| !g.neighbors(v).difference(&l_g).is_empty())
            .count()
    };
    let mut candidates: Vec<VertexSet> = Vec::new();
    let mut offer = |l: VertexSet, candidates: &mut Vec<VertexSet>| {
        if l.len() > caps.size_cap && l.len() <= limit && boundary_of(&l) <= 3 {
            candidates.push(l);
        }
    };

    for t in &trees {
        // Whole unmarked-interior segments plus their marked attachments.
        let inner = t.difference(&marks);
        let (seg_graph, seg_map) = h.induced_subgraph(&inner).expect("in range");
        for comp in seg_graph.connected_components() {
            let comp_h = seg_map.preimage(&comp);
            let mut l = comp_h.clone();
            for m in marks.iter() {
                if h.neighbors(m).intersects(&comp_h) {
                    l.insert(m);
                }
            }
            offer(l, &mut candidates);
        }
        // Rooted windows: subtrees below an edge, and vertex-plus-children
        // prefixes.
        let root = t.first().expect("non-empty tree");
        let (order, parent) = root_tree(&h, t, root);
        let mut size = vec![1usize; h.n()];
        for &v in order.iter().rev() {
            if let Some(p) = parent[v] {
                size[p] += size[v];
            }
        }
        for &v in &order {
            if parent[v].is_some() {
                offer(subtree_below(&h, t, v, &parent), &mut candidates);
            }
            let kids: Vec<usize> = h
                .neighbors(v)
                .intersection(t)
                .iter()
                .filter(|&w| parent[w] == Some(v))
                .collect();
            if kids.len() >= 2 {
                let mut w = BitSet::from_iter([v]);
                for k in kids {
                    if w.len() + size[k] > limit {
                        continue;
                    }
                    w.union_with(&subtree_below(&h, t, k, &parent));
                    if w.len() > caps.size_cap {
                        break;
                    }
                }
                offer(w, &mut candidates);
            }
        }
    }
    if let Some(best) = candidates.iter().min_by_key(|l| (l.len(), l.first())) {
        return Some(map.preimage(best));
    }

    // Scattered unmarked whole trees: fold the smallest ones together.
    let unmarked: Vec<&VertexSet> = trees.iter().filter(|t| !t.intersects(&marks)).collect();
    if unmarked.len() >= 2 {
        let mut sorted: Vec<&VertexSet> = unmarked.clone();
        sorted.sort_by_key(|t| (t.len(), t.first()));
        let mut union = BitSet::new();
        let mut count = 0;
        for t in sorted {
            if union.len() + t.len() <= limit {
                union.union_with(t);
                count += 1;
            }
        }
        if count >= 2 {
            return Some(map.preimage(&union));
        }
    } else if unmarked.len() == 1
        && unmarked[0].len() > caps.size_cap
        && unmarked[0].len() <= limit
    {
        return Some(map.preimage(unmarked[0]));
    }
    None
}

/// BFS order and parent pointers of the tree component `t` rooted at `root`.
fn root_tree(h: &Graph, t: &VertexSet, root: usize) -> (Vec<usize>, Vec<Option<usize>>) {
    let mut parent = vec![None; h.n()];
    let mut order = vec![root];
    let mut seen = BitSet::from_iter([root]);
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for w in h.neighbors(v).intersection(t).iter() {
            if !seen.contains(w) {
                seen.insert(w);
                parent[w] = Some(v);
                order.push(w);
            }
        }
    }
    (order, parent)
}

fn subtree_below(h: &Graph, t: &VertexSet, v: usize, parent: &[Option<usize>]) -> VertexSet {
    let mut out = BitSet::from_iter([v]);
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for w in h.neighbors(u).intersection(t).iter() {
            if parent[w] == Some(u) && !out.contains(w) {
                out.insert(w);
                stack.push(w);
            }
        }
    }
    out
}

/// Marked vertices of the forest H = G - X: those adjacent to X, closed
/// under marking branch vertices whose removal separates their tree into at
/// least three parts each holding a mark.
fn compute_marks(g: &Graph, h: &Graph, map: &crate::graph::IndexMap) -> VertexSet {
    let mut marks = BitSet::new();
    for v in 0..h.n() {
        let orig = map.new_to_old[v];
        if !g.neighbors(orig).difference(&map.preimage(&h.vertex_set())).is_empty() {
            marks.insert(v);
        }
    }
    loop {
        let mut grew = false;
        for v in 0..h.n() {
            if marks.contains(v) || h.degree(v) < 3 {
                continue;
            }
            let mut keep = h.vertex_set();
            keep.remove(v);
            let (hv, mv) = h.induced_subgraph(&keep).expect("in range");
            let parts = hv
                .connected_components()
                .into_iter()
                .filter(|p| {
                    mv.preimage(p).intersects(&marks)
                        && h.neighbors(v).intersects(&mv.preimage(p))
                })
                .count();
            if parts >= 3 {
                marks.insert(v);
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    marks
}

/// Linear kernel for sentence model checking on bounded-degree graphs,
/// parameterized by the feedback vertex set: 2-approximate an FVS, then
/// shrink the forest remainder by protrusion replacement until every
/// segment between marked vertices is small.
pub fn fvs_bd_kernel(
    g: &Graph,
    phi: &MsoFormula,
    degree_bound: usize,
    engine: &mut RepEngine,
    caps: &Caps,
) -> Result<KernelOutput> {
    if !phi.is_sentence() {
        return Err(Error::contract("fvs_bd_kernel expects a sentence"));
    }
    if g.max_degree() > degree_bound {
        return Err(Error::contract(format!(
            "degree bound violated: max degree {} > {degree_bound}",
            g.max_degree()
        )));
    }
    let x = crate::wsm::fvs_2approx(g);
    let modules = x
        .iter()
        .map(|v| SplitModule::of(g, BitSet::from_iter([v])))
        .collect::<Result<Vec<_>>>()?;
    let ko = KernelOutput {
        graph: g.clone(),
        modulator: WsModulator {
            modules,
            c: 0,
            target: ClassDescriptor::Forest,
        },
        annotation: None,
        budget: None,
        provenance: Vec::new(),
    };
    shrink_forest_part(ko, phi.quantifier_rank(), engine, caps)
}

// --- annotated optimization kernel -----------------------------------------------------

/// Annotated kernel for minimization: replace the (V-covering) modulator at
/// rank q+1, then for every subset of every image module record the minimum
/// original cardinality realizing its q-type relative to the frontier.
/// A set Z of the kernel then weighs exactly as much as the cheapest
/// original set of its type, so the optimum is preserved.
pub fn opt_annotated_kernel(
    g: &Graph,
    x: &WsModulator,
    phi: &MsoFormula,
    budget: &BigUint,
    engine: &mut RepEngine,
    caps: &Caps,
) -> Result<KernelOutput> {
    if phi.free_set_vars.len() != 1 || !phi.free_point_vars.is_empty() {
        return Err(Error::contract(
            "optimization kernels expect one free set variable",
        ));
    }
    if x.union() != g.vertex_set() {
        return Err(Error::contract(
            "optimization kernels need a modulator covering every vertex",
        ));
    }
    let q = phi.quantifier_rank();
    let mut ko = replace_modules(g, x, q + 1, engine, caps)?;

    let mut triples: Vec<(VertexSet, VertexSet, BigUint)> = Vec::new();
    for (i, (m, m2)) in x.modules.iter().zip(&ko.modulator.modules).enumerate() {
        let (sub, map) = g.induced_subgraph(&m.vertices)?;
        let front = map.image(&m.frontier);
        let (sub2, map2) = ko.graph.induced_subgraph(&m2.vertices)?;
        let front2 = map2.image(&m2.frontier);
        let n1 = sub.n();
        let n2 = sub2.n();
        if n1 > 63 || n2 > 63 {
            return Err(Error::capacity(format!("module {i} too large to annotate")));
        }
        // Type of every subset on both sides, in one shared table.
        let mut originals: Vec<(crate::mso::TypeId, usize)> = Vec::with_capacity(1 << n1);
        for mask in 0u64..(1 << n1) {
            let w = BitSet::from_mask(mask);
            let t = mso_type(&sub, &[front.clone(), w], &[], q, &mut engine.table, caps)
                .map_err(|e| annotate_err(e, i))?;
            originals.push((t, mask.count_ones() as usize));
        }
        for mask in 0u64..(1 << n2) {
            let w2 = BitSet::from_mask(mask);
            let t = mso_type(&sub2, &[front2.clone(), w2.clone()], &[], q, &mut engine.table, caps)
                .map_err(|e| annotate_err(e, i))?;
            let best = originals
                .iter()
                .filter(|(t1, _)| *t1 == t)
                .map(|(_, size)| *size)
                .min()
                .ok_or_else(|| {
                    Error::invariant(format!(
                        "module {i}: no original subset matches an image type; \
                         replacement was not (q+1)-similar"
                    ))
                })?;
            let w2_global = map2.preimage(&w2);
            let rest_global = m2.vertices.difference(&w2_global);
            triples.push((w2_global, rest_global, BigUint::from(best)));
        }
    }
    ko.annotation = Some(Annotation { triples });
    ko.budget = Some(budget.clone());
    Ok(ko)
}

fn annotate_err(e: Error, module: usize) -> Error {
    match e {
        Error::Capacity(msg) => Error::Capacity(format!("module {module}: {msg}")),
        other => other,
    }
}

/// Outcome of the win-win optimization pipeline.
#[derive(Debug, Clone)]
pub enum OptOutcome {
    /// The instance was solved outright; the kernel is a trivial instance
    /// with the same answer.
    Decided { answer: bool, kernel: KernelOutput },
    /// The annotated kernel, already polynomial-size in the class count.
    Kernel(KernelOutput),
}

/// Decide or kernelize a minimization instance: below the rank-width
/// threshold solve directly on g; with few classes (2^k <= n) solve the
/// annotated kernel by subset enumeration; otherwise emit the annotated
/// kernel.
pub fn opt_winwin(
    g: &Graph,
    phi: &MsoFormula,
    budget: &BigUint,
    c: usize,
    engine: &mut RepEngine,
    caps: &Caps,
    eval_limit: usize,
) -> Result<OptOutcome> {
    if phi.free_set_vars.len() != 1 || !phi.free_point_vars.is_empty() {
        return Err(Error::contract(
            "optimization expects one free set variable",
        ));
    }
    if let RankWidth::Exact { .. } = rank_width_exact(g, Some(c + 1), caps)? {
        // Below threshold: enumerate candidate sets on g directly.
        if g.n() > 24 {
            return Err(Error::capacity(
                "direct optimization beyond 24 vertices",
            ));
        }
        let mut answer = false;
        for mask in 0u64..(1u64 << g.n()) {
            let z = BitSet::from_mask(mask);
            if BigUint::from(z.len()) > *budget {
                continue;
            }
            let s = Structure::with_sets(g.clone(), vec![z]);
            if evaluate(&s, phi, eval_limit)? {
                answer = true;
                break;
            }
        }
        let kernel = trivial_opt_instance(answer, phi, eval_limit)?;
        return Ok(OptOutcome::Decided { answer, kernel });
    }

    let part = sim_c_classes(g, c, caps)?;
    let modules = part
        .classes
        .into_iter()
        .map(|cl| SplitModule::of(g, cl))
        .collect::<Result<Vec<_>>>()?;
    let x = WsModulator {
        modules,
        c,
        target: ClassDescriptor::Empty,
    };
    let k = x.k();
    let ko = opt_annotated_kernel(g, &x, phi, budget, engine, caps)?;

    let direct = k < 64 && (1u128 << k) <= g.n() as u128;
    if direct {
        let ann = ko.annotation.as_ref().expect("annotated");
        let kn = ko.graph.n();
        if kn > 24 {
            return Err(Error::capacity("annotated direct solve beyond 24 vertices"));
        }
        let mut answer = false;
        for mask in 0u64..(1u64 << kn) {
            let z = BitSet::from_mask(mask);
            if ann.value(&z) > *budget {
                continue;
            }
            let s = Structure::with_sets(ko.graph.clone(), vec![z]);
            if evaluate(&s, phi, eval_limit)? {
                answer = true;
                break;
            }
        }
        let kernel = trivial_opt_instance(answer, phi, eval_limit)?;
        return Ok(OptOutcome::Decided { answer, kernel });
    }
    Ok(OptOutcome::Kernel(ko))
}

/// Fixed trivial annotated instances: a no-instance weighs every set at 1
/// against budget 0; a yes-instance is the smallest structure satisfying
/// phi with the empty annotation and budget 0.
fn trivial_opt_instance(answer: bool, phi: &MsoFormula, eval_limit: usize) -> Result<KernelOutput> {
    if !answer {
        let h = Graph::new(1);
        let mut ko = singleton_kernel(h);
        ko.annotation = Some(Annotation {
            triples: vec![
                (BitSet::new(), BitSet::from_iter([0]), BigUint::from(1u32)),
                (BitSet::from_iter([0]), BitSet::new(), BigUint::from(1u32)),
            ],
        });
        ko.budget = Some(BigUint::default());
        return Ok(ko);
    }
    let mut engine = RepEngine::new();
    for m in 0..=4usize {
        for h in engine_graphs(&mut engine, m) {
            for mask in 0u64..(1 << m) {
                let z = BitSet::from_mask(mask);
                let s = Structure::with_sets(h.clone(), vec![z]);
                if evaluate(&s, phi, eval_limit)? {
                    let mut ko = singleton_kernel(h);
                    ko.annotation = Some(Annotation::default());
                    ko.budget = Some(BigUint::default());
                    return Ok(ko);
                }
            }
        }
    }
    Err(Error::invariant(
        "no trivial yes-instance within four vertices",
    ))
}

// --- serialization ---------------------------------------------------------------

impl KernelOutput {
    /// The kernel graph in .gr form with provenance comments, plus the
    /// sidecar annotation file when an annotation is present.
    pub fn to_gr(&self) -> (String, Option<String>) {
        let mut comments: Vec<String> = self
            .provenance
            .iter()
            .enumerate()
            .map(|(i, p)| {
                format!(
                    "provenance {} replaced {} by {} vertices",
                    i + 1,
                    fmt_vertices(&p.original),
                    p.replacement_size
                )
            })
            .collect();
        for (i, m) in self.modulator.modules.iter().enumerate() {
            comments.push(format!("module {} {}", i + 1, fmt_vertices(&m.vertices)));
        }
        let gr = self.graph.write_gr(&comments);
        let ann = self.annotation.as_ref().map(|a| {
            let mut out = String::new();
            if let Some(r) = &self.budget {
                out.push_str(&format!("c budget {r}\n"));
            }
            for (x, y, w) in &a.triples {
                out.push_str(&format!(
                    "a {} {} {} {} {}\n",
                    x.len(),
                    fmt_vertices(x),
                    y.len(),
                    fmt_vertices(y),
                    w
                ));
            }
            out
        });
        (gr, ann)
    }
}

fn fmt_vertices(s: &VertexSet) -> String {
    if s.is_empty() {
        return "-".into();
    }
    s.iter()
        .map(|v| (v + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parse a sidecar annotation file ("a" lines, 1-indexed, empty sets
/// written as "-"; a "c budget <r>" comment carries the budget).
pub fn parse_annotation(text: &str) -> Result<(Annotation, Option<BigUint>)> {
    let mut triples = Vec::new();
    let mut budget = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("c ") {
            if let Some(b) = rest.strip_prefix("budget ") {
                budget = Some(b.trim().parse::<BigUint>().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad budget \"{b}\""),
                })?);
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.first() != Some(&"a") {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected annotation line, found \"{line}\""),
            });
        }
        let mut pos = 1;
        let mut read_set = |pos: &mut usize| -> Result<VertexSet> {
            let count: usize = toks
                .get(*pos)
                .and_then(|t| t.parse().ok())
                .ok_or(Error::Parse {
                    line: lineno,
                    msg: "bad set length".into(),
                })?;
            *pos += 1;
            let mut s = BitSet::new();
            if count == 0 {
                if toks.get(*pos) == Some(&"-") {
                    *pos += 1;
                }
                return Ok(s);
            }
            for _ in 0..count {
                let v: usize = toks
                    .get(*pos)
                    .and_then(|t| t.parse().ok())
                    .ok_or(Error::Parse {
                        line: lineno,
                        msg: "bad vertex".into(),
                    })?;
                if v == 0 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "vertices are 1-indexed".into(),
                    });
                }
                s.insert(v - 1);
                *pos += 1;
            }
            Ok(s)
        };
        let x = read_set(&mut pos)?;
        let y = read_set(&mut pos)?;
        let w: BigUint = toks
            .get(pos)
            .and_then(|t| t.parse().ok())
            .ok_or(Error::Parse {
                line: lineno,
                msg: "bad weight".into(),
            })?;
        triples.push((x, y, w));
    }
    Ok((Annotation { triples }, budget))
}

impl WsModulator {
    /// (vertices, frontier) pairs, for callers that remap them.
    pub fn modulator_sets(&self) -> Vec<(VertexSet, VertexSet)> {
        self.modules
            .iter()
            .map(|m| (m.vertices.clone(), m.frontier.clone()))
            .collect()
    }
}
