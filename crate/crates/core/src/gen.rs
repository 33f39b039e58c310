//! Seeded instance generators: planted well-structured modulators, the
//! vertex-cover gap family, and assorted random-graph helpers the test
//! batches draw from. Everything is deterministic in the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitSet;
use crate::error::Result;
use crate::graph::{Graph, VertexSet};
use crate::splitmod::SplitModule;
use crate::wsm::{ClassDescriptor, WsModulator};

/// A graph with `k` planted split-modules of rank-width <= c (random trees
/// or cographs) wired through random frontiers to a random member of the
/// target class. Returns the plant as ground truth; the true optimum is at
/// most `k`.
pub fn gen_planted(
    seed: u64,
    k: usize,
    c: usize,
    module_size: usize,
    class: &ClassDescriptor,
) -> Result<(Graph, WsModulator)> {
    assert!(module_size >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random_class_member(&mut rng, class);
    let base_n = base.n();
    let n = base_n + k * module_size;
    let mut g = Graph::new(n);
    for (u, v) in base.edges() {
        g.add_edge(u, v);
    }

    let mut frontiers: Vec<VertexSet> = Vec::with_capacity(k);
    let mut blocks: Vec<VertexSet> = Vec::with_capacity(k);
    for i in 0..k {
        let off = base_n + i * module_size;
        let shape = if rng.gen_bool(0.5) {
            random_tree(&mut rng, module_size)
        } else {
            random_cograph(&mut rng, module_size)
        };
        for (u, v) in shape.edges() {
            g.add_edge(off + u, off + v);
        }
        let fsize = rng.gen_range(1..=module_size);
        let mut frontier = BitSet::new();
        while frontier.len() < fsize {
            frontier.insert(off + rng.gen_range(0..module_size));
        }
        blocks.push((off..off + module_size).collect());
        frontiers.push(frontier);
    }

    // Frontier wiring: complete connections to a random base subset and to
    // some earlier modules, so each block stays one side of a split.
    for i in 0..k {
        if base_n > 0 {
            let t = rng.gen_range(1..=base_n.min(3));
            let mut targets = BitSet::new();
            while targets.len() < t {
                targets.insert(rng.gen_range(0..base_n));
            }
            for f in frontiers[i].iter() {
                for b in targets.iter() {
                    g.add_edge(f, b);
                }
            }
        }
        for j in 0..i {
            let must_wire = base_n == 0 && j == i - 1;
            if must_wire || rng.gen_bool(0.4) {
                for a in frontiers[i].clone().iter() {
                    for b in frontiers[j].clone().iter() {
                        g.add_edge(a, b);
                    }
                }
            }
        }
    }

    let modules = blocks
        .into_iter()
        .map(|b| SplitModule::of(&g, b))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        g,
        WsModulator {
            modules,
            c,
            target: class.clone(),
        },
    ))
}

fn random_class_member(rng: &mut ChaCha8Rng, class: &ClassDescriptor) -> Graph {
    match class {
        ClassDescriptor::Empty => Graph::new(0),
        ClassDescriptor::Edgeless => Graph::new(rng.gen_range(1..=4)),
        ClassDescriptor::Forest => {
            let n = rng.gen_range(2..=6);
            random_forest(rng, n)
        }
        ClassDescriptor::Obstructions(obs) => {
            // Rejection sampling over sparse graphs; the empty graph is the
            // safe fallback.
            for _ in 0..200 {
                let n = rng.gen_range(1..=5);
                let g = gnp(rng, n, 0.25);
                if class.contains(&g) {
                    return g;
                }
            }
            let _ = obs;
            Graph::new(0)
        }
    }
}

/// Uniform random labeled tree via random parent attachment.
pub fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n {
        g.add_edge(v, rng.gen_range(0..v));
    }
    g
}

/// Random forest: a tree with a random subset of its edges removed.
pub fn random_forest(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n {
        if rng.gen_bool(0.8) {
            g.add_edge(v, rng.gen_range(0..v));
        }
    }
    g
}

/// Random connected cograph from a random cotree whose root is a join
/// (rank-width <= 1).
pub fn random_cograph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    fn build(rng: &mut ChaCha8Rng, verts: &[usize], g: &mut Graph, force_join: bool) {
        if verts.len() <= 1 {
            return;
        }
        let cut = rng.gen_range(1..verts.len());
        let (a, b) = verts.split_at(cut);
        if force_join || rng.gen_bool(0.5) {
            for &u in a {
                for &v in b {
                    g.add_edge(u, v);
                }
            }
        }
        build(rng, a, g, false);
        build(rng, b, g, false);
    }
    let mut g = Graph::new(n);
    let verts: Vec<usize> = (0..n).collect();
    build(rng, &verts, &mut g, true);
    g
}

/// Erdos-Renyi G(n, p).
pub fn gnp(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Connected G(n, p) by rejection, with a spanning-tree fallback patch.
pub fn connected_gnp(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    for _ in 0..100 {
        let g = gnp(rng, n, p);
        if g.is_connected() {
            return g;
        }
    }
    let mut g = gnp(rng, n, p);
    for v in 1..n {
        let comp = g.component_of(v);
        if !comp.contains(0) {
            g.add_edge(v, rng.gen_range(0..v));
        }
    }
    g
}

/// The vertex-cover gap family: the path on 2i+1 vertices, whose vertex
/// cover number is at least i while a single split-module of rank-width 1
/// (everything but one endpoint) already reaches the edgeless class.
pub fn gen_vc_gap_family(i: usize) -> Graph {
    assert!(i >= 1);
    crate::graph::path(2 * i + 1)
}

/// A cycle with long pendant trees hanging off it; maximum degree stays at
/// most 4. The shape behind the bounded-degree kernel batches.
pub fn gen_cycle_with_pendants(seed: u64, cycle_len: usize, pendants: usize, pendant_len: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cycle_len + pendants * pendant_len;
    let mut g = Graph::new(n);
    for v in 0..cycle_len {
        g.add_edge(v, (v + 1) % cycle_len);
    }
    for p in 0..pendants {
        let off = cycle_len + p * pendant_len;
        // A path with occasional degree-3 branch points.
        for v in 1..pendant_len {
            let parent = if v >= 2 && rng.gen_bool(0.25) {
                off + v - 2
            } else {
                off + v - 1
            };
            if g.degree(parent) >= 3 {
                g.add_edge(off + v, off + v - 1);
            } else {
                g.add_edge(off + v, parent);
            }
        }
        // Attach to a cycle vertex of low degree.
        let anchor = (0..cycle_len)
            .filter(|&v| g.degree(v) <= 2)
            .nth(rng.gen_range(0..cycle_len.min(3)))
            .unwrap_or(p % cycle_len);
        g.add_edge(anchor, off);
    }
    g
}
