//! End-to-end checks of the replacement and kernelization pipelines against
//! the brute-force oracles, at sizes where everything can be recomputed from
//! scratch.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wsmod_core::bits::BitSet;
use wsmod_core::caps::{Caps, DEFAULT_EVAL_LIMIT};
use wsmod_core::gen::{gen_planted, gen_vc_gap_family, gnp};
use wsmod_core::graph::{complete, cycle, path, Graph};
use wsmod_core::kernel::{
    fvs_bd_kernel, mc_kernel, opt_annotated_kernel, opt_winwin, parse_annotation,
    protrusion_replace, q_similarity_holds, replace_modules, Annotation, OptOutcome,
};
use wsmod_core::mso::{evaluate, parse_formula, RepEngine, Structure};
use wsmod_core::oracle::{exact_opt_mso, exact_wsn, OptDirection};
use wsmod_core::splitmod::{frontier, sim_c_classes, SplitModule};
use wsmod_core::wsm::{
    verify_wsm, wsm_forest_3approx, wsm_obstruction_approx, ClassDescriptor, ObstructionSet,
    WsModulator,
};

const THREE_COL: &str = include_str!("../../../formulas/3col.mso");
const HAS_ISOLATED: &str = include_str!("../../../formulas/has_isolated.mso");
const CONNECTED: &str = include_str!("../../../formulas/connected.mso");
const SOME_EDGE: &str = include_str!("../../../formulas/some_edge.mso");
const VC: &str = include_str!("../../../formulas/vc.mso");
const DOMSET: &str = include_str!("../../../formulas/domset.mso");

#[test]
fn corpus_parses_with_expected_ranks() {
    for (text, qr, free) in [
        (THREE_COL, 5, 0),
        (HAS_ISOLATED, 2, 0),
        (CONNECTED, 3, 0),
        (SOME_EDGE, 2, 0),
        (VC, 2, 1),
        (DOMSET, 2, 1),
    ] {
        let f = parse_formula(text).unwrap();
        assert_eq!(f.quantifier_rank(), qr);
        assert_eq!(f.free_set_vars.len(), free);
    }
}

#[test]
fn annotation_value_examples() {
    let g = cycle(4);
    let unit = Annotation::unit(&g);
    for mask in 0u64..16 {
        let z = BitSet::from_mask(mask);
        assert_eq!(unit.value(&z), BigUint::from(z.len()));
    }
    assert_eq!(Annotation::default().value(&BitSet::from_iter([0])), BigUint::default());
    let a = Annotation {
        triples: vec![(BitSet::from_iter([0]), BitSet::from_iter([1]), BigUint::from(5u32))],
    };
    assert_eq!(a.value(&BitSet::from_iter([0, 1])), BigUint::default());
    assert_eq!(a.value(&BitSet::from_iter([0])), BigUint::from(5u32));
}

#[test]
fn replacement_is_identity_for_small_modules() {
    let caps = Caps::default();
    let mut engine = RepEngine::new();
    let (g, x) = gen_planted(11, 3, 1, 4, &ClassDescriptor::Empty).unwrap();
    let ko = replace_modules(&g, &x, 2, &mut engine, &caps).unwrap();
    // Modules are below the size cap, so the graph comes back isomorphic;
    // with the layout both sides even have equal vertex counts.
    assert_eq!(ko.graph.n(), g.n());
    assert_eq!(ko.graph.edge_count(), g.edge_count());
    assert!(q_similarity_holds(&g, &x, &ko.graph, &ko.modulator, 2, &caps).unwrap());
    assert!(verify_wsm(&ko.graph, &ko.modulator).unwrap());
}

#[test]
fn replacement_shrinks_large_modules_and_preserves_sentences() {
    let caps = Caps::default();
    let mut engine = RepEngine::new();
    // One 8-vertex path module hanging off a 4-cycle through one frontier
    // vertex.
    let mut g = Graph::new(12);
    for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
        g.add_edge(u, v);
    }
    for v in 5..12 {
        g.add_edge(v - 1, v);
    }
    g.add_edge(0, 4);
    let module: BitSet = (4..12).collect();
    let m = SplitModule::of(&g, module).unwrap();
    assert_eq!(m.frontier.to_vec(), vec![4]);
    // The remainder is the 4-cycle, so the target class must admit it.
    let k5_free = ClassDescriptor::Obstructions(ObstructionSet::new(vec![complete(5)]).unwrap());
    let x = WsModulator {
        modules: vec![m],
        c: 1,
        target: k5_free,
    };
    assert!(verify_wsm(&g, &x).unwrap());

    for rounds in [1usize, 2] {
        let ko = replace_modules(&g, &x, rounds, &mut engine, &caps).unwrap();
        assert!(ko.graph.n() < g.n(), "rounds {rounds}");
        assert!(
            q_similarity_holds(&g, &x, &ko.graph, &ko.modulator, rounds, &caps).unwrap(),
            "similarity at {rounds}"
        );
        assert!(verify_wsm(&ko.graph, &ko.modulator).unwrap());
        // Sentences of rank <= rounds transfer.
        for text in [SOME_EDGE, HAS_ISOLATED] {
            let f = parse_formula(text).unwrap();
            if f.quantifier_rank() <= rounds {
                let before = evaluate(&Structure::sentence(g.clone()), &f, DEFAULT_EVAL_LIMIT).unwrap();
                let after =
                    evaluate(&Structure::sentence(ko.graph.clone()), &f, DEFAULT_EVAL_LIMIT).unwrap();
                assert_eq!(before, after, "{text}");
            }
        }
    }
}

#[test]
fn mc_kernel_on_planted_empty_instances() {
    // Planted empty-class instances with at most four modules always sit
    // below the rank-width threshold (rank-width composes through splits
    // and any quotient on <= 4 points has rank-width <= 1), so these
    // exercise the direct-solve branch.
    let caps = Caps::default();
    let phi = parse_formula(THREE_COL).unwrap();
    for seed in 0..12u64 {
        let mut engine = RepEngine::new();
        let (g, x) = gen_planted(seed, 3, 1, 4, &ClassDescriptor::Empty).unwrap();
        let ko = mc_kernel(&g, &phi, &ClassDescriptor::Empty, 1, &mut engine, &caps, DEFAULT_EVAL_LIMIT)
            .unwrap();
        let before = evaluate(&Structure::sentence(g.clone()), &phi, DEFAULT_EVAL_LIMIT).unwrap();
        let after = evaluate(&Structure::sentence(ko.graph.clone()), &phi, DEFAULT_EVAL_LIMIT).unwrap();
        assert_eq!(before, after, "seed {seed}");
        assert!(verify_wsm(&ko.graph, &ko.modulator).unwrap());
        assert!(ko.graph.n() <= x.k().max(1) * caps.size_cap || ko.graph.n() <= 4);
    }
}

#[test]
fn mc_kernel_main_path_on_high_rank_graphs() {
    // Random graphs of rank-width >= 3 go through classes and replacement.
    let caps = Caps::default();
    let phi = parse_formula(THREE_COL).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut main_path = 0;
    while main_path < 5 {
        let n = rng.gen_range(8..=10);
        let g = gnp(&mut rng, n, 0.5);
        if !matches!(
            wsmod_core::rankwidth::rank_width_exact(&g, Some(2), &caps).unwrap(),
            wsmod_core::rankwidth::RankWidth::ExceedsCap
        ) {
            continue;
        }
        main_path += 1;
        let mut engine = RepEngine::new();
        let ko = mc_kernel(&g, &phi, &ClassDescriptor::Empty, 1, &mut engine, &caps, DEFAULT_EVAL_LIMIT)
            .unwrap();
        let before = evaluate(&Structure::sentence(g.clone()), &phi, DEFAULT_EVAL_LIMIT).unwrap();
        let after = evaluate(&Structure::sentence(ko.graph.clone()), &phi, DEFAULT_EVAL_LIMIT).unwrap();
        assert_eq!(before, after);
        assert!(verify_wsm(&ko.graph, &ko.modulator).unwrap());
        assert!(ko.graph.n() <= ko.modulator.k() * caps.size_cap);
    }
}

#[test]
fn mc_kernel_below_threshold_emits_trivial_instance() {
    let caps = Caps::default();
    let mut engine = RepEngine::new();
    let phi = parse_formula(SOME_EDGE).unwrap();
    // A path has rank-width 1 <= c + 1.
    let g = path(9);
    let ko = mc_kernel(&g, &phi, &ClassDescriptor::Empty, 1, &mut engine, &caps, DEFAULT_EVAL_LIMIT)
        .unwrap();
    assert!(ko.graph.n() <= 4);
    let after = evaluate(&Structure::sentence(ko.graph.clone()), &phi, DEFAULT_EVAL_LIMIT).unwrap();
    assert!(after, "P9 has an edge, so must the trivial instance");
    assert!(verify_wsm(&ko.graph, &ko.modulator).unwrap());
}

#[test]
fn forest_kernel_composes_with_protrusion_stage() {
    let caps = Caps::default();
    let phi = parse_formula(HAS_ISOLATED).unwrap();
    let mut engine = RepEngine::new();
    // Rank-width >= 3 core with a planted cyclic module, plus a long pendant
    // path in the remainder... built from the planted forest generator.
    for seed in [1u64, 4, 9] {
        let (g, _) = gen_planted(seed, 2, 1, 4, &ClassDescriptor::Forest).unwrap();
        let ko = mc_kernel(&g, &phi, &ClassDescriptor::Forest, 1, &mut engine, &caps, DEFAULT_EVAL_LIMIT);
        let ko = match ko {
            Ok(ko) => ko,
            Err(wsmod_core::Error::AmbiguousThreshold(_)) => continue,
            Err(e) => panic!("seed {seed}: {e}"),
        };
        let before = evaluate(&Structure::sentence(g.clone()), &phi, DEFAULT_EVAL_LIMIT).unwrap();
        let after = evaluate(&Structure::sentence(ko.graph.clone()), &phi, DEFAULT_EVAL_LIMIT).unwrap();
        assert_eq!(before, after, "seed {seed}");
        assert!(verify_wsm(&ko.graph, &ko.modulator).unwrap(), "seed {seed}");
    }
}

#[test]
fn protrusion_replace_pendant_path() {
    let caps = Caps::default();
    let mut engine = RepEngine::new();
    // C5 with a pendant path of length 10 off vertex 0.
    let mut g = cycle(5);
    let mut big = Graph::new(15);
    for (u, v) in g.edges() {
        big.add_edge(u, v);
    }
    for v in 6..15 {
        big.add_edge(v - 1, v);
    }
    big.add_edge(0, 5);
    g = big;
    let l: BitSet = (5..15).collect();
    let (out, _) = protrusion_replace(&g, &l, 1, &mut engine, &caps, true).unwrap();
    assert!(out.n() < g.n());
    for text in [SOME_EDGE, HAS_ISOLATED] {
        let f = parse_formula(text).unwrap();
        if f.quantifier_rank() <= 1 {
            continue;
        }
    }
    // Rank-2 preservation needs a rank-2 replacement.
    let (out2, _) = protrusion_replace(&g, &l, 2, &mut engine, &caps, true).unwrap();
    for text in [SOME_EDGE, HAS_ISOLATED] {
        let f = parse_formula(text).unwrap();
        let before = evaluate(&Structure::sentence(g.clone()), &f, DEFAULT_EVAL_LIMIT).unwrap();
        let after = evaluate(&Structure::sentence(out2.clone()), &f, DEFAULT_EVAL_LIMIT).unwrap();
        assert_eq!(before, after, "{text}");
    }
}

#[test]
fn protrusion_replace_whole_component() {
    let caps = Caps::default();
    let mut engine = RepEngine::new();
    let g = wsmod_core::graph::disjoint_union(&cycle(4), &path(9));
    let l: BitSet = (4..13).collect();
    let (out, _) = protrusion_replace(&g, &l, 2, &mut engine, &caps, true).unwrap();
    assert!(out.n() < g.n());
    let f = parse_formula(HAS_ISOLATED).unwrap();
    assert_eq!(
        evaluate(&Structure::sentence(g.clone()), &f, DEFAULT_EVAL_LIMIT).unwrap(),
        evaluate(&Structure::sentence(out), &f, DEFAULT_EVAL_LIMIT).unwrap()
    );
}

#[test]
fn fvs_bd_kernel_tree_input_shrinks_to_constant() {
    let caps = Caps::default();
    let mut engine = RepEngine::new();
    let phi = parse_formula(HAS_ISOLATED).unwrap();
    let g = wsmod_core::gen::random_tree(&mut ChaCha8Rng::seed_from_u64(3), 18);
    let ko = fvs_bd_kernel(&g, &phi, 17, &mut engine, &caps).unwrap();
    assert!(ko.graph.n() <= caps.size_cap, "tree should collapse, got {}", ko.graph.n());
    assert_eq!(
        evaluate(&Structure::sentence(g), &phi, DEFAULT_EVAL_LIMIT).unwrap(),
        evaluate(&Structure::sentence(ko.graph), &phi, DEFAULT_EVAL_LIMIT).unwrap()
    );
}

#[test]
fn fvs_bd_kernel_cycle_with_pendant_path() {
    let caps = Caps::default();
    let mut engine = RepEngine::new();
    let phi = parse_formula(SOME_EDGE).unwrap();
    let g = wsmod_core::gen::gen_cycle_with_pendants(5, 5, 1, 12);
    assert!(g.max_degree() <= 4);
    let ko = fvs_bd_kernel(&g, &phi, 4, &mut engine, &caps).unwrap();
    assert!(ko.graph.n() < g.n());
    assert!(verify_wsm(&ko.graph, &ko.modulator).unwrap());
    assert_eq!(
        evaluate(&Structure::sentence(g), &phi, DEFAULT_EVAL_LIMIT).unwrap(),
        evaluate(&Structure::sentence(ko.graph), &phi, DEFAULT_EVAL_LIMIT).unwrap()
    );
}

#[test]
fn fvs_bd_kernel_rejects_degree_violation() {
    let caps = Caps::default();
    let mut engine = RepEngine::new();
    let phi = parse_formula(SOME_EDGE).unwrap();
    assert!(matches!(
        fvs_bd_kernel(&complete(6), &phi, 4, &mut engine, &caps),
        Err(wsmod_core::Error::Contract(_))
    ));
}

/// Minimum annotated weight over satisfying sets of the kernel.
fn min_weight(ko: &wsmod_core::kernel::KernelOutput, phi: &wsmod_core::mso::MsoFormula) -> Option<BigUint> {
    let ann = ko.annotation.as_ref().unwrap();
    let n = ko.graph.n();
    let mut best: Option<BigUint> = None;
    for mask in 0u64..(1 << n) {
        let z = BitSet::from_mask(mask);
        let s = Structure::with_sets(ko.graph.clone(), vec![z.clone()]);
        if evaluate(&s, phi, DEFAULT_EVAL_LIMIT).unwrap() {
            let w = ann.value(&z);
            best = Some(match best {
                None => w,
                Some(b) => b.min(w),
            });
        }
    }
    best
}

#[test]
fn annotated_kernel_preserves_optimum() {
    let caps = Caps::default();
    for (text, seeds) in [(VC, [2u64, 5, 8]), (DOMSET, [3u64, 6, 12])] {
        let phi = parse_formula(text).unwrap();
        for seed in seeds {
            let mut engine = RepEngine::new();
            let (g, _) = gen_planted(seed, 3, 1, 3, &ClassDescriptor::Empty).unwrap();
            let classes = match sim_c_classes(&g, 1, &caps) {
                Ok(p) => p,
                Err(wsmod_core::Error::AmbiguousThreshold(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            if classes.classes.iter().any(|cl| cl.len() > 6) {
                continue;
            }
            let modules = classes
                .classes
                .iter()
                .map(|cl| SplitModule::of(&g, cl.clone()).unwrap())
                .collect();
            let x = WsModulator {
                modules,
                c: 1,
                target: ClassDescriptor::Empty,
            };
            let budget = BigUint::from(g.n());
            let ko = opt_annotated_kernel(&g, &x, &phi, &budget, &mut engine, &caps).unwrap();
            let oracle = exact_opt_mso(&g, &phi, OptDirection::Min).unwrap();
            let kernel_min = min_weight(&ko, &phi);
            assert_eq!(
                oracle.map(BigUint::from),
                kernel_min,
                "seed {seed} formula {text}"
            );
        }
    }
}

#[test]
fn winwin_direct_branch_matches_oracle() {
    let caps = Caps::default();
    let phi = parse_formula(VC).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut decided = 0;
    for _ in 0..20 {
        let n = rng.gen_range(4..=9);
        let g = gnp(&mut rng, n, 0.45);
        let opt = exact_opt_mso(&g, &phi, OptDirection::Min).unwrap();
        for r in [1usize, 2, n / 2, n] {
            let mut engine = RepEngine::new();
            let budget = BigUint::from(r);
            let out = opt_winwin(&g, &phi, &budget, 1, &mut engine, &caps, DEFAULT_EVAL_LIMIT);
            let out = match out {
                Ok(o) => o,
                Err(wsmod_core::Error::AmbiguousThreshold(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            let want = opt.map_or(false, |o| o <= r);
            match out {
                OptOutcome::Decided { answer, kernel } => {
                    assert_eq!(answer, want, "n {n} r {r}");
                    decided += 1;
                    // The trivial instance carries the same answer.
                    let ann = kernel.annotation.as_ref().unwrap();
                    let kb = kernel.budget.as_ref().unwrap();
                    let mut any = false;
                    for mask in 0u64..(1 << kernel.graph.n()) {
                        let z = BitSet::from_mask(mask);
                        if ann.value(&z) > *kb {
                            continue;
                        }
                        let s = Structure::with_sets(kernel.graph.clone(), vec![z]);
                        if evaluate(&s, &phi, DEFAULT_EVAL_LIMIT).unwrap() {
                            any = true;
                            break;
                        }
                    }
                    assert_eq!(any, want, "trivial instance mismatch");
                }
                OptOutcome::Kernel(_) => {}
            }
        }
    }
    assert!(decided > 0, "direct branch never exercised");
}

#[test]
fn kernel_serialization_roundtrip() {
    let caps = Caps::default();
    let mut engine = RepEngine::new();
    let phi = parse_formula(VC).unwrap();
    let (g, x) = gen_planted(4, 2, 1, 3, &ClassDescriptor::Empty).unwrap();
    if matches!(sim_c_classes(&g, 1, &caps), Err(_)) {
        return;
    }
    let budget = BigUint::from(3u32);
    let ko = opt_annotated_kernel(&g, &x, &phi, &budget, &mut engine, &caps).unwrap();
    let (gr, ann) = ko.to_gr();
    let g2 = Graph::parse_gr(&gr).unwrap();
    assert_eq!(g2, ko.graph);
    let (ann2, budget2) = parse_annotation(&ann.unwrap()).unwrap();
    assert_eq!(ann2, ko.annotation.unwrap());
    assert_eq!(budget2, Some(budget));
}

#[test]
fn forest_and_obstruction_ratios_on_seeded_instances() {
    let caps = Caps::default();
    let p3 = ObstructionSet::new(vec![path(3)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut tested = 0;
    for _ in 0..40 {
        let n = rng.gen_range(6..=10);
        let g = gnp(&mut rng, n, 0.4);
        let forest = wsm_forest_3approx(&g, 1, &caps);
        match forest {
            Ok(x) => {
                assert!(verify_wsm(&g, &x).unwrap());
                let opt = exact_wsn(&g, 1, &ClassDescriptor::Forest, &caps).unwrap();
                assert!(x.k() <= 3 * opt.max(0), "forest ratio: {} vs {opt}", x.k());
                tested += 1;
            }
            Err(wsmod_core::Error::AmbiguousThreshold(_)) => {}
            Err(e) => panic!("{e}"),
        }
        let cluster = wsm_obstruction_approx(&g, 1, &p3, &caps);
        match cluster {
            Ok(x) => {
                assert!(verify_wsm(&g, &x).unwrap());
                let opt = exact_wsn(
                    &g,
                    1,
                    &ClassDescriptor::Obstructions(p3.clone()),
                    &caps,
                )
                .unwrap();
                assert!(x.k() <= 3 * opt, "cluster ratio: {} vs {opt}", x.k());
            }
            Err(wsmod_core::Error::AmbiguousThreshold(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(tested > 5, "not enough above-threshold instances");
}

#[test]
fn vc_gap_family_values() {
    let caps = Caps::default();
    let p7 = gen_vc_gap_family(3);
    let vc = parse_formula(VC).unwrap();
    assert_eq!(exact_opt_mso(&p7, &vc, OptDirection::Min).unwrap(), Some(3));
    let k2 = ObstructionSet::new(vec![complete(2)]).unwrap();
    assert_eq!(
        exact_wsn(&p7, 1, &ClassDescriptor::Obstructions(k2), &caps).unwrap(),
        1
    );
}

#[test]
fn long_cycle_lemma_on_seeded_graphs() {
    // Wherever a cycle meets at least three classes, one with frontier of
    // size at least two, some cycle confined to at most three of those
    // classes exists.
    let caps = Caps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut hypothesis_seen = 0;
    for _ in 0..60 {
        let n = rng.gen_range(6..=10);
        let g = gnp(&mut rng, n, 0.35);
        let part = match sim_c_classes(&g, 1, &caps) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let cycles = all_cycles(&g);
        for cyc in &cycles {
            let touched: Vec<usize> = part
                .classes
                .iter()
                .enumerate()
                .filter(|(_, cl)| cl.intersects(cyc))
                .map(|(i, _)| i)
                .collect();
            if touched.len() < 3 {
                continue;
            }
            let has_fat_frontier = touched.iter().any(|&i| {
                frontier(&g, &part.classes[i]).map_or(false, |f| f.len() >= 2)
            });
            if !has_fat_frontier {
                continue;
            }
            hypothesis_seen += 1;
            let witness = cycles.iter().any(|c2| {
                let t2: Vec<usize> = part
                    .classes
                    .iter()
                    .enumerate()
                    .filter(|(_, cl)| cl.intersects(c2))
                    .map(|(i, _)| i)
                    .collect();
                t2.len() <= 3 && t2.iter().all(|i| touched.contains(i))
            });
            assert!(witness, "no short cycle inside {touched:?}");
        }
    }
    assert!(hypothesis_seen > 0, "hypothesis never triggered");
}

#[test]
fn after_step_two_cycles_live_on_frontiers() {
    // Once the class-union cycle fixpoint is done, every vertex of every
    // remaining cycle is a frontier vertex of its class in the remaining
    // graph.
    let caps = Caps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut remainders_with_cycles = 0;
    for _ in 0..60 {
        let n = rng.gen_range(6..=10);
        let g = gnp(&mut rng, n, 0.35);
        let part = match sim_c_classes(&g, 1, &caps) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let (_, remaining) = wsmod_core::wsm::forest_step2_fixpoint(&g, &part.classes).unwrap();
        let alive: BitSet = remaining
            .iter()
            .flat_map(|&i| part.classes[i].iter())
            .collect();
        let (h, map) = g.induced_subgraph(&alive).unwrap();
        for cyc in all_cycles(&h) {
            remainders_with_cycles += 1;
            for v in cyc.iter() {
                let orig = map.new_to_old[v];
                let class = remaining
                    .iter()
                    .find(|&&i| part.classes[i].contains(orig))
                    .expect("vertex in some remaining class");
                let class_local = map.image(&part.classes[*class]);
                let f = frontier(&h, &class_local).expect("classes stay split-modules");
                assert!(f.contains(v), "cycle vertex off the frontier");
            }
        }
    }
    assert!(remainders_with_cycles > 0, "no remainder had cycles");
}

/// All simple cycles (as vertex sets) of a small graph.
fn all_cycles(g: &Graph) -> Vec<BitSet> {
    let n = g.n();
    let mut out: std::collections::HashSet<BitSet> = Default::default();
    // Paths starting at the minimum vertex of the cycle.
    fn dfs(
        g: &Graph,
        start: usize,
        cur: usize,
        path: &mut Vec<usize>,
        on_path: &mut BitSet,
        out: &mut std::collections::HashSet<BitSet>,
    ) {
        for w in g.neighbors(cur).iter() {
            if w == start && path.len() >= 3 {
                out.insert(path.iter().copied().collect());
            }
            if w > start && !on_path.contains(w) {
                path.push(w);
                on_path.insert(w);
                dfs(g, start, w, path, on_path, out);
                on_path.remove(w);
                path.pop();
            }
        }
    }
    for s in 0..n {
        let mut path = vec![s];
        let mut on_path = BitSet::from_iter([s]);
        dfs(g, s, s, &mut path, &mut on_path, &mut out);
    }
    out.into_iter().collect()
}
