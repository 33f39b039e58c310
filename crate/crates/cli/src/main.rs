//! Command-line surface: structural analysis (rank-width, splits, classes),
//! modulator approximation, kernelization, optimization, and instance
//! generation. Reports are line-oriented `key: value` text; every success
//! path re-verifies its own output and prints `verify: ok`.
//!
//! Exit codes: 0/1 carry yes/no verdicts for decision runs, 2 is a usage or
//! input-format error, 3 a capacity limit, 4 a contract or internal
//! invariant violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;

use wsmod_core::bits::BitSet;
use wsmod_core::caps::{Caps, DEFAULT_EVAL_LIMIT};
use wsmod_core::gen::{gen_cycle_with_pendants, gen_planted, gen_vc_gap_family};
use wsmod_core::graph::Graph;
use wsmod_core::kernel::{mc_kernel, opt_winwin, KernelOutput, OptOutcome};
use wsmod_core::mso::{evaluate, parse_formula, MsoFormula, RepEngine, Structure};
use wsmod_core::rankwidth::{cut_rank, rank_width_exact, RankWidth};
use wsmod_core::splitmod::{sim_c_classes, split_decomposition, BagKind, Slot};
use wsmod_core::wsm::{
    verify_wsm, wsm_forest_3approx, wsm_obstruction_approx, ClassDescriptor, ObstructionSet,
    WsModulator,
};
use wsmod_core::Error;

#[derive(Parser)]
#[command(name = "wsmod", version, about = "well-structured modulators and MSO kernels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Rank-width bound for modules and classes.
    #[arg(short = 'c', global = true, default_value_t = 1)]
    c: usize,
    /// Seed for generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Exact rank-width vertex limit.
    #[arg(long = "cap-rw", global = true, default_value_t = 16)]
    cap_rw: usize,
    /// Game budget anchor (vertices at three rounds).
    #[arg(long = "cap-game", global = true, default_value_t = 9)]
    cap_game: usize,
    /// Representative size cap.
    #[arg(long = "cap-size", global = true, default_value_t = 6)]
    cap_size: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact rank-width with a witness decomposition.
    Rankwidth { graph: PathBuf },
    /// Cut-rank of a vertex set (1-indexed members).
    Cutrank {
        graph: PathBuf,
        vertices: Vec<usize>,
    },
    /// Canonical split decomposition.
    Splits { graph: PathBuf },
    /// Partition into maximal split-modules of rank-width <= c.
    Classes { graph: PathBuf },
    /// Approximate a well-structured modulator to a class.
    Wsm {
        #[arg(long)]
        class: String,
        graph: PathBuf,
    },
    /// Model-checking kernel for a sentence.
    Kernel {
        #[arg(long)]
        class: String,
        #[arg(long)]
        formula: PathBuf,
        graph: PathBuf,
        #[arg(short)]
        output: Option<PathBuf>,
    },
    /// Decide or kernelize a <=-optimization instance.
    Opt {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        budget: String,
        graph: PathBuf,
        #[arg(short)]
        output: Option<PathBuf>,
    },
    /// Inspect an instance and optionally model-check a sentence on it.
    Check {
        graph: PathBuf,
        #[arg(long)]
        formula: Option<PathBuf>,
    },
    /// Instance generators.
    Gen {
        #[command(subcommand)]
        what: GenCmd,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    /// Graph with k planted split-modules wired to a member of the class.
    Planted {
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        module_size: usize,
        #[arg(long)]
        class: String,
        #[arg(short)]
        output: Option<PathBuf>,
    },
    /// The path on 2i+1 vertices (large vertex cover, tiny modulator).
    Vcgap {
        i: usize,
        #[arg(short)]
        output: Option<PathBuf>,
    },
    /// A cycle with long pendant trees, maximum degree 4.
    CyclePendants {
        #[arg(long, default_value_t = 6)]
        cycle_len: usize,
        #[arg(long, default_value_t = 2)]
        pendants: usize,
        #[arg(long, default_value_t = 8)]
        pendant_len: usize,
        #[arg(short)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = Caps {
        exact_rw_limit: cli.cap_rw,
        game_limit: cli.cap_game,
        size_cap: cli.cap_size,
    };
    match run(&cli, &caps) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parse { .. } => 2u8,
                Error::Capacity(_) | Error::RepSearchExhausted { .. } => 3,
                Error::Contract(_) | Error::Invariant(_) | Error::AmbiguousThreshold(_) => 4,
                Error::Io(_) => 2,
            })
        }
    }
}

fn load_graph(path: &Path) -> Result<Graph, Error> {
    let text = std::fs::read_to_string(path)?;
    Graph::parse_gr(&text)
}

fn load_formula(path: &Path) -> Result<MsoFormula, Error> {
    let text = std::fs::read_to_string(path)?;
    parse_formula(&text)
}

fn parse_class(spec: &str) -> Result<ClassDescriptor, Error> {
    match spec {
        "forest" => Ok(ClassDescriptor::Forest),
        "edgeless" => Ok(ClassDescriptor::Edgeless),
        "empty" => Ok(ClassDescriptor::Empty),
        other => {
            let path = other.strip_prefix("obstructions:").ok_or_else(|| {
                Error::contract(format!(
                    "unknown class \"{other}\"; expected forest|edgeless|empty|obstructions:<path>"
                ))
            })?;
            let p = Path::new(path);
            let mut graphs = Vec::new();
            if p.is_dir() {
                let mut entries: Vec<PathBuf> = std::fs::read_dir(p)?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|x| x == "gr"))
                    .collect();
                entries.sort();
                for entry in entries {
                    graphs.push(load_graph(&entry)?);
                }
            } else {
                let text = std::fs::read_to_string(p)?;
                graphs.extend(Graph::parse_multi_gr(&text)?);
            }
            Ok(ClassDescriptor::Obstructions(ObstructionSet::new(graphs)?))
        }
    }
}

fn fmt_set(s: &BitSet) -> String {
    let v: Vec<String> = s.iter().map(|v| (v + 1).to_string()).collect();
    if v.is_empty() {
        "-".into()
    } else {
        v.join(" ")
    }
}

fn print_modulator(x: &WsModulator) {
    println!("modules: {}", x.k());
    for m in &x.modules {
        println!("module: {}", fmt_set(&m.vertices));
        println!("frontier: {}", fmt_set(&m.frontier));
    }
}

fn write_kernel_files(ko: &KernelOutput, out: &Path) -> Result<(), Error> {
    let (gr, ann) = ko.to_gr();
    std::fs::write(out, gr)?;
    println!("wrote: {}", out.display());
    if let Some(ann) = ann {
        let sidecar = out.with_extension("ann");
        std::fs::write(&sidecar, ann)?;
        println!("wrote: {}", sidecar.display());
    }
    Ok(())
}

fn run(cli: &Cli, caps: &Caps) -> Result<ExitCode, Error> {
    match &cli.cmd {
        Cmd::Rankwidth { graph } => {
            let g = load_graph(graph)?;
            println!("n: {}", g.n());
            println!("m: {}", g.edge_count());
            match rank_width_exact(&g, None, caps)? {
                RankWidth::Exact { width, witness } => {
                    println!("rankwidth: {width}");
                    let mut ok = true;
                    if let Some(w) = witness {
                        for (a, b) in w.tree_edges() {
                            println!("tree-edge: {} {}", a + 1, b + 1);
                        }
                        for node in 0..w.node_count() {
                            if let Some(v) = w.leaf_vertex(node) {
                                println!("leaf: {} {}", node + 1, v + 1);
                            }
                        }
                        ok = w.validate(&g)? == width;
                    }
                    verify(ok)?;
                }
                RankWidth::ExceedsCap => unreachable!("no cap given"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Cutrank { graph, vertices } => {
            let g = load_graph(graph)?;
            let mut u = BitSet::new();
            for &v in vertices {
                if v == 0 || v > g.n() {
                    return Err(Error::contract(format!(
                        "vertex {v} out of range 1..={}",
                        g.n()
                    )));
                }
                u.insert(v - 1);
            }
            let r = cut_rank(&g, &u);
            println!("cutrank: {r}");
            verify(cut_rank(&g, &u.complement(g.n())) == r)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Splits { graph } => {
            let g = load_graph(graph)?;
            let trees = split_decomposition(&g)?;
            println!("components: {}", trees.len());
            for (ti, tree) in trees.iter().enumerate() {
                println!("component: {}", ti + 1);
                for (bi, bag) in tree.bags.iter().enumerate() {
                    let kind = match bag.kind {
                        BagKind::Prime => "prime",
                        BagKind::Clique => "clique",
                        BagKind::Star => "star",
                    };
                    let leaves: Vec<String> = bag
                        .slots
                        .iter()
                        .filter_map(|s| match s {
                            Slot::Vertex(v) => Some((v + 1).to_string()),
                            Slot::Marker(_) => None,
                        })
                        .collect();
                    println!(
                        "bag: {} kind {} size {} vertices {}",
                        bi + 1,
                        kind,
                        bag.slots.len(),
                        if leaves.is_empty() { "-".into() } else { leaves.join(" ") }
                    );
                }
                for (s1, s2) in &tree.edges {
                    println!("bag-edge: {} {}", s1.bag + 1, s2.bag + 1);
                }
            }
            let rebuilt = wsmod_core::splitmod::recompose_forest(&trees, g.n());
            verify(rebuilt == g)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Classes { graph } => {
            let g = load_graph(graph)?;
            let part = sim_c_classes(&g, cli.c, caps)?;
            println!("n: {}", g.n());
            println!("c: {}", cli.c);
            println!("classes: {}", part.classes.len());
            for cl in &part.classes {
                println!("class: {}", fmt_set(cl));
            }
            let mut cover = BitSet::new();
            let mut ok = true;
            for cl in &part.classes {
                ok &= !cl.intersects(&cover);
                cover.union_with(cl);
                ok &= wsmod_core::splitmod::is_split_module(&g, cl);
            }
            ok &= cover == g.vertex_set();
            verify(ok)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Wsm { class, graph } => {
            let g = load_graph(graph)?;
            let class = parse_class(class)?;
            let x = match &class {
                ClassDescriptor::Forest => wsm_forest_3approx(&g, cli.c, caps)?,
                ClassDescriptor::Edgeless => {
                    let k2 = ObstructionSet::new(vec![wsmod_core::graph::complete(2)])?;
                    let mut x = wsm_obstruction_approx(&g, cli.c, &k2, caps)?;
                    x.target = ClassDescriptor::Edgeless;
                    x
                }
                ClassDescriptor::Obstructions(obs) => {
                    wsm_obstruction_approx(&g, cli.c, obs, caps)?
                }
                ClassDescriptor::Empty => {
                    let part = sim_c_classes(&g, cli.c, caps)?;
                    let modules = part
                        .classes
                        .into_iter()
                        .map(|cl| wsmod_core::splitmod::SplitModule::of(&g, cl))
                        .collect::<Result<Vec<_>, _>>()?;
                    WsModulator {
                        modules,
                        c: cli.c,
                        target: ClassDescriptor::Empty,
                    }
                }
            };
            println!("class: {}", x.target.name());
            print_modulator(&x);
            verify(verify_wsm(&g, &x)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Kernel {
            class,
            formula,
            graph,
            output,
        } => {
            let g = load_graph(graph)?;
            let class = parse_class(class)?;
            let phi = load_formula(formula)?;
            let mut engine = RepEngine::new();
            let ko = mc_kernel(&g, &phi, &class, cli.c, &mut engine, caps, DEFAULT_EVAL_LIMIT)?;
            println!("input-n: {}", g.n());
            println!("kernel-n: {}", ko.graph.n());
            println!("modules: {}", ko.modulator.k());
            if let Some(out) = output {
                write_kernel_files(&ko, out)?;
            }
            verify(verify_wsm(&ko.graph, &ko.modulator)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Opt {
            formula,
            budget,
            graph,
            output,
        } => {
            let g = load_graph(graph)?;
            let phi = load_formula(formula)?;
            let r: BigUint = budget
                .parse()
                .map_err(|_| Error::contract(format!("bad budget \"{budget}\"")))?;
            let mut engine = RepEngine::new();
            match opt_winwin(&g, &phi, &r, cli.c, &mut engine, caps, DEFAULT_EVAL_LIMIT)? {
                OptOutcome::Decided { answer, kernel } => {
                    println!("branch: direct");
                    println!("verdict: {}", if answer { "yes" } else { "no" });
                    if let Some(out) = output {
                        write_kernel_files(&kernel, out)?;
                    }
                    // The trivial instance must reproduce the verdict.
                    let ann = kernel.annotation.as_ref().expect("annotated");
                    let kb = kernel.budget.as_ref().expect("budgeted");
                    let mut any = false;
                    for mask in 0u64..(1 << kernel.graph.n()) {
                        let z = BitSet::from_mask(mask);
                        if ann.value(&z) > *kb {
                            continue;
                        }
                        let s = Structure::with_sets(kernel.graph.clone(), vec![z]);
                        if evaluate(&s, &phi, DEFAULT_EVAL_LIMIT)? {
                            any = true;
                            break;
                        }
                    }
                    verify(any == answer)?;
                    Ok(if answer {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    })
                }
                OptOutcome::Kernel(ko) => {
                    println!("branch: kernel");
                    println!("kernel-n: {}", ko.graph.n());
                    println!(
                        "triples: {}",
                        ko.annotation.as_ref().map_or(0, |a| a.triples.len())
                    );
                    if let Some(out) = output {
                        write_kernel_files(&ko, out)?;
                    }
                    verify(verify_wsm(&ko.graph, &ko.modulator)?)?;
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Cmd::Check { graph, formula } => {
            let g = load_graph(graph)?;
            println!("n: {}", g.n());
            println!("m: {}", g.edge_count());
            println!("components: {}", g.connected_components().len());
            println!("acyclic: {}", if g.is_acyclic() { "yes" } else { "no" });
            println!("max-degree: {}", g.max_degree());
            match formula {
                None => {
                    verify(true)?;
                    Ok(ExitCode::SUCCESS)
                }
                Some(f) => {
                    let phi = load_formula(f)?;
                    println!("quantifier-rank: {}", phi.quantifier_rank());
                    println!("free-set-vars: {}", phi.free_set_vars.join(" "));
                    if !phi.is_sentence() {
                        return Err(Error::contract(
                            "check needs a sentence to produce a verdict",
                        ));
                    }
                    let ans = evaluate(&Structure::sentence(g), &phi, DEFAULT_EVAL_LIMIT)?;
                    println!("answer: {}", if ans { "yes" } else { "no" });
                    verify(true)?;
                    Ok(if ans {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    })
                }
            }
        }
        Cmd::Gen { what } => run_gen(cli, what),
    }
}

fn run_gen(cli: &Cli, what: &GenCmd) -> Result<ExitCode, Error> {
    match what {
        GenCmd::Planted {
            k,
            module_size,
            class,
            output,
        } => {
            let class = parse_class(class)?;
            let (g, x) = gen_planted(cli.seed, *k, cli.c, *module_size, &class)?;
            println!("n: {}", g.n());
            println!("m: {}", g.edge_count());
            print_modulator(&x);
            if let Some(out) = output {
                let comments: Vec<String> = x
                    .modules
                    .iter()
                    .enumerate()
                    .map(|(i, m)| format!("planted module {} {}", i + 1, fmt_set(&m.vertices)))
                    .collect();
                std::fs::write(out, g.write_gr(&comments))?;
                println!("wrote: {}", out.display());
            }
            verify(verify_wsm(&g, &x)?)?;
            Ok(ExitCode::SUCCESS)
        }
        GenCmd::Vcgap { i, output } => {
            let g = gen_vc_gap_family(*i);
            println!("n: {}", g.n());
            if let Some(out) = output {
                std::fs::write(out, g.write_gr(&[]))?;
                println!("wrote: {}", out.display());
            }
            verify(g.is_acyclic() && g.is_connected())?;
            Ok(ExitCode::SUCCESS)
        }
        GenCmd::CyclePendants {
            cycle_len,
            pendants,
            pendant_len,
            output,
        } => {
            let g = gen_cycle_with_pendants(cli.seed, *cycle_len, *pendants, *pendant_len);
            println!("n: {}", g.n());
            println!("max-degree: {}", g.max_degree());
            if let Some(out) = output {
                std::fs::write(out, g.write_gr(&[]))?;
                println!("wrote: {}", out.display());
            }
            verify(g.max_degree() <= 4)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn verify(ok: bool) -> Result<(), Error> {
    if ok {
        println!("verify: ok");
        Ok(())
    } else {
        Err(Error::invariant("self-check failed on own output"))
    }
}
