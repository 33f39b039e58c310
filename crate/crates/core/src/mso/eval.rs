//! Model checking under standard MSO semantics.
//!
//! [`evaluate`] is the production route: point quantifiers expand over the
//! vertices while set quantifiers are eliminated symbolically on BDDs, one
//! boolean variable per (quantifier depth, vertex) pair. [`evaluate_naive`]
//! expands set quantifiers by full 2^n enumeration; it is kept as the
//! independent reference the test suites compare against.

use biodivine_lib_bdd::{Bdd, BddVariable, BddVariableSet};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::mso::ast::{MsoFormula, Node, PointRef, SetRef};

/// A graph together with interpretations for free set and point variables.
#[derive(Debug, Clone)]
pub struct Structure {
    pub graph: Graph,
    pub set_interp: Vec<VertexSet>,
    pub point_interp: Vec<usize>,
}

impl Structure {
    pub fn sentence(graph: Graph) -> Self {
        Structure {
            graph,
            set_interp: Vec::new(),
            point_interp: Vec::new(),
        }
    }

    pub fn with_sets(graph: Graph, sets: Vec<VertexSet>) -> Self {
        Structure {
            graph,
            set_interp: sets,
            point_interp: Vec::new(),
        }
    }

    fn check_arity(&self, f: &MsoFormula) -> Result<()> {
        if self.set_interp.len() != f.free_set_vars.len()
            || self.point_interp.len() != f.free_point_vars.len()
        {
            return Err(Error::contract(format!(
                "arity mismatch: formula has {} free set / {} free point variables, \
                 structure interprets {} / {}",
                f.free_set_vars.len(),
                f.free_point_vars.len(),
                self.set_interp.len(),
                self.point_interp.len()
            )));
        }
        if let Some(v) = self
            .point_interp
            .iter()
            .copied()
            .chain(self.set_interp.iter().flat_map(|s| s.iter()))
            .find(|&v| v >= self.graph.n())
        {
            return Err(Error::contract(format!(
                "interpretation vertex {v} out of range"
            )));
        }
        Ok(())
    }
}

/// BDD node-count guard; symbolic intermediates above this abort with a
/// capacity error.
const BDD_NODE_LIMIT: usize = 1 << 21;

/// Truth of `f` in `s`. The vertex count must be within `limit`.
pub fn evaluate(s: &Structure, f: &MsoFormula, limit: usize) -> Result<bool> {
    s.check_arity(f)?;
    let n = s.graph.n();
    if n > limit {
        return Err(Error::capacity(format!(
            "evaluate: n = {n} exceeds the brute-force limit {limit}"
        )));
    }
    let depth = f.set_quantifier_depth();
    let vars = BddVariableSet::new_anonymous((depth * n).max(1) as u16);
    let all_vars = vars.variables();
    let var_ids: Vec<&[BddVariable]> = (0..depth).map(|d| &all_vars[d * n..(d + 1) * n]).collect();
    let mut ev = SymbolicEval {
        s,
        vars: &vars,
        var_ids: &var_ids,
        points: Vec::new(),
    };
    let bdd = ev.translate(&f.root, 0)?;
    debug_assert!(bdd.is_true() || bdd.is_false());
    Ok(bdd.is_true())
}

struct SymbolicEval<'a> {
    s: &'a Structure,
    vars: &'a BddVariableSet,
    var_ids: &'a [&'a [BddVariable]],
    points: Vec<usize>,
}

impl<'a> SymbolicEval<'a> {
    fn point(&self, r: PointRef) -> usize {
        match r {
            PointRef::Free(i) => self.s.point_interp[i],
            PointRef::Bound(d) => self.points[d],
        }
    }

    fn guard(&self, bdd: Bdd) -> Result<Bdd> {
        if bdd.size() > BDD_NODE_LIMIT {
            return Err(Error::capacity(format!(
                "evaluate: symbolic intermediate grew past {BDD_NODE_LIMIT} nodes"
            )));
        }
        Ok(bdd)
    }

    fn translate(&mut self, node: &Node, set_depth: usize) -> Result<Bdd> {
        let n = self.s.graph.n();
        Ok(match node {
            Node::Edge(x, y) => self.constant(self.s.graph.has_edge(self.point(*x), self.point(*y))),
            Node::Eq(x, y) => self.constant(self.point(*x) == self.point(*y)),
            Node::Member(set, x) => {
                let v = self.point(*x);
                match set {
                    SetRef::Free(i) => self.constant(self.s.set_interp[*i].contains(v)),
                    SetRef::Bound(d) => self.vars.mk_var(self.var_ids[*d][v]),
                }
            }
            Node::Not(a) => self.translate(a, set_depth)?.not(),
            Node::And(a, b) => {
                let l = self.translate(a, set_depth)?;
                if l.is_false() {
                    return Ok(l);
                }
                let r = self.translate(b, set_depth)?;
                self.guard(l.and(&r))?
            }
            Node::Or(a, b) => {
                let l = self.translate(a, set_depth)?;
                if l.is_true() {
                    return Ok(l);
                }
                let r = self.translate(b, set_depth)?;
                self.guard(l.or(&r))?
            }
            Node::Implies(a, b) => {
                let l = self.translate(a, set_depth)?;
                if l.is_false() {
                    return Ok(self.constant(true));
                }
                let r = self.translate(b, set_depth)?;
                self.guard(l.imp(&r))?
            }
            Node::ExistsPoint(body) => {
                let mut acc = self.constant(false);
                for v in 0..n {
                    self.points.push(v);
                    let b = self.translate(body, set_depth);
                    self.points.pop();
                    acc = self.guard(acc.or(&b?))?;
                    if acc.is_true() {
                        break;
                    }
                }
                acc
            }
            Node::ForallPoint(body) => {
                let mut acc = self.constant(true);
                for v in 0..n {
                    self.points.push(v);
                    let b = self.translate(body, set_depth);
                    self.points.pop();
                    acc = self.guard(acc.and(&b?))?;
                    if acc.is_false() {
                        break;
                    }
                }
                acc
            }
            Node::ExistsSet(body) => {
                let inner = self.translate(body, set_depth + 1)?;
                self.guard(inner.exists(self.var_ids[set_depth]))?
            }
            Node::ForallSet(body) => {
                let inner = self.translate(body, set_depth + 1)?;
                self.guard(inner.for_all(self.var_ids[set_depth]))?
            }
        })
    }

    fn constant(&self, b: bool) -> Bdd {
        if b {
            self.vars.mk_true()
        } else {
            self.vars.mk_false()
        }
    }
}

/// Default step budget for [`evaluate_naive`].
pub const NAIVE_BUDGET: u64 = 50_000_000;

/// Reference evaluator: every quantifier, set quantifiers included, expands
/// by explicit enumeration. Aborts with a capacity error once `budget`
/// recursion steps are spent.
pub fn evaluate_naive(s: &Structure, f: &MsoFormula, budget: u64) -> Result<bool> {
    s.check_arity(f)?;
    if s.graph.n() > 63 {
        return Err(Error::capacity("evaluate_naive: n > 63"));
    }
    let mut ctx = NaiveCtx {
        s,
        steps: 0,
        budget,
        sets: Vec::new(),
        points: Vec::new(),
    };
    ctx.eval(&f.root)
}

struct NaiveCtx<'a> {
    s: &'a Structure,
    steps: u64,
    budget: u64,
    sets: Vec<BitSet>,
    points: Vec<usize>,
}

impl<'a> NaiveCtx<'a> {
    fn point(&self, r: PointRef) -> usize {
        match r {
            PointRef::Free(i) => self.s.point_interp[i],
            PointRef::Bound(d) => self.points[d],
        }
    }

    fn eval(&mut self, node: &Node) -> Result<bool> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::capacity(
                "evaluate_naive: expansion budget exhausted",
            ));
        }
        let n = self.s.graph.n();
        Ok(match node {
            Node::Edge(x, y) => self.s.graph.has_edge(self.point(*x), self.point(*y)),
            Node::Eq(x, y) => self.point(*x) == self.point(*y),
            Node::Member(set, x) => {
                let v = self.point(*x);
                match set {
                    SetRef::Free(i) => self.s.set_interp[*i].contains(v),
                    SetRef::Bound(d) => self.sets[*d].contains(v),
                }
            }
            Node::Not(a) => !self.eval(a)?,
            Node::And(a, b) => self.eval(a)? && self.eval(b)?,
            Node::Or(a, b) => self.eval(a)? || self.eval(b)?,
            Node::Implies(a, b) => !self.eval(a)? || self.eval(b)?,
            Node::ExistsPoint(body) => {
                let mut hit = false;
                for v in 0..n {
                    self.points.push(v);
                    let r = self.eval(body);
                    self.points.pop();
                    if r? {
                        hit = true;
                        break;
                    }
                }
                hit
            }
            Node::ForallPoint(body) => {
                let mut ok = true;
                for v in 0..n {
                    self.points.push(v);
                    let r = self.eval(body);
                    self.points.pop();
                    if !r? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
            Node::ExistsSet(body) => {
                let mut hit = false;
                for mask in 0u64..(1 << n) {
                    self.sets.push(BitSet::from_mask(mask));
                    let r = self.eval(body);
                    self.sets.pop();
                    if r? {
                        hit = true;
                        break;
                    }
                }
                hit
            }
            Node::ForallSet(body) => {
                let mut ok = true;
                for mask in 0u64..(1 << n) {
                    self.sets.push(BitSet::from_mask(mask));
                    let r = self.eval(body);
                    self.sets.pop();
                    if !r? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
        })
    }
}
