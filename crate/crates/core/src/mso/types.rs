//! MSO q-types and the q-round game.
//!
//! Two structures have equal q-types exactly when the Duplicator wins the
//! q-round game on them. The production route computes a canonical type
//! value per structure by exhaustive recursion over the moves: each round
//! offers every vertex as a point move and every vertex subset as a set
//! move, and the base case is the atomic diagram of the interpreted tuples
//! (the partial-isomorphism data). Values are hash-consed so that type
//! equality is an id comparison. A direct Spoiler/Duplicator recursion is
//! kept as the cross-checking oracle for tiny structures.

use rustc_hash::FxHashMap;

use crate::bits::BitSet;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::mso::eval::Structure;

pub type TypeId = u32;

/// Hash-consing table for type values. Ids are only comparable within one
/// table.
#[derive(Debug, Default)]
pub struct TypeTable {
    diagrams: FxHashMap<Vec<u64>, TypeId>,
    nodes: FxHashMap<(Vec<TypeId>, Vec<TypeId>), TypeId>,
    next: TypeId,
}

impl TypeTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh(&mut self) -> TypeId {
        let id = self.next;
        self.next += 1;
        id
    }

    fn intern_diagram(&mut self, key: Vec<u64>) -> TypeId {
        if let Some(&id) = self.diagrams.get(&key) {
            return id;
        }
        let id = self.fresh();
        self.diagrams.insert(key, id);
        id
    }

    fn intern_node(&mut self, point_kids: Vec<TypeId>, set_kids: Vec<TypeId>) -> TypeId {
        let key = (point_kids, set_kids);
        if let Some(&id) = self.nodes.get(&key) {
            return id;
        }
        let id = self.fresh();
        self.nodes.insert(key, id);
        id
    }
}

/// The q-type of `(g, sets, points)` as a canonical id in `table`.
pub fn mso_type(
    g: &Graph,
    sets: &[VertexSet],
    points: &[usize],
    rounds: usize,
    table: &mut TypeTable,
    caps: &Caps,
) -> Result<TypeId> {
    let n = g.n();
    if !caps.admits_game(n, rounds) {
        return Err(Error::capacity(format!(
            "type computation on {n} vertices with {rounds} rounds exceeds the game budget \
             (limit anchor: {} vertices at 3 rounds)",
            caps.game_limit
        )));
    }
    let adj: Vec<u64> = (0..n).map(|v| g.neighbors(v).as_mask()).collect();
    let mut set_masks: Vec<u64> = sets.iter().map(|s| s.as_mask()).collect();
    let mut pts: Vec<usize> = points.to_vec();
    Ok(type_rec(&adj, n, &mut set_masks, &mut pts, rounds, table))
}

fn type_rec(
    adj: &[u64],
    n: usize,
    sets: &mut Vec<u64>,
    points: &mut Vec<usize>,
    q: usize,
    table: &mut TypeTable,
) -> TypeId {
    if q == 0 {
        return table.intern_diagram(diagram_key(adj, sets, points));
    }
    let mut point_kids: Vec<TypeId> = (0..n)
        .map(|v| {
            points.push(v);
            let t = type_rec(adj, n, sets, points, q - 1, table);
            points.pop();
            t
        })
        .collect();
    point_kids.sort_unstable();
    point_kids.dedup();
    let top: u64 = if n >= 64 { unreachable!() } else { 1u64 << n };
    let mut set_kids: Vec<TypeId> = (0..top)
        .map(|mask| {
            sets.push(mask);
            let t = type_rec(adj, n, sets, points, q - 1, table);
            sets.pop();
            t
        })
        .collect();
    set_kids.sort_unstable();
    set_kids.dedup();
    table.intern_node(point_kids, set_kids)
}

/// Atomic diagram: equalities and adjacencies among the points, plus their
/// memberships in the sets.
fn diagram_key(adj: &[u64], sets: &[u64], points: &[usize]) -> Vec<u64> {
    let m = points.len();
    let mut bits: Vec<bool> = Vec::with_capacity(m * m + m * sets.len());
    for i in 0..m {
        for j in 0..i {
            bits.push(points[i] == points[j]);
            bits.push(adj[points[i]] & (1 << points[j]) != 0);
        }
        for s in sets.iter() {
            bits.push(s & (1 << points[i]) != 0);
        }
    }
    let mut key = vec![m as u64, sets.len() as u64];
    for chunk in bits.chunks(64) {
        let mut word = 0u64;
        for (k, &b) in chunk.iter().enumerate() {
            if b {
                word |= 1 << k;
            }
        }
        key.push(word);
    }
    key
}

/// A q-round game position: two interpreted structures.
#[derive(Debug, Clone)]
pub struct GameConfig {
    pub left: Structure,
    pub right: Structure,
    pub rounds: usize,
}

impl GameConfig {
    fn check(&self) -> Result<()> {
        if self.left.set_interp.len() != self.right.set_interp.len()
            || self.left.point_interp.len() != self.right.point_interp.len()
        {
            return Err(Error::contract(
                "game sides must interpret equally many set and point variables",
            ));
        }
        Ok(())
    }
}

/// Does the Duplicator win, i.e. do the q-types coincide?
pub fn game_equivalent(cfg: &GameConfig, caps: &Caps) -> Result<bool> {
    let mut table = TypeTable::new();
    game_equivalent_with(cfg, &mut table, caps)
}

/// Same, reusing a caller-provided interning table.
pub fn game_equivalent_with(cfg: &GameConfig, table: &mut TypeTable, caps: &Caps) -> Result<bool> {
    cfg.check()?;
    let l = mso_type(
        &cfg.left.graph,
        &cfg.left.set_interp,
        &cfg.left.point_interp,
        cfg.rounds,
        table,
        caps,
    )?;
    let r = mso_type(
        &cfg.right.graph,
        &cfg.right.set_interp,
        &cfg.right.point_interp,
        cfg.rounds,
        table,
        caps,
    )?;
    Ok(l == r)
}

/// Partial-isomorphism check between the interpreted tuples of two
/// structures: point equalities and adjacencies must match, and every point
/// must lie in corresponding sets on both sides.
pub fn partial_isomorphism(left: &Structure, right: &Structure) -> bool {
    let (vp, up) = (&left.point_interp, &right.point_interp);
    if vp.len() != up.len() || left.set_interp.len() != right.set_interp.len() {
        return false;
    }
    for i in 0..vp.len() {
        for j in 0..i {
            if (vp[i] == vp[j]) != (up[i] == up[j]) {
                return false;
            }
            if left.graph.has_edge(vp[i], vp[j]) != right.graph.has_edge(up[i], up[j]) {
                return false;
            }
        }
        for (sl, sr) in left.set_interp.iter().zip(right.set_interp.iter()) {
            if sl.contains(vp[i]) != sr.contains(up[i]) {
                return false;
            }
        }
    }
    true
}

/// Direct game recursion, the oracle route: the Spoiler tries every move on
/// either side and the Duplicator searches for an answer. Exponentially more
/// expensive than the type route; intended for tiny cross-checks.
pub fn game_equivalent_naive(cfg: &GameConfig) -> bool {
    let mut left = cfg.left.clone();
    let mut right = cfg.right.clone();
    duplicator_wins(&mut left, &mut right, cfg.rounds)
}

fn duplicator_wins(left: &mut Structure, right: &mut Structure, q: usize) -> bool {
    if q == 0 {
        return partial_isomorphism(left, right);
    }
    let (nl, nr) = (left.graph.n(), right.graph.n());
    // Spoiler point move in the left graph.
    for v in 0..nl {
        left.point_interp.push(v);
        let answered = (0..nr).any(|u| {
            right.point_interp.push(u);
            let w = duplicator_wins(left, right, q - 1);
            right.point_interp.pop();
            w
        });
        left.point_interp.pop();
        if !answered {
            return false;
        }
    }
    // Spoiler point move in the right graph.
    for u in 0..nr {
        right.point_interp.push(u);
        let answered = (0..nl).any(|v| {
            left.point_interp.push(v);
            let w = duplicator_wins(left, right, q - 1);
            left.point_interp.pop();
            w
        });
        right.point_interp.pop();
        if !answered {
            return false;
        }
    }
    // Spoiler set move in the left graph.
    for mask in 0u64..(1 << nl) {
        left.set_interp.push(BitSet::from_mask(mask));
        let answered = (0u64..(1 << nr)).any(|m2| {
            right.set_interp.push(BitSet::from_mask(m2));
            let w = duplicator_wins(left, right, q - 1);
            right.set_interp.pop();
            w
        });
        left.set_interp.pop();
        if !answered {
            return false;
        }
    }
    // Spoiler set move in the right graph.
    for mask in 0u64..(1 << nr) {
        right.set_interp.push(BitSet::from_mask(mask));
        let answered = (0u64..(1 << nl)).any(|m2| {
            left.set_interp.push(BitSet::from_mask(m2));
            let w = duplicator_wins(left, right, q - 1);
            left.set_interp.pop();
            w
        });
        right.set_interp.pop();
        if !answered {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, Graph};

    fn cfg(l: Graph, r: Graph, rounds: usize) -> GameConfig {
        GameConfig {
            left: Structure::sentence(l),
            right: Structure::sentence(r),
            rounds,
        }
    }

    #[test]
    fn reflexivity() {
        let caps = Caps::default();
        for q in 0..3 {
            let c = cfg(complete(3), complete(3), q);
            assert!(game_equivalent(&c, &caps).unwrap());
            assert!(game_equivalent_naive(&c));
        }
    }

    #[test]
    fn k1_vs_k2_two_rounds() {
        let caps = Caps::default();
        let c = cfg(complete(1), complete(2), 2);
        assert!(!game_equivalent(&c, &caps).unwrap());
        assert!(!game_equivalent_naive(&c));
        // One round is not enough to expose the difference in point moves
        // alone, but a set move (size-1 vs size-2 subsets) already is not
        // distinguishing either; the pair is 1-equivalent.
        let c = cfg(complete(1), complete(2), 1);
        assert_eq!(
            game_equivalent(&c, &caps).unwrap(),
            game_equivalent_naive(&c)
        );
    }

    #[test]
    fn k2_vs_k3_low_rounds() {
        let caps = Caps::default();
        // One round cannot expose the cardinality or triangle difference;
        // neither can two (set moves constrain nothing without points).
        // Three rounds count to three.
        for (q, want) in [(1, true), (2, true), (3, false)] {
            let c = cfg(complete(2), complete(3), q);
            assert_eq!(game_equivalent(&c, &caps).unwrap(), want, "q={q}");
            assert_eq!(game_equivalent_naive(&c), want, "naive q={q}");
        }
    }

    #[test]
    fn type_route_matches_game_route_exhaustively() {
        // All pairs of graphs on up to 3 vertices, q <= 2, no interpretations.
        let caps = Caps::default();
        let mut graphs: Vec<Graph> = Vec::new();
        for n in 0..=3usize {
            let bits = n * n.saturating_sub(1) / 2;
            for code in 0u32..(1 << bits) {
                let mut g = Graph::new(n);
                let mut k = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if code & (1 << k) != 0 {
                            g.add_edge(u, v);
                        }
                        k += 1;
                    }
                }
                graphs.push(g);
            }
        }
        for q in 0..=2usize {
            for a in &graphs {
                for b in &graphs {
                    let c = cfg(a.clone(), b.clone(), q);
                    assert_eq!(
                        game_equivalent(&c, &caps).unwrap(),
                        game_equivalent_naive(&c),
                        "q={q} {a:?} vs {b:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn set_interpretations_matter() {
        let caps = Caps::default();
        let g = complete(2);
        let a = Structure::with_sets(g.clone(), vec![BitSet::from_iter([0])]);
        let b = Structure::with_sets(g.clone(), vec![BitSet::new()]);
        let c = GameConfig {
            left: a,
            right: b,
            rounds: 1,
        };
        assert!(!game_equivalent(&c, &caps).unwrap());
        assert!(!game_equivalent_naive(&c));
    }

    #[test]
    fn capacity_guard() {
        let caps = Caps::default();
        let c = cfg(complete(12), complete(12), 3);
        assert!(matches!(game_equivalent(&c, &caps), Err(Error::Capacity(_))));
    }
}
