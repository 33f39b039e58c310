//! Desk-scale resource limits shared by the exponential subroutines.

/// Limits for the exact subroutines. All of them trade precision for time in
/// a controlled way: computations abort with a capacity error instead of
/// silently degrading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest vertex count for the exact rank-width subset DP.
    pub exact_rw_limit: usize,
    /// Structure-size anchor for the type/game machinery: a computation on
    /// `n` vertices with `q` rounds is admitted when its move-tree is no
    /// larger than the one for `game_limit` vertices and 3 rounds.
    pub game_limit: usize,
    /// Vertex-count cap for replacement representatives.
    pub size_cap: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            exact_rw_limit: 16,
            game_limit: 9,
            size_cap: 6,
        }
    }
}

/// Default vertex-count limit for brute-force formula evaluation.
pub const DEFAULT_EVAL_LIMIT: usize = 20;

impl Caps {
    /// Cost measure for a type computation: the number of nodes of the full
    /// move tree, `sum_{j<=q} (n + 2^n)^j`, saturating.
    pub fn game_cost(n: usize, rounds: usize) -> u128 {
        let branch = if n >= 64 {
            u128::MAX
        } else {
            n as u128 + (1u128 << n)
        };
        let mut total: u128 = 1;
        let mut level: u128 = 1;
        for _ in 0..rounds {
            level = level.saturating_mul(branch);
            total = total.saturating_add(level);
        }
        total
    }

    /// Budget implied by `game_limit` (anchored at three rounds).
    pub fn game_budget(&self) -> u128 {
        Caps::game_cost(self.game_limit, 3)
    }

    pub fn admits_game(&self, n: usize, rounds: usize) -> bool {
        Caps::game_cost(n, rounds) <= self.game_budget()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_game_budget_matches_stated_anchor() {
        let caps = Caps::default();
        assert!(caps.admits_game(9, 3));
        assert!(!caps.admits_game(10, 3));
        // Fewer rounds buy more vertices.
        assert!(caps.admits_game(13, 2));
        assert!(caps.admits_game(26, 1));
    }
}
