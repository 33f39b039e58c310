//! MSO formulas, model checking, q-types and type-preserving replacement.

pub mod ast;
pub mod eval;
pub mod rep;
pub mod types;

pub use ast::{parse_formula, MsoFormula};
pub use eval::{evaluate, evaluate_naive, Structure, NAIVE_BUDGET};
pub use rep::{find_representative, RepEngine, RepOptions};
pub use types::{
    game_equivalent, game_equivalent_naive, game_equivalent_with, mso_type, partial_isomorphism,
    GameConfig, TypeId, TypeTable,
};
