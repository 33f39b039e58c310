//! Graph preprocessing through well-structured modulators.
//!
//! The crate finds modulators made of pairwise-disjoint split-modules of
//! bounded rank-width, and uses them to shrink instances of MSO-definable
//! decision and optimization problems into provably equivalent kernels.
//! Every approximation and every replacement step is backed by a brute-force
//! oracle in [`oracle`], which the test suites run at desk scale.

pub mod bits;
pub mod caps;
pub mod error;
pub mod gen;
pub mod gf2;
pub mod kernel;
pub mod mso;
pub mod oracle;
pub mod graph;
pub(crate) mod par;
pub mod rankwidth;
pub mod splitmod;
pub mod wsm;

pub use bits::BitSet;
pub use caps::Caps;
pub use error::{Error, Result};
pub use graph::{Graph, VertexSet};
