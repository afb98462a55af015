//! Exact and sampled heat-kernel moments of unitary Brownian motion.
//!
//! The moments `E[Π tr(B_{t/N}^{m_i})]` are expanded in `1/N²` with
//! coefficients that count transposition walks in `S_n`. The engines:
//!
//! - [`class_walk`] and [`sym_char`] count walks, by class transfer and by
//!   characters.
//! - [`expansion`] assembles and evaluates the series, and [`noncross`] and
//!   [`free_prob`] describe its large-`N` limit.
//! - [`tensor_rep`] checks the underlying Casimir identities exactly.
//! - [`mc_sim`] and [`coverings`] sample the same quantities.
//! - [`verify`] runs the cross-oracle suite.
//!
//! ```
//! use heatwalk::class_walk::count_s;
//! use heatwalk::Partition;
//!
//! // Minimal factorizations of a 4-cycle: 4^2 walks with no merge.
//! assert_eq!(count_s(&Partition::row(4), 3, 0).to_string(), "16");
//! ```

// NaN-rejecting guards are written as `!(x >= 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod class_walk;
pub mod cmatrix;
pub mod coverings;
pub mod error;
pub mod expansion;
pub mod free_prob;
pub mod laurent;
pub mod mc_sim;
pub mod noncross;
pub mod numeric;
pub mod partition;
pub mod perm;
pub mod sym_char;
pub mod tensor_rep;
pub mod verify;

pub use error::{Error, Result};
pub use partition::{CycleType, Partition};
pub use perm::{compose, leq_abs, Permutation};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/walks.md")]
    pub struct Walks;
    #[doc = include_str!("../../../book/src/characters.md")]
    pub struct Characters;
    #[doc = include_str!("../../../book/src/expansion.md")]
    pub struct Expansion;
    #[doc = include_str!("../../../book/src/free.md")]
    pub struct Free;
    #[doc = include_str!("../../../book/src/casimir.md")]
    pub struct Casimir;
    #[doc = include_str!("../../../book/src/monte_carlo.md")]
    pub struct MonteCarlo;
    #[doc = include_str!("../../../book/src/coverings.md")]
    pub struct Coverings;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
