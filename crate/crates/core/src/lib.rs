//! Instance generation, text encoding, verification, rewards and evaluation
//! for language-model solvers of combinatorial optimization problems.

pub mod cli;
pub mod eval;
pub mod heuristics;
pub mod problems;
pub mod rewards;
pub mod tai;
pub mod verify;

// The guide's code listings run as doctests so they cannot drift from the API.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/instances.md")]
    mod instances {}
    #[doc = include_str!("../../../book/src/text-encoding.md")]
    mod text_encoding {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/heuristics.md")]
    mod heuristics {}
    #[doc = include_str!("../../../book/src/rewards.md")]
    mod rewards {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
