//! Exact and pointwise computations for Poisson manifolds, their submanifolds and submersions,
//! Dirac pullbacks, Manin triples and toric leaf counts.

pub mod scalars;
pub mod linalg;
pub mod calculus;
pub mod verdict;
pub mod dirac;
pub mod submanifolds;
pub mod submersions;
pub mod lie;
pub mod toric;
pub mod catalogue;
