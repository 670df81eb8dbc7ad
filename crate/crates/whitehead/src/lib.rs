//! Combinatorics of automorphisms of finite-rank free groups: freely reduced
//! and cyclic words, Whitehead automorphisms of both kinds, weighted
//! Whitehead graphs, Whitehead's minimization algorithm, truncated
//! geodesic-current coordinates, generic stretching factors and the cluster
//! experiments built on top of them.
//!
//! The `parallel` feature (on by default) runs the sampling-heavy operations
//! on rayon; disabling it falls back to equivalent sequential loops with
//! byte-identical results.

pub mod autos;
pub mod cluster;
pub mod currents;
pub mod error;
pub mod graph;
pub mod ideal;
pub mod minimizer;
mod par;
pub mod rng;
pub mod sample;
pub mod word;

pub use autos::{Automorphism, CharPair, Relabeling};
pub use cluster::{
    estimate_genericity, nearest_centroid_classify, run_experiment, ClusterReport, Domain,
    ExperimentConfig, GenericityPredicate, GenericityReport,
};
pub use currents::{
    empirical_limit_check, euler_word, euler_word_with_cap, EulerWord, LimitReport,
    TruncatedCurrent,
};
pub use error::{Error, Result};
pub use graph::{NormalizedWhiteheadGraph, WhiteheadGraph};
pub use ideal::{
    factorize, ideal_step, phi_na_graph, stretch_factor, Factorization, Ratio, StretchResult,
};
pub use minimizer::{
    automorphic_equivalence, is_strictly_minimal, minimize, minimize_batch, EquivalenceOutcome,
    EquivalenceVerdict, MinimizationTrace,
};
pub use rng::Rng;
pub use sample::{sample_cyclically_reduced, sample_reduced};
pub use word::{enumerate_reduced, free_reduce, CyclicWord, Letter, LetterSet, Word, MAX_RANK};
