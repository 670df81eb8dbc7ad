//! Whitehead's algorithm: greedy minimization of cyclic length, strict
//! minimality, and automorphic equivalence via a bounded search of the
//! equal-length level set.

use std::collections::HashSet;

use serde::Serialize;

use crate::autos::{CharPair, Relabeling};
use crate::error::Result;
use crate::graph::WhiteheadGraph;
use crate::par;
use crate::word::CyclicWord;

/// Default node budget for the equivalence search.
pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct MinimizationStep {
    pub tau: CharPair,
    pub result: CyclicWord,
    pub change: i64,
}

/// Record of a greedy descent to an automorphically minimal word. Every step
/// strictly decreases the cyclic length; the result admits no further
/// decreasing second-kind Whitehead automorphism.
#[derive(Clone, Debug, Serialize)]
pub struct MinimizationTrace {
    pub start: CyclicWord,
    pub steps: Vec<MinimizationStep>,
    pub result: CyclicWord,
}

impl MinimizationTrace {
    pub fn is_minimal_input(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Greedy steepest descent: at each step the enumerated pair with the most
/// negative length change is applied, ties broken by enumeration order
/// (multiplier code, then subset mask). Stops when no pair decreases the
/// length, which certifies minimality.
pub fn minimize(k: usize, w: &CyclicWord) -> Result<MinimizationTrace> {
    let pairs = CharPair::enumerate(k)?;
    let mut current = w.clone();
    let mut steps = Vec::new();
    loop {
        let graph = WhiteheadGraph::of_word(k, &current)?;
        let best = pairs
            .iter()
            .map(|tau| (tau, graph.length_change(tau)))
            .min_by_key(|&(_, change)| change)
            .expect("pair enumeration is nonempty");
        let (tau, change) = best;
        if change >= 0 {
            break;
        }
        current = tau.to_automorphism().apply_cyclic(&current)?;
        debug_assert_eq!(current.len() as i64, steps.last().map_or(w.len() as i64, |s: &MinimizationStep| s.result.len() as i64) + change);
        steps.push(MinimizationStep { tau: *tau, result: current.clone(), change });
    }
    Ok(MinimizationTrace { start: w.clone(), steps, result: current })
}

/// Minimizes a batch; parallel under the `parallel` feature, output order
/// matches input order either way.
pub fn minimize_batch(k: usize, words: &[CyclicWord]) -> Result<Vec<MinimizationTrace>> {
    par::map_slice(words, |w| minimize(k, w)).into_iter().collect()
}

/// True when every non-inner second-kind Whitehead automorphism strictly
/// increases the cyclic length.
pub fn is_strictly_minimal(k: usize, w: &CyclicWord) -> Result<bool> {
    let graph = WhiteheadGraph::of_word(k, w)?;
    Ok(CharPair::enumerate(k)?
        .iter()
        .filter(|tau| !tau.is_inner())
        .all(|tau| graph.length_change(tau) > 0))
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivalenceVerdict {
    Equivalent,
    Inequivalent,
    CapExceeded,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceOutcome {
    pub verdict: EquivalenceVerdict,
    pub minimal_u: CyclicWord,
    pub minimal_v: CyclicWord,
    /// Canonical words visited during the level-set search.
    pub visited: usize,
}

/// Decides whether two words lie in the same automorphism orbit.
///
/// Both are minimized first; distinct minimal lengths settle the question.
/// Otherwise a breadth-first search runs from the minimum of `u` over all
/// second-kind pairs and all relabelings, keeping only images of equal
/// cyclic length (canonical-rotation dedupe), until the minimum of `v` is
/// found, the level set is exhausted, or `node_cap` distinct words have been
/// seen. Hitting the cap is reported as a verdict, not an error.
pub fn automorphic_equivalence(
    k: usize,
    u: &CyclicWord,
    v: &CyclicWord,
    node_cap: usize,
) -> Result<EquivalenceOutcome> {
    let min_u = minimize(k, u)?.result;
    let min_v = minimize(k, v)?.result;
    let outcome = |verdict, visited| EquivalenceOutcome {
        verdict,
        minimal_u: min_u.clone(),
        minimal_v: min_v.clone(),
        visited,
    };
    if min_u.len() != min_v.len() {
        return Ok(outcome(EquivalenceVerdict::Inequivalent, 0));
    }
    if min_u == min_v {
        return Ok(outcome(EquivalenceVerdict::Equivalent, 1));
    }

    let n = min_u.len();
    let pairs = CharPair::enumerate(k)?;
    let relabelings = Relabeling::enumerate(k);
    let moves: Vec<crate::autos::Automorphism> = pairs
        .iter()
        .map(CharPair::to_automorphism)
        .chain(relabelings.iter().map(Relabeling::to_automorphism))
        .collect();

    let mut seen: HashSet<CyclicWord> = HashSet::new();
    seen.insert(min_u.clone());
    let mut frontier = vec![min_u.clone()];
    while !frontier.is_empty() {
        // Expansion parallelizes per node; the dedupe merge below is
        // sequential in node order, keeping the search deterministic.
        let expanded: Vec<Result<Vec<CyclicWord>>> = par::map_slice(&frontier, |word| {
            moves
                .iter()
                .map(|phi| phi.apply_cyclic(word))
                .filter(|image| image.as_ref().map_or(true, |i| i.len() == n))
                .collect()
        });
        let mut next = Vec::new();
        for images in expanded {
            for image in images? {
                if image == min_v {
                    return Ok(outcome(EquivalenceVerdict::Equivalent, seen.len()));
                }
                if seen.len() >= node_cap {
                    return Ok(outcome(EquivalenceVerdict::CapExceeded, seen.len()));
                }
                if seen.insert(image.clone()) {
                    next.push(image);
                }
            }
        }
        frontier = next;
    }
    let visited = seen.len();
    Ok(outcome(EquivalenceVerdict::Inequivalent, visited))
}
