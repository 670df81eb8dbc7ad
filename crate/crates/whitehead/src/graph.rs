//! Weighted and normalized Whitehead graphs.
//!
//! The graph of a cyclic word `w` lives on the `2k` letters; the edge
//! `{x⁻¹, y}` (for `x ≠ y⁻¹`) is labeled with the number of occurrences of
//! `xy` plus that of `y⁻¹x⁻¹` in `w`. Labels are kept as exact integer
//! counts; normalization by `||w||` is the only floating-point step. Edges
//! are indexed by unordered pairs of distinct letters in a fixed canonical
//! order, so a normalized graph doubles as a feature vector in
//! `ℝ^{k(2k−1)}` with the max-metric.

use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::autos::CharPair;
use crate::error::{Error, Result};
use crate::word::{CyclicWord, Letter, LetterSet};

/// Number of edges: unordered pairs of distinct letters, `k(2k−1)`.
pub fn edge_count(k: usize) -> usize {
    k * (2 * k - 1)
}

/// Canonical index of the unordered pair `{u, v}`, `u ≠ v`: pairs are ordered
/// by smaller code, then larger code.
pub fn edge_index(k: usize, u: Letter, v: Letter) -> usize {
    debug_assert!(u != v);
    let n = 2 * k;
    let (lo, hi) = if u.code() < v.code() { (u, v) } else { (v, u) };
    let lo = lo.code() as usize;
    let hi = hi.code() as usize;
    // pairs with smaller endpoint < lo come first
    lo * (2 * n - lo - 1) / 2 + (hi - lo - 1)
}

/// Endpoints of the edge at a canonical index, in code order.
pub fn edge_endpoints(k: usize, index: usize) -> (Letter, Letter) {
    let n = 2 * k;
    let mut lo = 0usize;
    let mut base = 0usize;
    while base + (n - lo - 1) <= index {
        base += n - lo - 1;
        lo += 1;
    }
    let hi = lo + 1 + (index - base);
    (Letter::from_code(lo as u8), Letter::from_code(hi as u8))
}

/// Whitehead graph with exact integer labels.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WhiteheadGraph {
    k: usize,
    labels: Vec<u64>,
}

impl WhiteheadGraph {
    /// Builds the graph of a cyclic word by scanning the `||w||` cyclically
    /// consecutive letter pairs; each pair `(x, y)` feeds the edge `{x, y⁻¹}`,
    /// so the unordered pair `{u, v}` carries `⟨uv⁻¹,w⟩ + ⟨vu⁻¹,w⟩`. This is
    /// the star-graph convention under which the cut formula for length
    /// change is exact.
    pub fn of_word(k: usize, w: &CyclicWord) -> Result<WhiteheadGraph> {
        if w.max_generator() >= k {
            return Err(Error::RankMismatch { expected: k, found: w.max_generator() + 1 });
        }
        let mut labels = vec![0u64; edge_count(k)];
        let letters = w.letters();
        let n = letters.len();
        for i in 0..n {
            let x = letters[i];
            let y = letters[(i + 1) % n];
            // cyclic reducedness guarantees x ≠ y⁻¹
            labels[edge_index(k, x, y.inverse())] += 1;
        }
        Ok(WhiteheadGraph { k, labels })
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, u: Letter, v: Letter) -> u64 {
        self.labels[edge_index(self.k, u, v)]
    }

    pub fn total(&self) -> u64 {
        self.labels.iter().sum()
    }

    /// Sum of labels over edges with one endpoint in `p` and the other in
    /// `q`; every edge is counted at most once.
    pub fn dot(&self, p: LetterSet, q: LetterSet) -> u64 {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(i, _)| {
                let (u, v) = edge_endpoints(self.k, i);
                (p.contains(u) && q.contains(v)) || (p.contains(v) && q.contains(u))
            })
            .map(|(_, &r)| r)
            .sum()
    }

    /// Exact length change `||τ(w)|| − ||w||` of the second-kind automorphism
    /// `τ = (T, a)` on the underlying word, read off the graph as
    /// `T.T′ − a.Σ`.
    pub fn length_change(&self, tau: &CharPair) -> i64 {
        let t = tau.t();
        let t_prime = t.complement(self.k);
        let cut = self.dot(t, t_prime);
        let at_multiplier = self.dot(LetterSet::singleton(tau.multiplier()), LetterSet::full(self.k));
        cut as i64 - at_multiplier as i64
    }

    pub fn normalize(&self, n: u64) -> Result<NormalizedWhiteheadGraph> {
        if n == 0 {
            return Err(Error::ZeroLength);
        }
        Ok(NormalizedWhiteheadGraph {
            k: self.k,
            labels: self.labels.iter().map(|&r| r as f64 / n as f64).collect(),
        })
    }
}

/// Whitehead graph with real labels summing to 1; a point of `ℝ^{k(2k−1)}`.
#[derive(Clone, PartialEq, Debug)]
pub struct NormalizedWhiteheadGraph {
    k: usize,
    labels: Vec<f64>,
}

impl NormalizedWhiteheadGraph {
    /// Convenience: normalized graph of a cyclic word.
    pub fn of_word(k: usize, w: &CyclicWord) -> Result<NormalizedWhiteheadGraph> {
        WhiteheadGraph::of_word(k, w)?.normalize(w.len() as u64)
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn label_sum(&self) -> f64 {
        self.labels.iter().sum()
    }

    /// Max-metric distance over the `k(2k−1)` edges.
    pub fn distance(&self, other: &NormalizedWhiteheadGraph) -> Result<f64> {
        if self.k != other.k {
            return Err(Error::RankMismatch { expected: self.k, found: other.k });
        }
        Ok(self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// One CSV cell per edge, canonical order.
    pub fn csv_row(&self) -> String {
        self.labels
            .iter()
            .map(|r| format!("{r}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Column headers matching the canonical edge order, e.g. `aA`, `ab`, …
pub fn edge_headers(k: usize) -> Vec<String> {
    (0..edge_count(k))
        .map(|i| {
            let (u, v) = edge_endpoints(k, i);
            format!("{u}{v}")
        })
        .collect()
}

fn serialize_edges<S: Serializer>(
    k: usize,
    labels: impl Iterator<Item = f64>,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Edge {
        u: String,
        v: String,
        r: f64,
    }
    let edges: Vec<Edge> = labels
        .enumerate()
        .map(|(i, r)| {
            let (u, v) = edge_endpoints(k, i);
            Edge { u: u.to_string(), v: v.to_string(), r }
        })
        .collect();
    let mut seq = serializer.serialize_seq(Some(edges.len()))?;
    for e in &edges {
        seq.serialize_element(e)?;
    }
    seq.end()
}

impl Serialize for WhiteheadGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("WhiteheadGraph", 2)?;
        s.serialize_field("k", &self.k)?;
        s.serialize_field("edges", &EdgeList { k: self.k, labels: self.labels.iter().map(|&r| r as f64).collect() })?;
        s.end()
    }
}

impl Serialize for NormalizedWhiteheadGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("NormalizedWhiteheadGraph", 2)?;
        s.serialize_field("k", &self.k)?;
        s.serialize_field("edges", &EdgeList { k: self.k, labels: self.labels.clone() })?;
        s.end()
    }
}

struct EdgeList {
    k: usize,
    labels: Vec<f64>,
}

impl Serialize for EdgeList {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_edges(self.k, self.labels.iter().copied(), serializer)
    }
}
