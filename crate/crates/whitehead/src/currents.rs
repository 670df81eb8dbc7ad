//! Truncated geodesic-current coordinates.
//!
//! A current is represented by its occurrence coordinates `⟨v, ν⟩` on all
//! reduced words `v` with `1 ≤ |v| ≤ R`. The coordinates of a well-formed
//! current satisfy two extension identities: `⟨v, ν⟩` equals the sum of
//! `⟨vx, ν⟩` over the one-letter right extensions of `v`, and likewise on
//! the left. The uniform current has `⟨v⟩ = 1/(2k(2k−1)^{|v|−1})`; the
//! rational current of `g` counts occurrences in the cyclic word of `g`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::autos::Automorphism;
use crate::error::{Error, Result};
use crate::par;
use crate::rng::Rng;
use crate::sample::sample_reduced;
use crate::word::{enumerate_reduced, CyclicWord, Letter, Word, MAX_RANK};

/// Relative tolerance (with floor 1) for real-valued current identities.
pub const REL_TOL: f64 = 1e-9;

/// Default ceiling on `2k(2k−1)^{m−1}` for Euler-word construction.
pub const DEFAULT_EULER_CAP: u64 = 250_000;

pub(crate) fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Coordinates of `n_A`: `1/(2k(2k−1)^{|v|−1})`.
pub fn uniform_coordinate(k: usize, len: usize) -> f64 {
    1.0 / (2.0 * k as f64 * (2.0 * k as f64 - 1.0).powi(len as i32 - 1))
}

/// A current truncated to radius `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedCurrent {
    k: usize,
    radius: usize,
    table: HashMap<Word, f64>,
}

impl TruncatedCurrent {
    /// The uniform current to radius `R ≥ 2`.
    pub fn uniform(k: usize, radius: usize) -> Result<TruncatedCurrent> {
        if radius < 2 {
            return Err(Error::RadiusTooSmall);
        }
        let mut table = HashMap::new();
        for len in 1..=radius {
            let coord = uniform_coordinate(k, len);
            for v in enumerate_reduced(k, len) {
                table.insert(v, coord);
            }
        }
        Ok(TruncatedCurrent { k, radius, table })
    }

    /// The counting current of the conjugacy class of `g` (taken as given:
    /// a proper power contributes its full multiplicity).
    pub fn rational(k: usize, g: &Word, radius: usize) -> Result<TruncatedCurrent> {
        if radius < 2 {
            return Err(Error::RadiusTooSmall);
        }
        let (w, _) = g.cyclic_reduce()?;
        let mut table = HashMap::new();
        for len in 1..=radius {
            for v in enumerate_reduced(k, len) {
                let count = w.occurrences(&v)?;
                table.insert(v, count as f64);
            }
        }
        Ok(TruncatedCurrent { k, radius, table })
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// `⟨v, ν⟩`; zero for coordinates absent from the table.
    pub fn coord(&self, v: &Word) -> f64 {
        self.table.get(v).copied().unwrap_or(0.0)
    }

    pub fn set_coord(&mut self, v: Word, value: f64) {
        self.table.insert(v, value);
    }

    /// `L(ν)`: sum of the radius-1 coordinates.
    pub fn length(&self) -> f64 {
        self.level_sum(1)
    }

    pub fn level_sum(&self, len: usize) -> f64 {
        enumerate_reduced(self.k, len).iter().map(|v| self.coord(v)).sum()
    }

    pub fn scale(&self, factor: f64) -> TruncatedCurrent {
        TruncatedCurrent {
            k: self.k,
            radius: self.radius,
            table: self.table.iter().map(|(v, &c)| (v.clone(), c * factor)).collect(),
        }
    }

    /// Checks both extension identities for every `v` with `|v| < R`;
    /// returns the violations (empty for a well-formed current).
    pub fn check_invariance(&self) -> Vec<InvarianceViolation> {
        let mut violations = Vec::new();
        for len in 1..self.radius {
            for v in enumerate_reduced(self.k, len) {
                let expected = self.coord(&v);
                let right: f64 = Letter::alphabet(self.k)
                    .filter(|&x| Some(x.inverse()) != v.last())
                    .map(|x| {
                        let mut letters = v.letters().to_vec();
                        letters.push(x);
                        self.coord(&Word::from_reduced(letters))
                    })
                    .sum();
                if !rel_close(expected, right) {
                    violations.push(InvarianceViolation {
                        word: v.clone(),
                        side: ExtensionSide::Right,
                        coordinate: expected,
                        extension_sum: right,
                    });
                }
                let left: f64 = Letter::alphabet(self.k)
                    .filter(|&x| Some(x.inverse()) != v.first())
                    .map(|x| {
                        let mut letters = vec![x];
                        letters.extend_from_slice(v.letters());
                        self.coord(&Word::from_reduced(letters))
                    })
                    .sum();
                if !rel_close(expected, left) {
                    violations.push(InvarianceViolation {
                        word: v,
                        side: ExtensionSide::Left,
                        coordinate: expected,
                        extension_sum: left,
                    });
                }
            }
        }
        violations
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("current serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<TruncatedCurrent> {
        #[derive(Deserialize)]
        struct Raw {
            k: usize,
            #[serde(rename = "R")]
            radius: usize,
            coords: BTreeMap<String, f64>,
        }
        let raw: Raw = serde_json::from_value(value.clone())?;
        if raw.k < 1 || raw.k > MAX_RANK {
            return Err(Error::RankTooLarge);
        }
        if raw.radius < 2 {
            return Err(Error::RadiusTooSmall);
        }
        let mut table = HashMap::new();
        for (key, coord) in raw.coords {
            let letters = crate::word::parse_letters(&key, raw.k)?;
            let word = crate::word::free_reduce(letters.iter().copied());
            if word.len() != letters.len() {
                return Err(Error::ParseWord(format!("coordinate key {key:?} is not reduced")));
            }
            if word.is_empty() || word.len() > raw.radius {
                return Err(Error::ParseWord(format!(
                    "coordinate key {key:?} outside radius {}",
                    raw.radius
                )));
            }
            table.insert(word, coord);
        }
        Ok(TruncatedCurrent { k: raw.k, radius: raw.radius, table })
    }
}

impl Serialize for TruncatedCurrent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coords: BTreeMap<String, f64> = self
            .table
            .iter()
            .map(|(v, &c)| (v.to_string(), c))
            .collect();
        let mut s = serializer.serialize_struct("TruncatedCurrent", 3)?;
        s.serialize_field("k", &self.k)?;
        s.serialize_field("R", &self.radius)?;
        s.serialize_field("coords", &coords)?;
        s.end()
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionSide {
    Right,
    Left,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceViolation {
    pub word: Word,
    pub side: ExtensionSide,
    pub coordinate: f64,
    pub extension_sum: f64,
}

impl fmt::Display for InvarianceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} extension of {}: coordinate {} vs extension sum {}",
            self.side, self.word, self.coordinate, self.extension_sum
        )
    }
}

/// A cyclic word in which every reduced word of length `m` occurs exactly
/// once, so that `||w|| = 2k(2k−1)^{m−1}`.
#[derive(Clone, Debug)]
pub struct EulerWord {
    pub k: usize,
    pub m: usize,
    pub word: CyclicWord,
}

/// Size `2k(2k−1)^{m−1}` of the level-`m` Euler word, `None` on overflow.
pub fn euler_size(k: usize, m: usize) -> Option<u64> {
    (2 * k as u64 - 1)
        .checked_pow((m - 1) as u32)
        .and_then(|p| p.checked_mul(2 * k as u64))
}

/// Builds the level-`m` Euler word under the default size cap.
pub fn euler_word(k: usize, m: usize) -> Result<EulerWord> {
    euler_word_with_cap(k, m, DEFAULT_EULER_CAP)
}

/// Builds the level-`m` Euler word: vertices are the reduced words of length
/// `m−1`, edges the reduced words of length `m` (from prefix to suffix,
/// labeled by the last letter), and the output reads the edge labels along
/// an Euler circuit. The circuit is found by the stack form of Hierholzer's
/// algorithm taking unused edges in letter order from the lexicographically
/// least start vertex, so the output is reproducible.
pub fn euler_word_with_cap(k: usize, m: usize, cap: u64) -> Result<EulerWord> {
    if k < 2 {
        return Err(Error::RankTooSmall);
    }
    if k > MAX_RANK {
        return Err(Error::RankTooLarge);
    }
    if m < 2 {
        return Err(Error::RadiusTooSmall);
    }
    let size = euler_size(k, m).ok_or(Error::SizeCapExceeded { needed: u64::MAX, cap })?;
    if size > cap {
        return Err(Error::SizeCapExceeded { needed: size, cap });
    }

    let vertices = enumerate_reduced(k, m - 1);
    let index: HashMap<&Word, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    // out-edges in letter order: append x ≠ last⁻¹, target is the suffix
    let adjacency: Vec<Vec<(Letter, usize)>> = vertices
        .iter()
        .map(|v| {
            Letter::alphabet(k)
                .filter(|&x| Some(x.inverse()) != v.last())
                .map(|x| {
                    let mut suffix = v.letters()[1..].to_vec();
                    suffix.push(x);
                    (x, index[&Word::from_reduced(suffix)])
                })
                .collect()
        })
        .collect();

    let mut next_edge = vec![0usize; vertices.len()];
    let mut stack: Vec<(usize, Option<Letter>)> = vec![(0, None)];
    let mut labels: Vec<Letter> = Vec::with_capacity(size as usize);
    while let Some(&(vertex, via)) = stack.last() {
        if next_edge[vertex] < adjacency[vertex].len() {
            let (label, target) = adjacency[vertex][next_edge[vertex]];
            next_edge[vertex] += 1;
            stack.push((target, Some(label)));
        } else {
            stack.pop();
            if let Some(label) = via {
                labels.push(label);
            }
        }
    }
    labels.reverse();
    assert_eq!(labels.len() as u64, size, "every edge must be used exactly once");

    let word = CyclicWord::new(labels)?; // validates cyclic reducedness
    debug_assert!(all_level_words_once(k, m, &word));
    Ok(EulerWord { k, m, word })
}

/// Every reduced word of length `m` appears exactly once among the cyclic
/// windows (the window count matches the word count, so distinctness is
/// enough).
fn all_level_words_once(k: usize, m: usize, w: &CyclicWord) -> bool {
    let letters = w.letters();
    let n = letters.len();
    let mut seen: HashSet<Vec<Letter>> = HashSet::with_capacity(n);
    for start in 0..n {
        let window: Vec<Letter> = (0..m).map(|j| letters[(start + j) % n]).collect();
        if !seen.insert(window) {
            return false;
        }
    }
    n as u64 == euler_size(k, m).unwrap_or(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitRow {
    pub word: Word,
    pub mean_frequency: f64,
    pub reference: f64,
    pub deviation: f64,
}

/// Comparison of sampled occurrence frequencies against the uniform current.
#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub k: usize,
    pub n: usize,
    pub samples: usize,
    pub radius: usize,
    pub rows: Vec<LimitRow>,
    pub max_deviation: f64,
}

/// Draws `samples` random reduced words of length `n`, pushes each through
/// `phi`, and compares the mean of `⟨v, φ(ω)⟩ / n` (plain subword counts of
/// the linear image) against `⟨v, n_A⟩` for all `v` with `|v| ≤ 3`. With the
/// identity this measures the convergence of normalized random words to the
/// uniform current; with other `phi` it measures how far the image
/// frequencies sit from uniform.
pub fn empirical_limit_check(
    phi: &Automorphism,
    n: usize,
    samples: usize,
    rng: &mut Rng,
) -> Result<LimitReport> {
    assert!(n >= 1 && samples >= 1);
    let k = phi.rank();
    let radius = 3usize;
    let words: Vec<Word> = (1..=radius).flat_map(|len| enumerate_reduced(k, len)).collect();

    // derive per-sample seeds up front so the parallel map is deterministic
    let seeds: Vec<u64> = (0..samples).map(|_| rng.next_u64()).collect();
    let per_sample: Vec<Result<Vec<f64>>> = par::map_slice(&seeds, |&seed| {
        let mut local = Rng::seed_from_u64(seed);
        let omega = sample_reduced(k, n, &mut local);
        let image = phi.apply(&omega)?;
        words
            .iter()
            .map(|v| Ok(image.count_subwords(v)? as f64 / n as f64))
            .collect()
    });

    let mut means = vec![0.0f64; words.len()];
    for row in per_sample {
        for (acc, freq) in means.iter_mut().zip(row?) {
            *acc += freq;
        }
    }
    for acc in &mut means {
        *acc /= samples as f64;
    }

    let rows: Vec<LimitRow> = words
        .into_iter()
        .zip(means)
        .map(|(word, mean_frequency)| {
            let reference = uniform_coordinate(k, word.len());
            LimitRow {
                deviation: (mean_frequency - reference).abs(),
                word,
                mean_frequency,
                reference,
            }
        })
        .collect();
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    Ok(LimitReport { k, n, samples, radius, rows, max_deviation })
}
