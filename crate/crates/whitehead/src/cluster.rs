//! The cluster experiment: sample long cyclically reduced words, minimize
//! the stragglers, blow some of them up with automorphisms from a finite
//! collection, and compare the resulting normalized Whitehead graphs with
//! the predicted per-automorphism centroids and reducing steps.
//!
//! Samples are processed in parallel with per-sample derived seeds and
//! assembled in sample order, so a config plus seed determines the report
//! byte for byte regardless of thread count.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::autos::{Automorphism, CharPair};
use crate::error::{Error, Result};
use crate::graph::{edge_count, edge_headers, NormalizedWhiteheadGraph};
use crate::ideal::{ideal_step, phi_na_graph, stretch_factor, Ratio};
use crate::minimizer::minimize;
use crate::par;
use crate::rng::Rng;
use crate::sample::{sample_cyclically_reduced, sample_reduced};
use crate::word::{enumerate_reduced, CyclicWord, MAX_RANK};

fn default_apply_probability() -> f64 {
    0.5
}

fn default_epsilon() -> f64 {
    0.05
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub sample_size: usize,
    pub word_length: usize,
    /// Automorphism literals, e.g. `"a->ab, b->b"`.
    pub automorphisms: Vec<String>,
    #[serde(default = "default_apply_probability")]
    pub apply_probability: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<ExperimentConfig> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Parses the automorphism literals and rejects invalid settings. Simple
    /// automorphisms are rejected by name: they admit no reducing step and
    /// no cluster prediction.
    pub fn resolve(&self) -> Result<Vec<Automorphism>> {
        if self.k < 2 || self.k > MAX_RANK {
            return Err(Error::InvalidConfig(format!("k = {} out of range", self.k)));
        }
        if self.sample_size < 1 {
            return Err(Error::InvalidConfig("sample_size must be at least 1".into()));
        }
        if self.word_length < 2 {
            return Err(Error::InvalidConfig("word_length must be at least 2".into()));
        }
        if self.automorphisms.is_empty() {
            return Err(Error::InvalidConfig("automorphism set must be nonempty".into()));
        }
        if !(0.0..=1.0).contains(&self.apply_probability) {
            return Err(Error::InvalidConfig(format!(
                "apply_probability {} outside [0, 1]",
                self.apply_probability
            )));
        }
        let mut autos = Vec::with_capacity(self.automorphisms.len());
        for literal in &self.automorphisms {
            let phi = Automorphism::parse(literal, self.k)?;
            if phi.is_simple()? {
                return Err(Error::InvalidConfig(format!(
                    "automorphism {literal:?} is simple: it has no length-reducing step \
                     and no cluster prediction"
                )));
            }
            autos.push(phi);
        }
        Ok(autos)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementRecord {
    pub id: usize,
    /// Index into the automorphism set, `None` for untransformed elements.
    pub label: Option<usize>,
    /// Sample was already minimal before the minimization pass.
    pub was_minimal: bool,
    /// Cyclic length after minimization.
    pub norm_before: usize,
    /// Cyclic length after the applied automorphism (equal to `norm_before`
    /// for untransformed elements).
    pub norm_after: usize,
    pub features: Vec<f64>,
    pub centroid_distances: Vec<f64>,
    /// Whether the cluster's predicted step shortens this element.
    pub tau_reduces: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterSummary {
    pub automorphism: String,
    pub tau: CharPair,
    pub lambda: Ratio,
    pub size: usize,
    pub reduced_fraction: f64,
    pub mean_distance: f64,
    pub p95_distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterReport {
    pub config: ExperimentConfig,
    pub centroids: Vec<Vec<f64>>,
    pub clusters: Vec<ClusterSummary>,
    pub inter_centroid: Vec<Vec<f64>>,
    pub records: Vec<ElementRecord>,
}

/// Runs the full pipeline: sample, minimize, transform, featurize, compare.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ClusterReport> {
    let autos = cfg.resolve()?;
    let k = cfg.k;

    let centroids: Vec<NormalizedWhiteheadGraph> =
        autos.iter().map(phi_na_graph).collect::<Result<_>>()?;
    let taus: Vec<CharPair> = autos.iter().map(ideal_step).collect::<Result<_>>()?;
    let tau_autos: Vec<Automorphism> = taus.iter().map(CharPair::to_automorphism).collect();
    let lambdas: Vec<Ratio> = autos
        .iter()
        .map(|phi| Ok(stretch_factor(phi)?.lambda))
        .collect::<Result<_>>()?;

    let indices: Vec<usize> = (0..cfg.sample_size).collect();
    let records: Vec<Result<ElementRecord>> = par::map_slice(&indices, |&id| {
        let mut rng = Rng::derive(cfg.seed, id as u64);
        let sampled = sample_cyclically_reduced(k, cfg.word_length, &mut rng);
        let trace = minimize(k, &sampled)?;
        let was_minimal = trace.steps.is_empty();
        let minimal = trace.result;

        // transformation step: keep the image only when it is longer
        let mut label = None;
        let mut word = minimal.clone();
        if rng.chance(cfg.apply_probability) {
            let j = rng.below(autos.len() as u64) as usize;
            let image = autos[j].apply_cyclic(&minimal)?;
            if image.len() > minimal.len() {
                label = Some(j);
                word = image;
            }
        }

        let features = NormalizedWhiteheadGraph::of_word(k, &word)?;
        let centroid_distances: Vec<f64> = centroids
            .iter()
            .map(|c| features.distance(c))
            .collect::<Result<_>>()?;
        let tau_reduces = match label {
            Some(j) => Some(tau_autos[j].apply_cyclic(&word)?.len() < word.len()),
            None => None,
        };
        Ok(ElementRecord {
            id,
            label,
            was_minimal,
            norm_before: minimal.len(),
            norm_after: word.len(),
            features: features.labels().to_vec(),
            centroid_distances,
            tau_reduces,
        })
    });
    let records: Vec<ElementRecord> = records.into_iter().collect::<Result<_>>()?;

    let clusters: Vec<ClusterSummary> = autos
        .iter()
        .enumerate()
        .map(|(j, _)| {
            let mut distances: Vec<f64> = records
                .iter()
                .filter(|r| r.label == Some(j))
                .map(|r| r.centroid_distances[j])
                .collect();
            distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let size = distances.len();
            let reduced = records
                .iter()
                .filter(|r| r.label == Some(j) && r.tau_reduces == Some(true))
                .count();
            ClusterSummary {
                automorphism: cfg.automorphisms[j].clone(),
                tau: taus[j],
                lambda: lambdas[j],
                size,
                reduced_fraction: if size == 0 { 0.0 } else { reduced as f64 / size as f64 },
                mean_distance: if size == 0 {
                    0.0
                } else {
                    distances.iter().sum::<f64>() / size as f64
                },
                p95_distance: if size == 0 {
                    0.0
                } else {
                    distances[((size as f64 * 0.95).ceil() as usize).clamp(1, size) - 1]
                },
            }
        })
        .collect();

    let inter_centroid: Vec<Vec<f64>> = centroids
        .iter()
        .map(|a| centroids.iter().map(|b| a.distance(b).unwrap_or(f64::NAN)).collect())
        .collect();

    Ok(ClusterReport {
        config: cfg.clone(),
        centroids: centroids.iter().map(|c| c.labels().to_vec()).collect(),
        clusters,
        inter_centroid,
        records,
    })
}

/// Fraction of transformed elements whose nearest predicted centroid is the
/// automorphism that produced them.
pub fn nearest_centroid_classify(report: &ClusterReport) -> Result<f64> {
    let transformed: Vec<&ElementRecord> =
        report.records.iter().filter(|r| r.label.is_some()).collect();
    if transformed.is_empty() || report.centroids.is_empty() {
        return Err(Error::InvalidConfig(
            "classification needs at least one transformed element and one centroid".into(),
        ));
    }
    let correct = transformed
        .iter()
        .filter(|r| {
            let nearest = r
                .centroid_distances
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
                .map(|(j, _)| j);
            nearest == r.label
        })
        .count();
    Ok(correct as f64 / transformed.len() as f64)
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Freely reduced words.
    Reduced,
    /// Cyclically reduced words.
    CyclicallyReduced,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Reduced => write!(f, "F"),
            Domain::CyclicallyReduced => write!(f, "C"),
        }
    }
}

/// Predicates whose genericity can be estimated empirically.
#[derive(Copy, Clone, PartialEq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GenericityPredicate {
    AlwaysTrue,
    StrictlyMinimal,
    /// All level-`m` occurrence frequencies within `epsilon` of the uniform
    /// coordinate.
    UniformNeighborhood { epsilon: f64, m: usize },
}

impl GenericityPredicate {
    fn holds(&self, k: usize, w: &CyclicWord) -> Result<bool> {
        match *self {
            GenericityPredicate::AlwaysTrue => Ok(true),
            GenericityPredicate::StrictlyMinimal => crate::minimizer::is_strictly_minimal(k, w),
            GenericityPredicate::UniformNeighborhood { epsilon, m } => {
                let reference = crate::currents::uniform_coordinate(k, m);
                let norm = w.len() as f64;
                for v in enumerate_reduced(k, m) {
                    let freq = w.occurrences(&v)? as f64 / norm;
                    if (freq - reference).abs() > epsilon {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

impl fmt::Display for GenericityPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenericityPredicate::AlwaysTrue => write!(f, "always-true"),
            GenericityPredicate::StrictlyMinimal => write!(f, "strictly-minimal"),
            GenericityPredicate::UniformNeighborhood { epsilon, m } => {
                write!(f, "uniform-neighborhood(eps={epsilon}, m={m})")
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityRow {
    pub n: usize,
    pub samples: usize,
    pub hits: usize,
    pub frequency: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityReport {
    pub k: usize,
    pub domain: Domain,
    pub predicate: String,
    pub rows: Vec<GenericityRow>,
}

/// Empirical frequency of a predicate among random length-`n` elements of
/// the domain, tabulated over the given lengths.
pub fn estimate_genericity(
    k: usize,
    domain: Domain,
    predicate: GenericityPredicate,
    lengths: &[usize],
    samples: usize,
    seed: u64,
) -> Result<GenericityReport> {
    assert!(samples >= 1);
    let mut rows = Vec::with_capacity(lengths.len());
    for (row, &n) in lengths.iter().enumerate() {
        assert!(n >= 1);
        let indices: Vec<u64> = (0..samples as u64).collect();
        let outcomes: Vec<Result<bool>> = par::map_slice(&indices, |&i| {
            let mut rng = Rng::derive(seed, (row as u64) << 32 | i);
            let cyclic = match domain {
                Domain::CyclicallyReduced => sample_cyclically_reduced(k, n, &mut rng),
                Domain::Reduced => {
                    // predicates on F read the cyclically reduced form
                    let (core, _) = sample_reduced(k, n, &mut rng).cyclic_reduce()?;
                    core
                }
            };
            predicate.holds(k, &cyclic)
        });
        let mut hits = 0usize;
        for outcome in outcomes {
            if outcome? {
                hits += 1;
            }
        }
        rows.push(GenericityRow {
            n,
            samples,
            hits,
            frequency: hits as f64 / samples as f64,
        });
    }
    Ok(GenericityReport { k, domain, predicate: predicate.to_string(), rows })
}

/// Writes `report.json`, `features.csv` and `clusters.svg` into `out_dir`.
pub fn write_outputs(report: &ClusterReport, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    fs::write(
        out_dir.join("report.json"),
        serde_json::to_string_pretty(report)? + "\n",
    )?;
    fs::write(out_dir.join("features.csv"), features_csv(report))?;
    fs::write(out_dir.join("clusters.svg"), clusters_svg(report))?;
    Ok(())
}

/// One row per element: id, label literal, the `k(2k−1)` feature columns,
/// then the distance to each predicted centroid.
pub fn features_csv(report: &ClusterReport) -> String {
    let k = report.config.k;
    let mut out = String::new();
    out.push_str("id,label");
    for h in edge_headers(k) {
        out.push(',');
        out.push_str(&h);
    }
    for j in 0..report.centroids.len() {
        out.push_str(&format!(",dist_{j}"));
    }
    out.push('\n');
    for r in &report.records {
        let label = match r.label {
            Some(j) => report.config.automorphisms[j].clone(),
            None => "none".into(),
        };
        out.push_str(&format!("{},{:?}", r.id, label));
        for x in &r.features {
            out.push_str(&format!(",{x}"));
        }
        for d in &r.centroid_distances {
            out.push_str(&format!(",{d}"));
        }
        out.push('\n');
    }
    out
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Scatter plot of the two highest-variance feature coordinates, one dot
/// per element colored by label, predicted centroids as black diamonds.
pub fn clusters_svg(report: &ClusterReport) -> String {
    let dims = edge_count(report.config.k);
    let (x_idx, y_idx) = top_variance_coords(report, dims);

    let (width, height, margin) = (640.0, 480.0, 50.0);
    let points: Vec<(f64, f64)> = report
        .records
        .iter()
        .map(|r| (r.features[x_idx], r.features[y_idx]))
        .chain(report.centroids.iter().map(|c| (c[x_idx], c[y_idx])))
        .collect();
    let (x_lo, x_hi) = span(points.iter().map(|p| p.0));
    let (y_lo, y_hi) = span(points.iter().map(|p| p.1));
    let sx = move |x: f64| margin + (x - x_lo) / (x_hi - x_lo).max(1e-12) * (width - 2.0 * margin);
    let sy =
        move |y: f64| height - margin - (y - y_lo) / (y_hi - y_lo).max(1e-12) * (height - 2.0 * margin);

    let headers = edge_headers(report.config.k);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">edge {}</text>\n",
        width / 2.0,
        height - 12.0,
        headers[x_idx]
    ));
    svg.push_str(&format!(
        "<text x=\"14\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" \
         transform=\"rotate(-90 14 {})\">edge {}</text>\n",
        height / 2.0,
        height / 2.0,
        headers[y_idx]
    ));
    for r in &report.records {
        let color = match r.label {
            Some(j) => PALETTE[j % PALETTE.len()],
            None => "#999999",
        };
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{}\" fill-opacity=\"0.6\"/>\n",
            sx(r.features[x_idx]),
            sy(r.features[y_idx]),
            color
        ));
    }
    for (j, c) in report.centroids.iter().enumerate() {
        let (cx, cy) = (sx(c[x_idx]), sy(c[y_idx]));
        svg.push_str(&format!(
            "<path d=\"M {} {} L {} {} L {} {} L {} {} Z\" fill=\"{}\" stroke=\"black\" \
             stroke-width=\"1.5\"/>\n",
            fmt2(cx - 7.0),
            fmt2(cy),
            fmt2(cx),
            fmt2(cy - 7.0),
            fmt2(cx + 7.0),
            fmt2(cy),
            fmt2(cx),
            fmt2(cy + 7.0),
            PALETTE[j % PALETTE.len()],
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn fmt2(x: f64) -> String {
    format!("{x:.2}")
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        (0.0, 1.0)
    } else {
        (lo, hi)
    }
}

fn top_variance_coords(report: &ClusterReport, dims: usize) -> (usize, usize) {
    let n = report.records.len().max(1) as f64;
    let mut variances: Vec<(f64, usize)> = (0..dims)
        .map(|i| {
            let mean: f64 = report.records.iter().map(|r| r.features[i]).sum::<f64>() / n;
            let var: f64 =
                report.records.iter().map(|r| (r.features[i] - mean).powi(2)).sum::<f64>() / n;
            (var, i)
        })
        .collect();
    variances.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let x = variances.first().map_or(0, |v| v.1);
    let y = variances.get(1).map_or(1.min(dims - 1), |v| v.1);
    (x, y)
}
