//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Exact combinatorial identities are asserted with no tolerance; the
//! statistical checks run at desk scale with fixed seeds and the stated
//! thresholds.

use whitehead::cluster::{
    estimate_genericity, nearest_centroid_classify, run_experiment, Domain, ExperimentConfig,
    GenericityPredicate,
};
use whitehead::currents::{euler_word, TruncatedCurrent};
use whitehead::ideal::{factorize, ideal_step, stretch_at, stretch_factor, Ratio, DEFAULT_MAX_STEPS};
use whitehead::minimizer::{automorphic_equivalence, minimize, EquivalenceVerdict, DEFAULT_NODE_CAP};
use whitehead::word::{enumerate_reduced, Letter, Word};
use whitehead::{
    sample_cyclically_reduced, sample_reduced, Automorphism, CharPair, CyclicWord, Rng,
};

const EULER_CAP: u64 = whitehead::currents::DEFAULT_EULER_CAP;

fn auto(s: &str) -> Automorphism {
    Automorphism::parse(s, 2).unwrap()
}

fn conjugation(k: usize, g: &Word) -> Automorphism {
    let images: Vec<Word> = (0..k)
        .map(|i| g.inverse().concat(&Word::single(Letter::new(i, false))).concat(g))
        .collect();
    let inverse: Vec<Word> = (0..k)
        .map(|i| g.concat(&Word::single(Letter::new(i, false))).concat(&g.inverse()))
        .collect();
    Automorphism::with_inverse(images, inverse).unwrap()
}

/// The eight rank-2 Nielsen moves plus two 2-step compositions; all
/// non-simple.
fn hand_listed_automorphisms() -> Vec<Automorphism> {
    [
        "a->ab, b->b",
        "a->aB, b->b",
        "a->ba, b->b",
        "a->Ba, b->b",
        "a->a, b->ba",
        "a->a, b->bA",
        "a->a, b->ab",
        "a->a, b->Ab",
        "a->abb, b->b",
        "a->ab, b->bab",
    ]
    .iter()
    .map(|s| auto(s))
    .collect()
}

#[test]
fn criterion_01_euler_word_exactness() {
    for (k, m, expected) in [(2usize, 2usize, 12u64), (2, 3, 36), (3, 2, 30)] {
        let e = euler_word(k, m).unwrap();
        assert_eq!(e.word.len() as u64, expected, "||w_{m}|| at rank {k}");
        for v in enumerate_reduced(k, m) {
            assert_eq!(e.word.occurrences(&v).unwrap(), 1, "{v} in w_{m} at rank {k}");
        }
        // cyclic reducedness, revalidated from the raw letters
        assert!(CyclicWord::new(e.word.letters().to_vec()).is_ok());
    }
    println!("acceptance criterion 1 (euler word exactness): PASS");
}

#[test]
fn criterion_02_length_change_oracle() {
    let mut rng = Rng::seed_from_u64(0xC2);
    for k in [2usize, 3] {
        let pairs = CharPair::enumerate(k).unwrap();
        for _ in 0..500 {
            let w = sample_cyclically_reduced(k, (rng.below(60) + 1) as usize, &mut rng);
            let tau = &pairs[rng.below(pairs.len() as u64) as usize];
            let graph = whitehead::WhiteheadGraph::of_word(k, &w).unwrap();
            let image = tau.to_automorphism().apply_cyclic(&w).unwrap();
            assert_eq!(
                graph.length_change(tau),
                image.len() as i64 - w.len() as i64,
                "k = {k}, w = {w}, tau = {tau}"
            );
        }
    }
    println!("acceptance criterion 2 (length-change oracle, 1000 cases): PASS");
}

#[test]
fn criterion_03_current_identities() {
    // L(n_A) = 1: exact in rank 2 (all coordinates are powers of two),
    // within one ulp otherwise
    let uniform2 = TruncatedCurrent::uniform(2, 4).unwrap();
    assert_eq!(uniform2.length(), 1.0);
    let uniform3 = TruncatedCurrent::uniform(3, 4).unwrap();
    assert!((uniform3.length() - 1.0).abs() < 1e-12);

    // L(η_w) = ||w|| exactly for 100 random words (integer arithmetic in f64)
    let mut rng = Rng::seed_from_u64(0xC3);
    for _ in 0..100 {
        let w = sample_cyclically_reduced(2, (rng.below(40) + 1) as usize, &mut rng);
        let eta = TruncatedCurrent::rational(2, &w.linearize(), 4).unwrap();
        assert_eq!(eta.length(), w.len() as f64);
        // level sums and both invariance identities
        for m in 1..=4usize {
            assert!((eta.level_sum(m) - w.len() as f64).abs() <= 1e-9);
        }
        assert!(eta.check_invariance().is_empty());
    }
    for nu in [&uniform2, &uniform3] {
        for m in 1..=4usize {
            assert!((nu.level_sum(m) - 1.0).abs() <= 1e-9);
        }
        assert!(nu.check_invariance().is_empty());
    }
    println!("acceptance criterion 3 (current identities): PASS");
}

/// Two independent routes must agree on λ(a↦ab, b↦b) = 7/6: the exact
/// Euler-word computation (||φ(w₂)|| = 14, stable from level 2 to 3; the
/// cut formula on Γ_{w₂} gives the same +2 change) and the Monte Carlo
/// mean stretch of random length-10⁴ words within 1%.
#[test]
fn criterion_04_generic_stretching_factor() {
    let phi = auto("a->ab, b->b");

    // exact route, stable from level 2 to level 3
    assert_eq!(stretch_at(&phi, 2, EULER_CAP).unwrap(), (14, 12));
    assert_eq!(stretch_at(&phi, 3, EULER_CAP).unwrap(), (42, 36));
    let s = stretch_factor(&phi).unwrap();
    assert!(s.stabilized);
    assert_eq!(s.lambda, Ratio::new(7, 6));

    // Monte Carlo route: mean cyclic stretch of random length-10⁴ words
    let mut rng = Rng::seed_from_u64(0xC4);
    let n = 10_000usize;
    let samples = 100usize;
    let mut total = 0.0f64;
    for _ in 0..samples {
        let omega = sample_reduced(2, n, &mut rng);
        let (image, _) = phi.apply(&omega).unwrap().cyclic_reduce().unwrap();
        total += image.len() as f64 / n as f64;
    }
    let mc = total / samples as f64;
    let exact = s.lambda.as_f64();
    assert!(
        (mc - exact).abs() <= 0.01 * exact,
        "Monte Carlo mean {mc} vs exact {exact}"
    );
    println!("acceptance criterion 4 (generic stretching factor, two oracles agree): PASS");
}

#[test]
fn criterion_05_ideal_step_and_strict_minimality_of_the_uniform_current() {
    // ten hand-listed non-simple automorphisms: the ideal step strictly
    // decreases the exact stretch factor
    for phi in hand_listed_automorphisms() {
        let before = stretch_factor(&phi).unwrap().lambda;
        assert!(before > Ratio::one(), "{phi:?} must stretch");
        let tau = ideal_step(&phi).unwrap();
        let after = stretch_factor(&tau.to_automorphism().compose(&phi).unwrap())
            .unwrap()
            .lambda;
        assert!(after < before, "{phi:?}: {after} not below {before}");
    }

    // all 8 relabelings have stretch exactly 1
    for sigma in whitehead::Relabeling::enumerate(2) {
        let s = stretch_factor(&sigma.to_automorphism()).unwrap();
        assert_eq!(s.lambda, Ratio::one());
    }

    // 20 random inner automorphisms have stretch exactly 1
    let mut rng = Rng::seed_from_u64(0xC5);
    for _ in 0..20 {
        let g = sample_reduced(2, (rng.below(4) + 1) as usize, &mut rng);
        let s = stretch_factor(&conjugation(2, &g)).unwrap();
        assert_eq!(s.lambda, Ratio::one(), "conjugation by {g}");
    }
    println!("acceptance criterion 5 (ideal step decreases, simple stretch = 1): PASS");
}

#[test]
fn criterion_06_factorization() {
    for phi in hand_listed_automorphisms() {
        let f = factorize(&phi, DEFAULT_MAX_STEPS).unwrap();
        assert!(f.alpha.is_simple().unwrap());
        assert_eq!(*f.l_sequence.first().unwrap(), Ratio::one());
        for pair in f.l_sequence.windows(2) {
            assert!(pair[0] < pair[1], "L-sequence strictly increases");
        }
        // reconstruction on every generator: σ_m … σ_1 α = φ
        let mut rebuilt = f.alpha.clone();
        for sigma in &f.sigmas {
            rebuilt = sigma.to_automorphism().compose(&rebuilt).unwrap();
        }
        assert_eq!(rebuilt.images(), phi.images());
    }
    println!("acceptance criterion 6 (factorization reconstructs, L-sequence increases): PASS");
}

#[test]
fn criterion_07_theorem_a_empirics() {
    let cfg = ExperimentConfig {
        k: 2,
        sample_size: 1000,
        word_length: 1000,
        automorphisms: vec!["a->ab, b->b".into()],
        apply_probability: 1.0,
        epsilon: 0.05,
        seed: 0xC7,
        output_dir: None,
    };
    let report = run_experiment(&cfg).unwrap();
    let cluster = &report.clusters[0];
    assert_eq!(cluster.size, 1000, "p = 1 transforms every element");
    assert!(
        cluster.reduced_fraction >= 0.99,
        "reducing fraction {}",
        cluster.reduced_fraction
    );
    assert!(cluster.mean_distance <= 0.02, "mean distance {}", cluster.mean_distance);
    assert!(cluster.p95_distance <= 0.05, "p95 distance {}", cluster.p95_distance);
    println!("acceptance criterion 7 (cluster empirics for one automorphism): PASS");
}

#[test]
fn criterion_08_clustering_two_automorphisms() {
    let cfg = ExperimentConfig {
        k: 2,
        sample_size: 1000,
        word_length: 1000,
        automorphisms: vec!["a->ab, b->b".into(), "b->ba, a->a".into()],
        apply_probability: 1.0,
        epsilon: 0.05,
        seed: 0xC8,
        output_dir: None,
    };
    let report = run_experiment(&cfg).unwrap();
    let accuracy = nearest_centroid_classify(&report).unwrap();
    assert!(accuracy >= 0.95, "accuracy {accuracy}");
    let inter = report.inter_centroid[0][1];
    let max_intra = report
        .clusters
        .iter()
        .map(|c| c.mean_distance)
        .fold(0.0f64, f64::max);
    assert!(
        inter > 3.0 * max_intra,
        "inter-centroid {inter} vs 3 × max intra mean {max_intra}"
    );
    println!("acceptance criterion 8 (two clusters separate and classify): PASS");
}

#[test]
fn criterion_09_whitehead_algorithm_sanity() {
    let abab = CyclicWord::parse("abab", 2).unwrap();
    assert_eq!(minimize(2, &abab).unwrap().result.len(), 2);

    let commutator = CyclicWord::parse("abAB", 2).unwrap();
    let trace = minimize(2, &commutator).unwrap();
    assert_eq!(trace.result.len(), 4);
    assert!(trace.steps.is_empty());

    let ab = CyclicWord::parse("ab", 2).unwrap();
    let a = CyclicWord::parse("a", 2).unwrap();
    assert_eq!(
        automorphic_equivalence(2, &ab, &a, DEFAULT_NODE_CAP).unwrap().verdict,
        EquivalenceVerdict::Equivalent
    );
    assert_eq!(
        automorphic_equivalence(2, &commutator, &abab, DEFAULT_NODE_CAP).unwrap().verdict,
        EquivalenceVerdict::Inequivalent
    );
    println!("acceptance criterion 9 (minimization and equivalence sanity): PASS");
}

#[test]
fn criterion_10_generic_strict_minimality() {
    let report = estimate_genericity(
        2,
        Domain::CyclicallyReduced,
        GenericityPredicate::StrictlyMinimal,
        &[500],
        1000,
        0xCA,
    )
    .unwrap();
    let frequency = report.rows[0].frequency;
    assert!(frequency >= 0.99, "strictly minimal frequency {frequency}");
    println!("acceptance criterion 10 (random cyclically reduced words are minimal): PASS");
}
