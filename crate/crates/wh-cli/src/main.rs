//! `wh` — command-line frontend for the whitehead toolkit.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error (synopsis goes to
//! stderr). Word and automorphism arguments are freely reduced on input
//! with a notice on stderr when that changes them. `--json` switches every
//! subcommand to machine-readable output.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use serde_json::json;

use whitehead::cluster::{self, Domain, ExperimentConfig, GenericityPredicate};
use whitehead::currents::{
    empirical_limit_check, euler_word_with_cap, TruncatedCurrent, DEFAULT_EULER_CAP,
};
use whitehead::ideal::{
    factorize_with_cap, ideal_step_with_cap, stretch_factor_with_cap, DEFAULT_MAX_STEPS,
};
use whitehead::minimizer::{automorphic_equivalence, minimize, DEFAULT_NODE_CAP};
use whitehead::word::{free_reduce, parse_letters};
use whitehead::{Automorphism, CyclicWord, NormalizedWhiteheadGraph, Rng, WhiteheadGraph, Word};

const SYNOPSIS: &str = "\
usage: wh <subcommand> [args] [flags]

subcommands:
  reduce <word>                    freely reduce a word
  cyclic <word>                    cyclically reduced form and conjugator
  count <v> <w>                    occurrences of v in the cyclic word of w
  minimize <word>                  Whitehead minimization with trace
  equiv <u> <v> [--cap N]          automorphic equivalence
  whgraph <word>                   weighted Whitehead graph
  dist <w1> <w2>                   max-metric distance of normalized graphs
  euler --m M [--k K] [--cap N]    Euler word at level M
  stretch <auto>                   generic stretching factor
  ideal-step <auto>                length-reducing Whitehead pair
  factorize <auto> [--max-steps N] factorization over a simple automorphism
  current uniform [--radius R]     uniform current coordinates
  current rational <word> [--radius R]
  current check <file>             invariance check of a stored current
  limit-check <auto> [--n N] [--samples S] [--seed X]
  genericity --predicate P --lengths L1,L2 [--domain F|C] [--samples S]
             [--seed X] [--epsilon E] [--level M]
  run --config cfg.json --out DIR  cluster experiment

flags: --k (rank, default 2), --seed, --json, --cap, --radius, --config,
       --out, plus the per-subcommand flags above";

enum CliError {
    Usage(String),
    Domain(String),
}

impl From<whitehead::Error> for CliError {
    fn from(e: whitehead::Error) -> CliError {
        CliError::Domain(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            eprintln!("{SYNOPSIS}");
            ExitCode::from(2)
        }
    }
}

struct Args {
    positional: Vec<String>,
    flags: HashMap<String, String>,
    json: bool,
}

impl Args {
    /// Splits flags from positionals, rejecting flags outside `allowed`.
    fn parse(argv: &[String], allowed: &[&str]) -> Result<Args, CliError> {
        let mut positional = Vec::new();
        let mut flags = HashMap::new();
        let mut json = false;
        let mut it = argv.iter().peekable();
        while let Some(arg) = it.next() {
            if let Some(name) = arg.strip_prefix("--") {
                let (name, inline) = match name.split_once('=') {
                    Some((n, v)) => (n, Some(v.to_string())),
                    None => (name, None),
                };
                if name == "json" {
                    json = true;
                    continue;
                }
                if !allowed.contains(&name) {
                    return Err(usage(format!("unknown flag --{name}")));
                }
                let value = match inline {
                    Some(v) => v,
                    None => it
                        .next()
                        .ok_or_else(|| usage(format!("flag --{name} needs a value")))?
                        .clone(),
                };
                flags.insert(name.to_string(), value);
            } else {
                positional.push(arg.clone());
            }
        }
        Ok(Args { positional, flags, json })
    }

    fn k(&self) -> Result<usize, CliError> {
        self.numeric("k", 2)
    }

    fn numeric<T: std::str::FromStr>(&self, name: &str, default: T) -> Result<T, CliError> {
        match self.flags.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| usage(format!("flag --{name} got unparsable value {v:?}"))),
        }
    }

    fn positional(&self, idx: usize, what: &str) -> Result<&str, CliError> {
        let value = self
            .positional
            .get(idx)
            .ok_or_else(|| usage(format!("missing {what}")))?;
        if value.is_empty() {
            return Err(usage(format!("{what} must be nonempty")));
        }
        Ok(value)
    }

    fn expect_positionals(&self, n: usize) -> Result<(), CliError> {
        if self.positional.len() > n {
            return Err(usage(format!(
                "unexpected argument {:?}",
                self.positional[n]
            )));
        }
        Ok(())
    }
}

/// Parses a word, reducing it first and noting the reduction on stderr.
fn parse_word(s: &str, k: usize) -> Result<Word, CliError> {
    let letters = parse_letters(s, k).map_err(|e| usage(e.to_string()))?;
    let word = free_reduce(letters.iter().copied());
    if word.len() != letters.len() {
        eprintln!("note: input {s:?} freely reduced to \"{word}\"");
    }
    Ok(word)
}

/// Parses a word and takes its cyclically reduced form, with a notice when
/// that changes it.
fn parse_cyclic(s: &str, k: usize) -> Result<CyclicWord, CliError> {
    let word = parse_word(s, k)?;
    if word.is_empty() {
        return Err(usage(format!("word {s:?} is trivial")));
    }
    let (core, conjugator) = word.cyclic_reduce()?;
    if !conjugator.is_empty() {
        eprintln!("note: input {s:?} cyclically reduced to \"{core}\"");
    }
    Ok(core)
}

fn parse_auto(s: &str, k: usize) -> Result<Automorphism, CliError> {
    Automorphism::parse(s, k).map_err(|e| usage(e.to_string()))
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn dispatch(argv: &[String]) -> CliResult {
    let Some(cmd) = argv.first() else {
        return Err(usage("no subcommand"));
    };
    let rest = &argv[1..];
    match cmd.as_str() {
        "reduce" => cmd_reduce(rest),
        "cyclic" => cmd_cyclic(rest),
        "count" => cmd_count(rest),
        "minimize" => cmd_minimize(rest),
        "equiv" => cmd_equiv(rest),
        "whgraph" => cmd_whgraph(rest),
        "dist" => cmd_dist(rest),
        "euler" => cmd_euler(rest),
        "stretch" => cmd_stretch(rest),
        "ideal-step" => cmd_ideal_step(rest),
        "factorize" => cmd_factorize(rest),
        "current" => cmd_current(rest),
        "limit-check" => cmd_limit_check(rest),
        "genericity" => cmd_genericity(rest),
        "run" => cmd_run(rest),
        other => Err(usage(format!("unknown subcommand {other:?}"))),
    }
}

fn cmd_reduce(argv: &[String]) -> CliResult {
    let args = Args::parse(argv, &["k"])?;
    args.expect_positionals(1)?;
    let k = args.k()?;
    let raw = args.positional(0, "word")?;
    let letters = parse_letters(raw, k).map_err(|e| usage(e.to_string()))?;
    let word = free_reduce(letters);
    if args.json {
        print_json(&json!({"word": word.to_string(), "length": word.len()}));
    } else {
        println!("{word}");
    }
    Ok(())
}

fn cmd_cyclic(argv: &[String]) -> CliResult {
    let args = Args::parse(argv, &["k"])?;
    args.expect_positionals(1)?;
    let k = args.k()?;
    let word = parse_word(args.positional(0, "word")?, k)?;
    if word.is_empty() {
        return Err(usage("word is trivial"));
    }
    let (core, conjugator) = word.cyclic_reduce()?;
    if args.json {
        print_json(&json!({
            "cyclic": core.to_string(),
            "conjugator": conjugator.to_string(),
            "length": core.len(),
        }));
    } else {
        println!("cyclic: {core}");
        println!("conjugator: {conjugator}");
        println!("length: {}", core.len());
    }
    Ok(())
}

fn cmd_count(argv: &[String]) -> CliResult {
    let args = Args::parse(argv, &["k"])?;
    args.expect_positionals(2)?;
    let k = args.k()?;
    let v = parse_word(args.positional(0, "pattern word")?, k)?;
    if v.is_empty() {
        return Err(usage("pattern word is trivial"));
    }
    let w = parse_cyclic(args.positional(1, "host word")?, k)?;
    let count = w.occurrences(&v)?;
    if args.json {
        print_json(&json!({"count": count}));
    } else {
        println!("{count}");
    }
    Ok(())
}

fn cmd_minimize(argv: &[String]) -> CliResult {
    let args = Args::parse(argv, &["k"])?;
    args.expect_positionals(1)?;
    let k = args.k()?;
    let w = parse_cyclic(args.positional(0, "word")?, k)?;
    let trace = minimize(k, &w)?;
    if args.json {
        print_json(&trace);
    } else {
        println!("{}", trace.result);
        println!("length: {} -> {}", trace.start.len(), trace.result.len());
        for (i, step) in trace.steps.iter().enumerate() {
            println!(
                "step {}: {} -> {} ({})",
                i + 1,
                step.tau,
                step.result,
                step.change
            );
        }
    }
    Ok(())
}

fn cmd_equiv(argv: &[String]) -> CliResult {
    let args = Args::parse(argv, &["k", "cap"])?;
    args.expect_positionals(2)?;
    let k = args.k()?;
    let cap: usize = args.numeric("cap", DEFAULT_NODE_CAP)?;
    let u = parse_cyclic(args.positional(0, "first word")?, k)?;
    let v = parse_cyclic(args.positional(1, "second word")?, k)?;
    let outcome = automorphic_equivalence(k, &u, &v, cap)?;
    if args.json {
        print_json(&outcome);
    } else {
        println!("{:?}", outcome.verdict);
        println!("minimal forms: {} | {}", outcome.minimal_u, outcome.minimal_v);
        println!("visited: {}", outcome.visited);
    }
    Ok(())
}

fn cmd_whgraph(argv: &[String]) -> CliResult {
    let args = Args::parse(argv, &["k"])?;
    args.expect_positionals(1)?;
    let k = args.k()?;
    let w = parse_cyclic(args.positional(0, "word")?, k)?;
    let graph = WhiteheadGraph::of_word(k, &w)?;
    if args.json {
        print_json(&graph);
    } else {
        for (i, label) in graph.labels().iter().enumerate() {
            let (u, v) = whitehead::graph::edge_endpoints(k, i);
            println!("{u}{v}: {label}");
        }
        println!("total: {}", graph.total());
    }
    Ok(())
}

fn cmd_dist(argv: &[String]) -> CliResult {
    let args = Args::parse(argv, &["k"])?;
    args.expect_positionals(2)?;
    let k = args.k()?;
    let a = parse_cyclic(args.positional(0, "first word")?, k)?;
    let b = parse_cyclic(args.positional(1, "second word")?, k)?;
    let d = NormalizedWhiteheadGraph::of_word(k, &a)?
        .distance(&NormalizedWhiteheadGraph::of_word(k, &b)?)?;
    if args.json {
        print_json(&json!({"distance": d}));
    } else {
        println!("{d}");
    }
    Ok(())
}

fn cmd_euler(argv: &[String]) -> CliResult {
    let args = Args::parse(argv, &["k", "m", "cap"])?;
    args.expect_positionals(0)?;
    let k = args.k()?;
    let m: usize = args.numeric("m", 0)?;
    if m == 0 {
        return Err(usage("--m is required"));
    }
    let cap: u64 = args.numeric("cap", DEFAULT_EULER_CAP)?;
    let e = euler_word_with_cap(k, m, cap)?;
    if args.json {
        print_json(&json!({
            "k": k,
            "m": m,
            "length": e.word.len(),
            "word": e.word.to_string(),
        }));
    } else {
        println!("{}", e.word);
        println!("length: {}", e.word.len());
    }
    Ok(())
}

fn cmd_stretch(argv: &[String]) -> CliResult {
    let args = Args::parse(argv, &["k", "cap"])?;
    args.expect_positionals(1)?;
    let k = args.k()?;
    let cap: u64 = args.numeric("cap", DEFAULT_EULER_CAP)?;
    let phi = parse_auto(args.positional(0, "automorphism")?, k)?;
    let s = stretch_factor_with_cap(&phi, cap)?;
    if args.json {
        print_json(&s);
    } else {
        println!("lambda: {}", s.lambda);
        println!(
            "raw: {}/{} at level {} ({})",
            s.raw_num,
            s.raw_den,
            s.m_used,
            if s.stabilized { "stabilized" } else { "NOT stabilized" }
        );
    }
    Ok(())
}

fn cmd_ideal_step(argv: &[String]) -> CliResult {
    let args = Args::parse(argv, &["k", "cap"])?;
    args.expect_positionals(1)?;
    let k = args.k()?;
    let cap: u64 = args.numeric("cap", DEFAULT_EULER_CAP)?;
    let phi = parse_auto(args.positional(0, "automorphism")?, k)?;
    let tau = ideal_step_with_cap(&phi, cap)?;
    let before = stretch_factor_with_cap(&phi, cap)?.lambda;
    let after =
        stretch_factor_with_cap(&tau.to_automorphism().compose(&phi)?, cap)?.lambda;
    if args.json {
        print_json(&json!({
            "tau": tau,
            "lambda_before": before,
            "lambda_after": after,
        }));
    } else {
        println!("{tau}");
        println!("lambda: {before} -> {after}");
    }
    Ok(())
}

fn cmd_factorize(argv: &[String]) -> CliResult {
    let args = Args::parse(argv, &["k", "cap", "max-steps"])?;
    args.expect_positionals(1)?;
    let k = args.k()?;
    let cap: u64 = args.numeric("cap", DEFAULT_EULER_CAP)?;
    let max_steps: usize = args.numeric("max-steps", DEFAULT_MAX_STEPS)?;
    let phi = parse_auto(args.positional(0, "automorphism")?, k)?;
    let f = factorize_with_cap(&phi, max_steps, cap)?;
    if args.json {
        print_json(&f);
    } else {
        for (i, sigma) in f.sigmas.iter().enumerate() {
            println!("sigma {}: {}", i + 1, sigma);
        }
        println!("alpha: {}", f.alpha);
        let l: Vec<String> = f.l_sequence.iter().map(|r| r.to_string()).collect();
        println!("L-sequence: {}", l.join(" < "));
    }
    Ok(())
}

fn cmd_current(argv: &[String]) -> CliResult {
    let Some(mode) = argv.first() else {
        return Err(usage("current needs a mode: uniform | rational | check"));
    };
    let rest = &argv[1..];
    match mode.as_str() {
        "uniform" => {
            let args = Args::parse(rest, &["k", "radius"])?;
            args.expect_positionals(0)?;
            let nu = TruncatedCurrent::uniform(args.k()?, args.numeric("radius", 4)?)?;
            print_json(&nu);
            Ok(())
        }
        "rational" => {
            let args = Args::parse(rest, &["k", "radius"])?;
            args.expect_positionals(1)?;
            let k = args.k()?;
            let g = parse_word(args.positional(0, "word")?, k)?;
            if g.is_empty() {
                return Err(usage("word is trivial"));
            }
            let nu = TruncatedCurrent::rational(k, &g, args.numeric("radius", 4)?)?;
            print_json(&nu);
            Ok(())
        }
        "check" => {
            let args = Args::parse(rest, &[])?;
            args.expect_positionals(1)?;
            let path = PathBuf::from(args.positional(0, "file")?);
            let text = std::fs::read_to_string(&path).map_err(whitehead::Error::from)?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(whitehead::Error::from)?;
            let nu = TruncatedCurrent::from_json(&value)?;
            let violations = nu.check_invariance();
            if args.json {
                print_json(&json!({"violations": violations}));
            } else if violations.is_empty() {
                println!("invariance: ok");
            } else {
                println!("invariance: {} violation(s)", violations.len());
                for v in &violations {
                    println!("  {v}");
                }
            }
            Ok(())
        }
        other => Err(usage(format!("unknown current mode {other:?}"))),
    }
}

fn cmd_limit_check(argv: &[String]) -> CliResult {
    let args = Args::parse(argv, &["k", "n", "samples", "seed"])?;
    args.expect_positionals(1)?;
    let k = args.k()?;
    let phi = parse_auto(args.positional(0, "automorphism")?, k)?;
    let n: usize = args.numeric("n", 1000)?;
    let samples: usize = args.numeric("samples", 100)?;
    let seed: u64 = args.numeric("seed", 0)?;
    if n == 0 || samples == 0 {
        return Err(usage("--n and --samples must be positive"));
    }
    let mut rng = Rng::seed_from_u64(seed);
    let report = empirical_limit_check(&phi, n, samples, &mut rng)?;
    if args.json {
        print_json(&report);
    } else {
        println!(
            "max deviation: {} over {} words (n = {}, {} samples)",
            report.max_deviation,
            report.rows.len(),
            report.n,
            report.samples
        );
    }
    Ok(())
}

fn cmd_genericity(argv: &[String]) -> CliResult {
    let args = Args::parse(
        argv,
        &["k", "predicate", "domain", "lengths", "samples", "seed", "epsilon", "level"],
    )?;
    args.expect_positionals(0)?;
    let k = args.k()?;
    let domain = match args.flags.get("domain").map(String::as_str) {
        None | Some("C") => Domain::CyclicallyReduced,
        Some("F") => Domain::Reduced,
        Some(other) => return Err(usage(format!("domain must be F or C, got {other:?}"))),
    };
    let predicate = match args.flags.get("predicate").map(String::as_str) {
        Some("always-true") => GenericityPredicate::AlwaysTrue,
        Some("strictly-minimal") => GenericityPredicate::StrictlyMinimal,
        Some("uniform-neighborhood") => GenericityPredicate::UniformNeighborhood {
            epsilon: args.numeric("epsilon", 0.01)?,
            m: args.numeric("level", 2)?,
        },
        Some(other) => return Err(usage(format!("unknown predicate {other:?}"))),
        None => return Err(usage("--predicate is required")),
    };
    let lengths: Vec<usize> = args
        .flags
        .get("lengths")
        .ok_or_else(|| usage("--lengths is required"))?
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| usage(format!("bad length {s:?}"))))
        .collect::<Result<_, _>>()?;
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(usage("--lengths needs positive entries"));
    }
    let samples: usize = args.numeric("samples", 200)?;
    if samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let seed: u64 = args.numeric("seed", 0)?;
    let report = cluster::estimate_genericity(k, domain, predicate, &lengths, samples, seed)?;
    if args.json {
        print_json(&report);
    } else {
        println!("predicate {} on domain {}", report.predicate, report.domain);
        for row in &report.rows {
            println!("n = {:>6}: {}/{} = {}", row.n, row.hits, row.samples, row.frequency);
        }
    }
    Ok(())
}

fn cmd_run(argv: &[String]) -> CliResult {
    let args = Args::parse(argv, &["config", "out"])?;
    args.expect_positionals(0)?;
    let config_path = args
        .flags
        .get("config")
        .ok_or_else(|| usage("--config is required"))?;
    let cfg = ExperimentConfig::from_json_file(&PathBuf::from(config_path))
        .map_err(|e| usage(format!("config {config_path:?}: {e}")))?;
    let out_dir = args
        .flags
        .get("out")
        .map(PathBuf::from)
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| usage("--out (or output_dir in the config) is required"))?;

    let report = cluster::run_experiment(&cfg)?;
    cluster::write_outputs(&report, &out_dir)?;

    if args.json {
        let accuracy = cluster::nearest_centroid_classify(&report).ok();
        print_json(&json!({
            "samples": report.records.len(),
            "clusters": report.clusters,
            "accuracy": accuracy,
            "outputs": ["report.json", "features.csv", "clusters.svg"],
        }));
    } else {
        println!("samples: {}", report.records.len());
        for c in &report.clusters {
            println!(
                "cluster {:?}: size {}, reduced {}, mean dist {:.4}, p95 {:.4}",
                c.automorphism, c.size, c.reduced_fraction, c.mean_distance, c.p95_distance
            );
        }
        if let Ok(accuracy) = cluster::nearest_centroid_classify(&report) {
            println!("nearest-centroid accuracy: {accuracy}");
        }
        println!("outputs written: report.json features.csv clusters.svg");
    }
    Ok(())
}
