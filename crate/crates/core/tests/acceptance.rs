//! End-to-end acceptance checks. Prints one line per criterion and exits
//! non-zero if any fails, except for the documented failures below.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use lbstar_core::decider::bench_family;
use lbstar_core::oracle::count_derivability_agreement;
use lbstar_core::pentus::{grammar_size_bound, profile_count_bound};
use lbstar_core::proofnet::{enumerate_nets_bounded, net_to_derivation};
use lbstar_core::sisterhood::state_bound;
use lbstar_core::translation::Location;
use lbstar_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn parse(text: &str) -> Sequent {
    parse_sequent(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

/// A witness must decode to a sisterhood-respecting net whose rebuilt
/// derivation checks and proves `s`.
fn witness_ok(s: &Sequent, d: &Decision) -> Result<(), String> {
    let Some(w) = &d.witness else {
        return Err(format!("{s}: derivable without witness"));
    };
    let omega = translate(s);
    let structure = decode(&CodeWord { letters: w.code.clone() }).map_err(|e| format!("{s}: {e}"))?;
    let net = check_net(&structure, &omega).map_err(|e| format!("{s}: {e}"))?;
    if !respects_sisterhood(&structure, &omega) {
        return Err(format!("{s}: witness breaks sisterhood"));
    }
    let derivation = net_to_derivation(&net, s).map_err(|e| format!("{s}: {e}"))?;
    check_derivation(&derivation).map_err(|e| format!("{s}: {e}"))?;
    if derivation.conclusion != *s {
        return Err(format!("{s}: derivation proves {}", derivation.conclusion));
    }
    Ok(())
}

#[derive(Default)]
struct WitnessTally {
    checked: usize,
    failures: Vec<String>,
}

impl WitnessTally {
    fn record(&mut self, s: &Sequent, d: &Decision) {
        if d.derivable {
            self.checked += 1;
            if let Err(e) = witness_ok(s, d) {
                self.failures.push(e);
            }
        }
    }
}

fn fixtures(witnesses: &mut WitnessTally) -> Outcome {
    let start = Instant::now();
    let mut wrong = Vec::new();
    for (text, expected) in common::FIXTURES {
        let s = parse(text);
        match decide(&s, DecideOptions::with_witness()) {
            Ok(d) => {
                if d.derivable != expected {
                    wrong.push(format!("{text}: got {}", d.derivable));
                }
                witnesses.record(&s, &d);
            }
            Err(e) => wrong.push(format!("{text}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    let pass = wrong.is_empty() && elapsed < Duration::from_secs(10);
    outcome(pass, format!("{} fixtures, {} wrong {:?}, {:.2?}", common::FIXTURES.len(), wrong.len(), wrong, elapsed))
}

/// `(max weight, antecedent formulas)`: the shapes are disjoint, and
/// together cover weight 5 with at most one antecedent formula, weight 4
/// with two and weight 3 with three, over two variables with bracket depth
/// at most 2.
const EXHAUSTIVE_SHAPES: [(usize, &[usize]); 3] = [(5, &[0, 1]), (4, &[2]), (3, &[3])];

#[derive(Default)]
struct Equivalence {
    checked: usize,
    derivable: usize,
    unsettled: usize,
    disagreements: Vec<String>,
}

impl Equivalence {
    fn check(&mut self, s: &Sequent, witnesses: &mut WitnessTally) {
        self.checked += 1;
        let decision = match decide(s, DecideOptions::with_witness()) {
            Ok(d) => d,
            Err(e) => {
                self.disagreements.push(format!("{s}: {e}"));
                return;
            }
        };
        let report = count_derivability_agreement([s], |_| decision.derivable);
        self.unsettled += report.budget_exceeded.len();
        for d in report.disagreements {
            self.disagreements.push(format!("{}: oracle {} decide {}", d.sequent, d.oracle, d.decider));
        }
        let by_nets = !enumerate_nets_bounded(&translate(s), true, 1, 64).unwrap().is_empty();
        if by_nets != decision.derivable {
            self.disagreements.push(format!("{s}: nets {by_nets} decide {}", decision.derivable));
        }
        self.derivable += usize::from(decision.derivable);
        witnesses.record(s, &decision);
    }
}

fn oracle_equivalence(witnesses: &mut WitnessTally) -> Outcome {
    let start = Instant::now();
    let mut eq = Equivalence::default();
    for (max_weight, counts) in EXHAUSTIVE_SHAPES {
        let most = *counts.iter().max().unwrap();
        for weight in 0..=max_weight {
            common::visit_sequents(weight, 2, most, &mut |s| {
                if counts.contains(&s.antecedent.formulas().len()) {
                    eq.check(s, witnesses);
                }
            });
        }
    }
    let exhaustive = eq.checked;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let s = common::random_small_sequent(&mut rng, 14);
        eq.check(&s, witnesses);
    }
    let elapsed = start.elapsed();
    let pass = eq.disagreements.is_empty() && eq.unsettled == 0 && elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "{exhaustive} exhaustive + 1000 random, {} derivable, {} disagreements {:?}, {} unsettled, {:.2?}",
            eq.derivable,
            eq.disagreements.len(),
            eq.disagreements.iter().take(3).collect::<Vec<_>>(),
            eq.unsettled,
            elapsed
        ),
    )
}

fn grammar_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut texts: Vec<String> = common::FIXTURES.iter().chain(&common::EXTRA_FIXTURES).map(|f| f.0.to_string()).collect();
    while texts.len() < 80 {
        texts.push(common::random_small_sequent(&mut rng, 14).to_string());
    }
    while texts.len() < 160 {
        texts.push(common::random_dense_sequent(&mut rng, 14).to_string());
    }
    let mut languages = 0;
    let mut most_profiles = 0;
    let mut spans = 0;
    let mut failures = Vec::new();
    for text in &texts {
        let w = translate(&parse(text));
        let n = w.len();
        for preference in [SplitPreference::Left, SplitPreference::Right] {
            let g = build_grammar_with(&w, preference);
            most_profiles = most_profiles.max(g.stats().max_profiles_per_triple);
            if n <= 14 {
                languages += 1;
                let words: BTreeSet<Vec<u32>> = g.grammar.enumerate_language(1_000_000).into_iter().collect();
                let nets: BTreeSet<Vec<u32>> = enumerate_nets_bounded(&w, false, usize::MAX, 64)
                    .unwrap()
                    .iter()
                    .map(|net| encode(&net.structure).letters.iter().map(|&l| l as u32).collect())
                    .collect();
                if words != nets {
                    failures.push(format!("{text} {preference:?}: language {} vs nets {}", words.len(), nets.len()));
                }
            }
            for i in 0..=n {
                for k in (i..=n.saturating_sub(1).min(i + 10)).step_by(2) {
                    spans += 1;
                    let expected = common::brute_force_segments(&w, &g.topology, i, k);
                    let mut got = BTreeSet::new();
                    for (j, relation, x) in g.nonterminals_of(i, k) {
                        for word in g.grammar.enumerate_from(x, 100_000) {
                            got.insert((j, relation.to_vec(), word));
                        }
                    }
                    if expected != got {
                        failures.push(format!(
                            "{text} {preference:?} span ({i},{k}): {} brute force vs {} grammar",
                            expected.len(),
                            got.len()
                        ));
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{languages} languages, {spans} spans, up to {most_profiles} profiles per triple, {} failures {:?}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn structural_bounds() -> Outcome {
    let mut texts: Vec<String> = common::FIXTURES.iter().chain(&common::EXTRA_FIXTURES).map(|f| f.0.to_string()).collect();
    texts.extend((1..=20).map(|k| bench_family("pp", k).unwrap()));
    texts.extend((1..=3).map(|k| bench_family("bracket-nest", k).unwrap()));
    let mut failures = Vec::new();
    let mut worst_k = 0;
    for text in &texts {
        let w = translate(&parse(text));
        let p = w.params();
        let g = build_grammar(&w);
        let stats = g.stats();
        let k_bound = profile_count_bound(p.d);
        worst_k = worst_k.max(stats.max_profiles_per_triple);
        if stats.max_rule_length > 5 {
            failures.push(format!("{text}: rule length {}", stats.max_rule_length));
        }
        if stats.max_profiles_per_triple as u128 > k_bound {
            failures.push(format!("{text}: K = {} > {k_bound}", stats.max_profiles_per_triple));
        }
        let size_bound = grammar_size_bound(p.n, stats.max_profiles_per_triple.max(1) as u128);
        if stats.size as u128 > size_bound {
            failures.push(format!("{text}: size {} > {size_bound}", stats.size));
        }
        let dfa = Dfa::build(&w);
        if dfa.state_count() as u128 > state_bound(p.n, p.b) {
            failures.push(format!("{text}: {} states > {}", dfa.state_count(), state_bound(p.n, p.b)));
        }
    }
    outcome(
        failures.is_empty(),
        format!("{} strings, largest K {worst_k}, {} failures {:?}", texts.len(), failures.len(), failures),
    )
}

fn translation_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = Vec::new();
    for _ in 0..1000 {
        let connectives = rand::Rng::gen_range(&mut rng, 0..=8);
        let a = common::random_formula(&mut rng, &["p", "q", "r"], connectives);
        let s = Sequent::new(MetaFormula::from_formulas([a.clone()]), a.clone());
        let w = translate(&s);
        for (span, f) in w.spans.iter().enumerate() {
            let expected = match f.location {
                Location::Succedent => 0,
                Location::Antecedent { .. } => 1,
            };
            if w.natural_of_span(span) != expected {
                violations.push(format!("natural of {a} at {:?}", f.location));
            }
        }
    }
    let mut size_violations = 0;
    let mut symbol_violations = 0;
    let mut example = None;
    for _ in 0..1000 {
        let s = common::random_sequent(&mut rng, &["p", "q", "r"], 8);
        let p = translate(&s).params();
        let m = s.metrics();
        if p.d > m.order {
            violations.push(format!("{s}: d {} > order {}", p.d, m.order));
        }
        if p.n > 2 * m.size {
            size_violations += 1;
            example.get_or_insert_with(|| format!("{s}: n {} > 2 * {}", p.n, m.size));
        }
        // the same bound with every variable occurrence counted as a symbol
        let mut names = Vec::new();
        for f in s.antecedent.formulas().into_iter().chain([&s.succedent]) {
            f.variables(&mut names);
        }
        if p.n > 2 * (m.size + names.len()) {
            symbol_violations += 1;
        }
    }
    let pass = violations.is_empty() && size_violations == 0;
    outcome(
        pass,
        format!(
            "2000 formulas and sequents, {} natural/order violations {:?}; n <= 2 size fails on {size_violations} {:?}, \
             with variables counted it fails on {symbol_violations}",
            violations.len(),
            violations.iter().take(3).collect::<Vec<_>>(),
            example
        ),
    )
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let cov: f64 = points.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = points.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    cov / var
}

fn scaling() -> Outcome {
    let start = Instant::now();
    let mut points = Vec::new();
    for k in 1..=20 {
        let s = parse(&bench_family("pp", k).unwrap());
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let t = Instant::now();
            let d = decide(&s, DecideOptions::default()).expect("pipeline");
            best = best.min(t.elapsed().as_secs_f64());
            assert!(d.derivable);
        }
        points.push(((translate(&s).len() as f64).ln(), best.ln()));
    }
    let slope = fit_slope(&points);
    let counts: Vec<usize> = (1..=5)
        .map(|k| {
            let w = translate(&parse(&bench_family("pp", k).unwrap()));
            enumerate_nets_bounded(&w, true, usize::MAX, 64).unwrap().len()
        })
        .collect();
    let superlinear = counts.windows(2).enumerate().all(|(i, c)| c[1] * (i + 1) > c[0] * (i + 2));
    let elapsed = start.elapsed();
    let pass = slope < 6.0 && superlinear && elapsed < Duration::from_secs(120);
    outcome(pass, format!("log-log slope {slope:.2}, nets for k=1..5 {counts:?}, {elapsed:.2?}"))
}

/// Criteria that fail for a reason outside the implementation. The size
/// bound `n <= 2 size` is false whenever a variable occurrence weighs 0 in
/// the size measure (`p => p` has two literals and size 0).
const KNOWN_FAILURES: [usize; 1] = [5];

fn main() {
    let mut witnesses = WitnessTally::default();
    let results = [
        ("fixtures", fixtures(&mut witnesses)),
        ("oracle equivalence", oracle_equivalence(&mut witnesses)),
        ("grammar correctness", grammar_correctness()),
        ("structural bounds", structural_bounds()),
        ("translation invariants", translation_invariants()),
        (
            "witness validity",
            outcome(
                witnesses.failures.is_empty() && witnesses.checked > 0,
                format!("{} witnesses, {} failures {:?}", witnesses.checked, witnesses.failures.len(), witnesses.failures.iter().take(3).collect::<Vec<_>>()),
            ),
        ),
        ("scaling", scaling()),
    ];
    let mut unexpected = 0;
    for (index, (name, result)) in results.iter().enumerate() {
        let number = index + 1;
        let known = KNOWN_FAILURES.contains(&number);
        let verdict = match (result.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {number} {name}: {verdict} ({})", result.detail);
        unexpected += usize::from(!result.pass && !known);
    }
    let failed = results.iter().filter(|r| !r.1.pass).count();
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
