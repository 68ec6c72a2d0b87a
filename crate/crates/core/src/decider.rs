//! The full decision pipeline: translation, net grammar, sisterhood
//! automaton, intersection, emptiness, and optional witness extraction.

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::cfg::{intersect, to_code};
use crate::derivation::{check_derivation, Derivation};
use crate::pentus::{build_grammar_with, SplitPreference};
use crate::proofnet::{check_net, decode, net_to_derivation, respects_sisterhood, ProofNet};
use crate::sisterhood::Dfa;
use crate::syntax::{parse_sequent, ParseError, Sequent};
use crate::translation::translate;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecideOptions {
    pub witness: bool,
    pub preference: SplitPreference,
}

impl DecideOptions {
    pub fn with_witness() -> DecideOptions {
        DecideOptions { witness: true, ..DecideOptions::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Params {
    pub size: usize,
    pub order: usize,
    pub bdepth: usize,
    pub n: usize,
    pub d: usize,
    pub b: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PhaseTimes {
    pub translate: f64,
    pub grammar: f64,
    pub dfa: f64,
    pub intersect: f64,
    pub emptiness: f64,
    pub witness: f64,
    pub total: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PipelineStats {
    pub grammar_nonterminals: usize,
    pub grammar_rules: usize,
    pub grammar_size: usize,
    pub grammar_max_rule_length: usize,
    /// Most profiles seen on a single `(i,j,k)`.
    pub grammar_profiles_per_triple: usize,
    pub dfa_states: usize,
    pub dfa_transitions: usize,
    pub dfa_state_bound: u128,
    pub intersection_nonterminals: usize,
    pub intersection_rules: usize,
    pub phase_ms: PhaseTimes,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    /// Partner of each literal, 0-based.
    pub code: Vec<usize>,
    #[serde(skip)]
    pub net: ProofNet,
    pub derivation: Derivation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decision {
    pub sequent: Sequent,
    pub derivable: bool,
    pub params: Params,
    pub stats: PipelineStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Error)]
pub enum DecideError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    /// A stage produced something a later stage rejects.
    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

pub fn decide_str(text: &str, options: DecideOptions) -> Result<Decision, DecideError> {
    decide(&parse_sequent(text)?, options)
}

pub fn decide(s: &Sequent, options: DecideOptions) -> Result<Decision, DecideError> {
    let start = Instant::now();
    let mut clock = Instant::now();
    let mut lap = || {
        let now = Instant::now();
        let ms = (now - clock).as_secs_f64() * 1e3;
        clock = now;
        ms
    };
    let mut times = PhaseTimes::default();

    let w = translate(s);
    times.translate = lap();
    let omega = w.params();
    let metrics = s.metrics();
    let params = Params {
        size: metrics.size,
        order: metrics.order,
        bdepth: metrics.bdepth,
        n: omega.n,
        d: omega.d,
        b: omega.b,
    };

    let grammar = build_grammar_with(&w, options.preference);
    times.grammar = lap();
    let dfa = Dfa::build(&w);
    times.dfa = lap();
    let product = intersect(&grammar.grammar, &dfa).map_err(|e| DecideError::Invariant(e.to_string()))?;
    times.intersect = lap();
    let word = product.some_word();
    times.emptiness = lap();

    let witness = match (&word, options.witness) {
        (Some(word), true) => Some(extract_witness(s, &w, word.clone(), &dfa)?),
        _ => None,
    };
    times.witness = lap();
    times.total = start.elapsed().as_secs_f64() * 1e3;

    let g = grammar.stats();
    let d = dfa.stats(omega.b);
    Ok(Decision {
        sequent: s.clone(),
        derivable: word.is_some(),
        params,
        stats: PipelineStats {
            grammar_nonterminals: g.nonterminals,
            grammar_rules: g.rules,
            grammar_size: g.size,
            grammar_max_rule_length: g.max_rule_length,
            grammar_profiles_per_triple: g.max_profiles_per_triple,
            dfa_states: d.states,
            dfa_transitions: d.transitions,
            dfa_state_bound: d.bound,
            intersection_nonterminals: product.nonterminal_count(),
            intersection_rules: product.rule_count(),
            phase_ms: times,
        },
        witness,
    })
}

fn extract_witness(
    s: &Sequent,
    w: &crate::translation::OmegaString,
    word: Vec<u32>,
    dfa: &Dfa,
) -> Result<Witness, DecideError> {
    let code = to_code(word);
    if !dfa.run(&code) {
        return Err(DecideError::Invariant(format!("witness {code} rejected by the automaton")));
    }
    let structure = decode(&code).map_err(|e| DecideError::Invariant(format!("witness {code}: {e}")))?;
    let net = check_net(&structure, w).map_err(|e| DecideError::Invariant(format!("witness {code}: {e}")))?;
    if !respects_sisterhood(&structure, w) {
        return Err(DecideError::Invariant(format!("witness {code} breaks sisterhood")));
    }
    let derivation = net_to_derivation(&net, s).map_err(|e| DecideError::Invariant(e.to_string()))?;
    check_derivation(&derivation).map_err(|e| DecideError::Invariant(format!("rebuilt derivation: {e}")))?;
    if derivation.conclusion != *s {
        return Err(DecideError::Invariant("rebuilt derivation proves another sequent".into()));
    }
    Ok(Witness { code: code.letters, net, derivation })
}

/// Named sequent families indexed by `k >= 1`.
pub const FAMILIES: [&str; 2] = ["pp", "bracket-nest"];

/// `pp`: `p/p` and `p\p` each `k` times around one `p`, so the string has
/// `4k+2` literals and fixed order. `bracket-nest`: `p` under `k` meta
/// brackets against `k` diamonds.
pub fn bench_family(name: &str, k: usize) -> Option<String> {
    match name {
        "pp" => {
            let mut items = vec!["p/p"; k];
            items.push("p");
            items.extend(std::iter::repeat_n(r"p\p", k));
            Some(format!("{} => p", items.join(", ")))
        }
        "bracket-nest" => Some(format!("{}p{} => {}p", "{ ".repeat(k), " }".repeat(k), "<>".repeat(k))),
        _ => None,
    }
}
