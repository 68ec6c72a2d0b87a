use std::io::{self, BufRead};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use lbstar_core::decider::FAMILIES;
use lbstar_core::pentus::{grammar_size_bound, profile_count_bound};
use lbstar_core::proofnet::{enumerate_nets, to_dot};
use lbstar_core::{
    bench_family, build_grammar, decide, encode, intersect, parse_sequent, print_sequent, prove, translate,
    DecideOptions, Decision, Dfa, ProofOutcome, SearchBudget, Sequent,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "lbstar", version, about = "Provability in the Lambek calculus with brackets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide each sequent.
    Decide {
        #[command(flatten)]
        input: Input,
        /// Include a witness code word.
        #[arg(long)]
        witness: bool,
    },
    /// Decide and print a derivation of each derivable sequent.
    Prove {
        #[command(flatten)]
        input: Input,
    },
    /// Show a proof net, or list them with --all.
    Net {
        #[command(flatten)]
        input: Input,
        /// Write the net in Graphviz format to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// List every net that respects sisterhood.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 20)]
        limit: usize,
    },
    /// Decide by exhaustive backward search instead.
    Oracle {
        #[command(flatten)]
        input: Input,
        /// Give up after this many seconds.
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Print parameters and construction sizes.
    Stats {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        dump_omega: bool,
        #[arg(long)]
        grammar: bool,
        #[arg(long)]
        dfa: bool,
    },
    /// Run the pipeline on a sequent family.
    Bench {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(FAMILIES))]
        family: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Run every member from 1 to k.
        #[arg(long)]
        sweep: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct Input {
    /// Sequents such as "p, p\q => q"; read from stdin, one per line, when
    /// absent.
    sequents: Vec<String>,
    /// Print one JSON object per sequent.
    #[arg(long)]
    json: bool,
}

/// Exit statuses, most severe last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Derivable = 0,
    NotDerivable = 1,
    Usage = 2,
    Internal = 3,
}

impl Status {
    fn of(derivable: bool) -> Status {
        if derivable {
            Status::Derivable
        } else {
            Status::NotDerivable
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match cli.command {
        Command::Bench { family, k, sweep, json } => bench(&family, k, sweep, json),
        command => run_each(command),
    };
    ExitCode::from(status as u8)
}

fn read_inputs(input: &Input) -> Result<Vec<String>, Status> {
    if !input.sequents.is_empty() {
        return Ok(input.sequents.clone());
    }
    let mut lines = Vec::new();
    for line in io::stdin().lock().lines() {
        let line = line.map_err(|e| {
            eprintln!("error: reading stdin: {e}");
            Status::Usage
        })?;
        let trimmed = line.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            lines.push(trimmed.to_string());
        }
    }
    Ok(lines)
}

fn run_each(command: Command) -> Status {
    let input = match &command {
        Command::Decide { input, .. }
        | Command::Prove { input }
        | Command::Net { input, .. }
        | Command::Oracle { input, .. }
        | Command::Stats { input, .. } => input,
        Command::Bench { .. } => unreachable!("handled separately"),
    };
    let texts = match read_inputs(input) {
        Ok(texts) => texts,
        Err(status) => return status,
    };
    if let Command::Net { dot: Some(_), .. } = &command {
        if texts.len() != 1 {
            eprintln!("error: --dot takes exactly one sequent");
            return Status::Usage;
        }
    }
    let mut worst = Status::Derivable;
    for text in &texts {
        let status = match parse_sequent(text) {
            Ok(s) => run_one(&command, &s, input.json),
            Err(e) => {
                eprintln!("error: {text}: {e}");
                Status::Usage
            }
        };
        worst = worst.max(status);
    }
    worst
}

fn run_one(command: &Command, s: &Sequent, json: bool) -> Status {
    match command {
        Command::Decide { witness, .. } => {
            with_decision(s, *witness, |d| {
                if json {
                    print_json(d);
                } else {
                    println!("{}: {}", print_sequent(s), verdict(d.derivable));
                    if let Some(w) = &d.witness {
                        println!("  net {}", encode(&w.net.structure));
                    }
                }
                Status::of(d.derivable)
            })
        }
        Command::Prove { .. } => with_decision(s, true, |d| {
            if json {
                print_json(d);
            } else {
                println!("{}: {}", print_sequent(s), verdict(d.derivable));
                if let Some(w) = &d.witness {
                    print!("{}", w.derivation.render());
                }
            }
            Status::of(d.derivable)
        }),
        Command::Net { dot, all, limit, .. } => net(s, dot.as_ref(), *all, *limit, json),
        Command::Oracle { time_limit, .. } => oracle(s, *time_limit, json),
        Command::Stats { dump_omega, grammar, dfa, .. } => stats(s, *dump_omega, *grammar, *dfa, json),
        Command::Bench { .. } => unreachable!("handled separately"),
    }
}

fn verdict(derivable: bool) -> &'static str {
    if derivable {
        "derivable"
    } else {
        "not derivable"
    }
}

fn with_decision(s: &Sequent, witness: bool, f: impl FnOnce(&Decision) -> Status) -> Status {
    let options = DecideOptions { witness, ..DecideOptions::default() };
    match decide(s, options) {
        Ok(d) => f(&d),
        Err(e) => {
            eprintln!("error: {s}: {e}");
            Status::Internal
        }
    }
}

fn print_json(value: &impl serde::Serialize) {
    match serde_json::to_string(value) {
        Ok(line) => println!("{line}"),
        Err(e) => eprintln!("error: serializing output: {e}"),
    }
}

fn net(s: &Sequent, dot: Option<&PathBuf>, all: bool, limit: usize, json: bool) -> Status {
    let w = translate(s);
    let nets = if all {
        match enumerate_nets(&w, true, limit) {
            Ok(nets) => nets,
            Err(e) => {
                eprintln!("error: {s}: {e}");
                return Status::Usage;
            }
        }
    } else {
        match decide(s, DecideOptions::with_witness()) {
            Ok(d) => d.witness.into_iter().map(|w| w.net).collect(),
            Err(e) => {
                eprintln!("error: {s}: {e}");
                return Status::Internal;
            }
        }
    };
    if json {
        let codes: Vec<&[usize]> = nets.iter().map(|n| n.structure.partners()).collect();
        print_json(&json!({ "sequent": s, "derivable": !nets.is_empty(), "nets": codes }));
    } else {
        println!("{}: {}", print_sequent(s), verdict(!nets.is_empty()));
        for n in &nets {
            println!("  {}", encode(&n.structure));
        }
    }
    if let (Some(path), Some(first)) = (dot, nets.first()) {
        if let Err(e) = std::fs::write(path, to_dot(first, &w)) {
            eprintln!("error: writing {}: {e}", path.display());
            return Status::Usage;
        }
    }
    Status::of(!nets.is_empty())
}

fn oracle(s: &Sequent, time_limit: Option<f64>, json: bool) -> Status {
    let mut budget = SearchBudget::for_goal(s);
    if let Some(secs) = time_limit {
        budget = budget.with_time_limit(Duration::from_secs_f64(secs));
    }
    let outcome = prove(s, budget);
    let Some(derivable) = outcome.derivable() else {
        eprintln!("error: {s}: search budget exceeded");
        return Status::Internal;
    };
    if json {
        let derivation = match &outcome {
            ProofOutcome::Proved(d) => Some(d),
            _ => None,
        };
        print_json(&json!({ "sequent": s, "derivable": derivable, "derivation": derivation }));
    } else {
        println!("{}: {}", print_sequent(s), verdict(derivable));
        if let ProofOutcome::Proved(d) = &outcome {
            print!("{}", d.render());
        }
    }
    Status::of(derivable)
}

fn stats(s: &Sequent, dump_omega: bool, show_grammar: bool, show_dfa: bool, json: bool) -> Status {
    let w = translate(s);
    let p = w.params();
    let m = s.metrics();
    let g = build_grammar(&w);
    let gs = g.stats();
    let dfa = Dfa::build(&w);
    let ds = dfa.stats(p.b);
    let product = match intersect(&g.grammar, &dfa) {
        Ok(product) => product,
        Err(e) => {
            eprintln!("error: {s}: {e}");
            return Status::Internal;
        }
    };
    let derivable = !product.is_empty();
    let k_bound = profile_count_bound(p.d);
    let size_bound = grammar_size_bound(p.n, gs.max_profiles_per_triple.max(1) as u128);
    if json {
        print_json(&json!({
            "sequent": s,
            "derivable": derivable,
            "params": { "size": m.size, "order": m.order, "bdepth": m.bdepth, "n": p.n, "d": p.d, "b": p.b },
            "grammar": gs,
            "grammar_bounds": { "profiles_per_triple": k_bound.to_string(), "size": size_bound.to_string() },
            "dfa": ds,
            "intersection": { "nonterminals": product.nonterminal_count(), "rules": product.rule_count() },
        }));
    } else {
        println!("{}", print_sequent(s));
        println!("  size {}  order {}  bdepth {}  n {}  d {}  b {}", m.size, m.order, m.bdepth, p.n, p.d, p.b);
        println!(
            "  grammar: {} nonterminals, {} rules, size {} (bound {size_bound}), longest rule {}, {} profiles per triple (bound {k_bound})",
            gs.nonterminals, gs.rules, gs.size, gs.max_rule_length, gs.max_profiles_per_triple
        );
        println!("  automaton: {} states (bound {}), {} transitions", ds.states, ds.bound, ds.transitions);
        println!(
            "  intersection: {} nonterminals, {} rules; {}",
            product.nonterminal_count(),
            product.rule_count(),
            verdict(derivable)
        );
    }
    if dump_omega {
        print!("{}", w.dump());
    }
    if show_grammar {
        print!("{}", g.grammar.dump());
    }
    if show_dfa {
        for q in 0..dfa.state_count() {
            let state = dfa.state(q);
            let mark = if dfa.is_accepting(q) { " accept" } else { "" };
            let stack: Vec<String> = state.stack.iter().map(|e| format!("e{}", e + 1)).collect();
            let edges: Vec<String> = dfa.transitions(q).iter().map(|(l, t)| format!("e{}->{t}", l + 1)).collect();
            println!("q{q} @{} [{}]{mark}: {}", state.pointer + 1, stack.join(" "), edges.join(" "));
        }
    }
    Status::of(derivable)
}

fn bench(family: &str, k: usize, sweep: bool, json: bool) -> Status {
    let first = if sweep { 1 } else { k };
    if !json {
        println!("k\tn\trules\tsize\tstates\tproduct\tms\tderivable");
    }
    let mut worst = Status::Derivable;
    for member in first..=k {
        let Some(text) = bench_family(family, member) else {
            eprintln!("error: unknown family {family}");
            return Status::Usage;
        };
        let s = match parse_sequent(&text) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {text}: {e}");
                return Status::Internal;
            }
        };
        let status = with_decision(&s, false, |d| {
            let st = &d.stats;
            if json {
                print_json(&json!({ "k": member, "decision": d }));
            } else {
                println!(
                    "{member}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{}",
                    d.params.n,
                    st.grammar_rules,
                    st.grammar_size,
                    st.dfa_states,
                    st.intersection_rules,
                    st.phase_ms.total,
                    d.derivable
                );
            }
            Status::of(d.derivable)
        });
        worst = worst.max(status);
    }
    worst
}
