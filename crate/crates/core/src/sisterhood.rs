//! Deterministic automaton over code words that accepts exactly the codes of
//! structures linking sister brackets to sister brackets.

use std::collections::HashMap;

use serde::Serialize;

use crate::proofnet::CodeWord;
use crate::translation::OmegaString;

/// Pointer (0-based, `n` once the word is read) and the stack of expected
/// letters, innermost last.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StackState {
    pub pointer: usize,
    pub stack: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Edges {
    /// Every letter leads to the same state.
    Any(usize),
    /// Sorted by letter; missing letters go to the dead state.
    Only(Vec<(usize, usize)>),
    None,
}

#[derive(Clone, Debug)]
pub struct Dfa {
    n: usize,
    states: Vec<StackState>,
    edges: Vec<Edges>,
    accepting: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DfaStats {
    pub states: usize,
    pub transitions: usize,
    /// `(n+1)(b+1)n^b + 1`, saturating.
    pub bound: u128,
}

/// Worst-case state count for `n` letters and sister nesting `b`.
pub fn state_bound(n: usize, b: usize) -> u128 {
    let mut power: u128 = 1;
    for _ in 0..b {
        power = power.saturating_mul(n as u128);
    }
    (n as u128 + 1)
        .saturating_mul(b as u128 + 1)
        .saturating_mul(power)
        .saturating_add(1)
}

impl Dfa {
    /// Builds the reachable part of the automaton by forward closure.
    pub fn build(w: &OmegaString) -> Dfa {
        let n = w.len();
        let mut states = vec![StackState { pointer: 0, stack: Vec::new() }];
        let mut index: HashMap<StackState, usize> = HashMap::new();
        index.insert(states[0].clone(), 0);
        let mut edges = Vec::new();
        let mut at = 0;
        while at < states.len() {
            let state = states[at].clone();
            let i = state.pointer;
            let mut intern = |s: StackState| {
                *index.entry(s.clone()).or_insert_with(|| {
                    states.push(s);
                    states.len() - 1
                })
            };
            let e = if i == n {
                Edges::None
            } else if !w.lits[i].is_bracket() {
                Edges::Any(intern(StackState { pointer: i + 1, stack: state.stack.clone() }))
            } else {
                let j = w.sister_lit[i].expect("bracket literals have sisters");
                let mut out = Vec::new();
                if j > i {
                    for (target, lit) in w.lits.iter().enumerate() {
                        if !lit.is_bracket() {
                            continue;
                        }
                        if let Some(target_sister) = w.sister_lit[target] {
                            let mut stack = state.stack.clone();
                            stack.push(target_sister);
                            out.push((target, intern(StackState { pointer: i + 1, stack })));
                        }
                    }
                } else if let Some((&top, rest)) = state.stack.split_last() {
                    if w.lits[top].is_bracket() {
                        out.push((top, intern(StackState { pointer: i + 1, stack: rest.to_vec() })));
                    }
                }
                Edges::Only(out)
            };
            edges.push(e);
            at += 1;
        }
        let accepting = index.get(&StackState { pointer: n, stack: Vec::new() }).copied();
        Dfa { n, states, edges, accepting }
    }

    pub fn start(&self) -> usize {
        0
    }

    pub fn accepting(&self) -> Option<usize> {
        self.accepting
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting == Some(q)
    }

    pub fn state(&self, q: usize) -> &StackState {
        &self.states[q]
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.n
    }

    /// `None` is the dead state.
    pub fn step(&self, q: usize, letter: usize) -> Option<usize> {
        match &self.edges[q] {
            Edges::Any(next) => (letter < self.n).then_some(*next),
            Edges::Only(list) => list
                .binary_search_by_key(&letter, |&(l, _)| l)
                .ok()
                .map(|k| list[k].1),
            Edges::None => None,
        }
    }

    /// Live transitions out of `q` as `(letter, target)`.
    pub fn transitions(&self, q: usize) -> Vec<(usize, usize)> {
        match &self.edges[q] {
            Edges::Any(next) => (0..self.n).map(|l| (l, *next)).collect(),
            Edges::Only(list) => list.clone(),
            Edges::None => Vec::new(),
        }
    }

    pub fn run(&self, word: &CodeWord) -> bool {
        if word.letters.len() != self.n {
            return false;
        }
        let mut q = self.start();
        for &letter in &word.letters {
            match self.step(q, letter) {
                Some(next) => q = next,
                None => return false,
            }
        }
        self.is_accepting(q)
    }

    pub fn stats(&self, b: usize) -> DfaStats {
        let transitions = (0..self.states.len())
            .map(|q| match &self.edges[q] {
                Edges::Any(_) => self.n,
                Edges::Only(list) => list.len(),
                Edges::None => 0,
            })
            .sum();
        DfaStats { states: self.states.len(), transitions, bound: state_bound(self.n, b) }
    }
}
