//! Context-free grammars over the letters `e1 … en`, their intersection with
//! a deterministic automaton, and the finite-language queries used by the
//! decision procedure.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::fmt::{self, Display, Write};

use serde::Serialize;
use thiserror::Error;

use crate::proofnet::CodeWord;
use crate::sisterhood::Dfa;

/// Terminals are 0-based letters; `T(i)` prints as `e{i+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Symbol {
    T(u32),
    N(u32),
}

#[derive(Clone, Debug)]
pub struct Grammar<L> {
    terminals: usize,
    labels: Vec<L>,
    start: u32,
    lhs: Vec<u32>,
    offsets: Vec<u32>,
    syms: Vec<Symbol>,
}

impl<L> Grammar<L> {
    /// A grammar whose start symbol carries `start_label`.
    pub fn new(terminals: usize, start_label: L) -> Grammar<L> {
        Grammar {
            terminals,
            labels: vec![start_label],
            start: 0,
            lhs: Vec::new(),
            offsets: vec![0],
            syms: Vec::new(),
        }
    }

    pub fn add_nonterminal(&mut self, label: L) -> u32 {
        self.labels.push(label);
        (self.labels.len() - 1) as u32
    }

    pub fn add_rule(&mut self, lhs: u32, rhs: &[Symbol]) {
        debug_assert!((lhs as usize) < self.labels.len());
        self.lhs.push(lhs);
        self.syms.extend_from_slice(rhs);
        self.offsets.push(self.syms.len() as u32);
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn terminals(&self) -> usize {
        self.terminals
    }

    pub fn label(&self, x: u32) -> &L {
        &self.labels[x as usize]
    }

    pub fn nonterminal_count(&self) -> usize {
        self.labels.len()
    }

    pub fn rule_count(&self) -> usize {
        self.lhs.len()
    }

    pub fn lhs(&self, r: usize) -> u32 {
        self.lhs[r]
    }

    pub fn rhs(&self, r: usize) -> &[Symbol] {
        &self.syms[self.offsets[r] as usize..self.offsets[r + 1] as usize]
    }

    /// Sum of rule lengths, counting the left-hand side.
    pub fn size(&self) -> usize {
        self.rule_count() + self.syms.len()
    }

    pub fn max_rule_length(&self) -> usize {
        (0..self.rule_count()).map(|r| 1 + self.rhs(r).len()).max().unwrap_or(0)
    }

    /// Rule ids grouped by left-hand side.
    pub fn rules_by_lhs(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.labels.len()];
        for (r, &x) in self.lhs.iter().enumerate() {
            out[x as usize].push(r as u32);
        }
        out
    }

    /// Least fixpoint of nonterminals deriving some terminal word.
    pub fn productive(&self) -> Vec<bool> {
        let mut productive = vec![false; self.labels.len()];
        let mut missing = vec![0u32; self.rule_count()];
        let mut uses: Vec<Vec<u32>> = vec![Vec::new(); self.labels.len()];
        let mut queue = Vec::new();
        for (r, count) in missing.iter_mut().enumerate() {
            for sym in self.rhs(r) {
                if let Symbol::N(y) = *sym {
                    *count += 1;
                    uses[y as usize].push(r as u32);
                }
            }
            if *count == 0 {
                queue.push(self.lhs[r]);
            }
        }
        while let Some(x) = queue.pop() {
            if std::mem::replace(&mut productive[x as usize], true) {
                continue;
            }
            for &r in &uses[x as usize] {
                missing[r as usize] -= 1;
                if missing[r as usize] == 0 {
                    queue.push(self.lhs[r as usize]);
                }
            }
        }
        productive
    }

    pub fn is_empty(&self) -> bool {
        !self.productive()[self.start as usize]
    }

    /// A shortest word of the language; `None` iff the language is empty.
    pub fn some_word(&self) -> Option<Vec<u32>> {
        self.some_word_from(self.start)
    }

    pub fn some_word_from(&self, root: u32) -> Option<Vec<u32>> {
        // Knuth's generalisation of Dijkstra: a rule fires once all its
        // nonterminals are settled, so the chosen rules never loop.
        let n = self.labels.len();
        let mut best_rule = vec![u32::MAX; n];
        let mut settled = vec![false; n];
        let mut missing = vec![0u32; self.rule_count()];
        let mut partial = vec![0u64; self.rule_count()];
        let mut uses: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut heap = BinaryHeap::new();
        for r in 0..self.rule_count() {
            for sym in self.rhs(r) {
                match *sym {
                    Symbol::T(_) => partial[r] += 1,
                    Symbol::N(y) => {
                        missing[r] += 1;
                        uses[y as usize].push(r as u32);
                    }
                }
            }
            if missing[r] == 0 {
                heap.push(Reverse((partial[r], self.lhs[r], r as u32)));
            }
        }
        while let Some(Reverse((cost, x, r))) = heap.pop() {
            if settled[x as usize] {
                continue;
            }
            settled[x as usize] = true;
            best_rule[x as usize] = r;
            if x == root {
                break;
            }
            for &r2 in &uses[x as usize] {
                let r2 = r2 as usize;
                partial[r2] += cost;
                missing[r2] -= 1;
                if missing[r2] == 0 {
                    heap.push(Reverse((partial[r2], self.lhs[r2], r2 as u32)));
                }
            }
        }
        if !settled[root as usize] {
            return None;
        }
        let mut word = Vec::new();
        let mut stack = vec![Symbol::N(root)];
        while let Some(sym) = stack.pop() {
            match sym {
                Symbol::T(a) => word.push(a),
                Symbol::N(x) => {
                    let r = best_rule[x as usize] as usize;
                    stack.extend(self.rhs(r).iter().rev());
                }
            }
        }
        Some(word)
    }

    /// Up to `limit` distinct words, sorted. Exact whenever the language has
    /// at most `limit` words.
    pub fn enumerate_language(&self, limit: usize) -> Vec<Vec<u32>> {
        self.enumerate_from(self.start, limit)
    }

    pub fn enumerate_from(&self, root: u32, limit: usize) -> Vec<Vec<u32>> {
        if limit == 0 {
            return Vec::new();
        }
        let mut sets: Vec<HashSet<Vec<u32>>> = vec![HashSet::new(); self.labels.len()];
        loop {
            let mut changed = false;
            for r in 0..self.rule_count() {
                let x = self.lhs[r] as usize;
                if sets[x].len() >= limit {
                    continue;
                }
                let mut partial: Vec<Vec<u32>> = vec![Vec::new()];
                for sym in self.rhs(r) {
                    partial = match *sym {
                        Symbol::T(a) => {
                            partial.iter_mut().for_each(|w| w.push(a));
                            partial
                        }
                        Symbol::N(y) => {
                            let mut next = HashSet::new();
                            'outer: for w in &partial {
                                for v in &sets[y as usize] {
                                    let mut joined = w.clone();
                                    joined.extend_from_slice(v);
                                    next.insert(joined);
                                    if next.len() >= limit {
                                        break 'outer;
                                    }
                                }
                            }
                            next.into_iter().collect()
                        }
                    };
                    if partial.is_empty() {
                        break;
                    }
                }
                for w in partial {
                    if sets[x].len() >= limit {
                        break;
                    }
                    changed |= sets[x].insert(w);
                }
            }
            if !changed {
                break;
            }
        }
        let mut out: Vec<Vec<u32>> = sets.swap_remove(root as usize).into_iter().collect();
        out.sort();
        out
    }

    /// Span-table membership test.
    pub fn derives(&self, word: &[u32]) -> bool {
        self.derives_from(self.start, word)
    }

    pub fn derives_from(&self, root: u32, word: &[u32]) -> bool {
        let n = word.len();
        let nt = self.labels.len();
        // table[i][len] holds the nonterminals deriving word[i..i+len]
        let mut table = vec![vec![vec![false; nt]; n + 1]; n + 1];
        for len in 0..=n {
            for i in 0..=n - len {
                let j = i + len;
                loop {
                    let mut changed = false;
                    for r in 0..self.rule_count() {
                        let x = self.lhs[r] as usize;
                        if table[i][len][x] {
                            continue;
                        }
                        if self.matches(self.rhs(r), word, i, j, &table) {
                            table[i][len][x] = true;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
            }
        }
        table[0][n][root as usize]
    }

    fn matches(&self, rhs: &[Symbol], word: &[u32], i: usize, j: usize, table: &[Vec<Vec<bool>>]) -> bool {
        let mut at = vec![false; j - i + 1];
        at[0] = true;
        for sym in rhs {
            let mut next = vec![false; j - i + 1];
            for p in 0..=j - i {
                if !at[p] {
                    continue;
                }
                match *sym {
                    Symbol::T(a) => {
                        if i + p < j && word[i + p] == a {
                            next[p + 1] = true;
                        }
                    }
                    Symbol::N(y) => {
                        for q in p..=j - i {
                            if table[i + p][q - p][y as usize] {
                                next[q] = true;
                            }
                        }
                    }
                }
            }
            at = next;
        }
        at[j - i]
    }
}

impl<L: Display> Grammar<L> {
    /// One rule per line, `LHS -> sym sym …`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rule_count() {
            let _ = write!(out, "{} ->", self.labels[self.lhs[r] as usize]);
            for sym in self.rhs(r) {
                match *sym {
                    Symbol::T(a) => {
                        let _ = write!(out, " e{}", a + 1);
                    }
                    Symbol::N(y) => {
                        let _ = write!(out, " {}", self.labels[y as usize]);
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Nonterminals of an intersection grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Triple {
    Start,
    /// Automaton state before, grammar nonterminal, state after.
    Of(u32, u32, u32),
}

impl Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Triple::Start => f.write_str("S'"),
            Triple::Of(p, x, q) => write!(f, "<q{p},N{x},q{q}>"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IntersectError {
    #[error("grammar has {grammar} letters, automaton has {automaton}")]
    Alphabet { grammar: usize, automaton: usize },
}

/// Triple construction restricted to productive triples reachable from the
/// start; rules keep their length and ε-rules yield `⟨p, X, p⟩`.
pub fn intersect<L>(g: &Grammar<L>, a: &Dfa) -> Result<Grammar<Triple>, IntersectError> {
    if g.terminals() != a.alphabet_size() {
        return Err(IntersectError::Alphabet { grammar: g.terminals(), automaton: a.alphabet_size() });
    }
    let rules = g.rules_by_lhs();
    let ends = Ends::compute(g, a, &rules);
    let mut out = Grammar::new(g.terminals(), Triple::Start);
    let Some(accept) = a.accepting() else {
        return Ok(out);
    };
    let q0 = a.start() as u32;
    if !ends.contains(g.start(), q0, accept as u32) {
        return Ok(out);
    }
    let mut ids: HashMap<(u32, u32, u32), u32> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |out: &mut Grammar<Triple>, queue: &mut VecDeque<(u32, u32, u32, u32)>, key: (u32, u32, u32)| {
        *ids.entry(key).or_insert_with(|| {
            let id = out.add_nonterminal(Triple::Of(key.0, key.1, key.2));
            queue.push_back((id, key.0, key.1, key.2));
            id
        })
    };
    let top = intern(&mut out, &mut queue, (q0, g.start(), accept as u32));
    let start = out.start();
    out.add_rule(start, &[Symbol::N(top)]);
    let mut path = Vec::new();
    while let Some((id, p, x, q)) = queue.pop_front() {
        for &r in &rules[x as usize] {
            let mut found = Vec::new();
            ends.paths(a, g.rhs(r as usize), p, q, &mut path, &mut found);
            for body in found {
                let body: Vec<Symbol> = body
                    .into_iter()
                    .map(|step| match step {
                        Step::Letter(l) => Symbol::T(l),
                        Step::Via(from, y, to) => Symbol::N(intern(&mut out, &mut queue, (from, y, to))),
                    })
                    .collect();
                out.add_rule(id, &body);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy)]
enum Step {
    Letter(u32),
    Via(u32, u32, u32),
}

/// `ends[(X, p)]`: states `q` with `⟨p, X, q⟩` productive.
struct Ends {
    ends: HashMap<(u32, u32), Vec<u32>>,
}

impl Ends {
    fn compute<L>(g: &Grammar<L>, a: &Dfa, rules: &[Vec<u32>]) -> Ends {
        // item: rule r of X started in p, `pos` symbols read, now in q
        #[derive(Clone, Copy)]
        struct Item {
            x: u32,
            p: u32,
            r: u32,
            pos: u32,
            q: u32,
        }
        let mut ends: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        // items blocked on a (nonterminal, state) pair
        let mut waiting: HashMap<(u32, u32), Vec<Item>> = HashMap::new();
        let mut stack: Vec<Item> = Vec::new();
        let demand = |x: u32, p: u32, ends: &mut HashMap<(u32, u32), Vec<u32>>, stack: &mut Vec<Item>| {
            if let std::collections::hash_map::Entry::Vacant(slot) = ends.entry((x, p)) {
                slot.insert(Vec::new());
                for &r in &rules[x as usize] {
                    stack.push(Item { x, p, r, pos: 0, q: p });
                }
            }
        };
        demand(g.start(), a.start() as u32, &mut ends, &mut stack);
        while let Some(Item { x, p, r, pos, q }) = stack.pop() {
            let rhs = g.rhs(r as usize);
            if pos as usize == rhs.len() {
                let list = ends.get_mut(&(x, p)).expect("demanded before use");
                if list.contains(&q) {
                    continue;
                }
                list.push(q);
                if let Some(waiters) = waiting.get(&(x, p)) {
                    for &w in waiters {
                        stack.push(Item { pos: w.pos + 1, q, ..w });
                    }
                }
                continue;
            }
            match rhs[pos as usize] {
                Symbol::T(letter) => {
                    if let Some(next) = a.step(q as usize, letter as usize) {
                        stack.push(Item { x, p, r, pos: pos + 1, q: next as u32 });
                    }
                }
                Symbol::N(y) => {
                    waiting.entry((y, q)).or_default().push(Item { x, p, r, pos, q });
                    demand(y, q, &mut ends, &mut stack);
                    for &e in &ends[&(y, q)] {
                        stack.push(Item { x, p, r, pos: pos + 1, q: e });
                    }
                }
            }
        }
        Ends { ends }
    }

    fn contains(&self, x: u32, p: u32, q: u32) -> bool {
        self.ends.get(&(x, p)).is_some_and(|list| list.contains(&q))
    }

    /// All ways to read `rhs` from `at` to `q` through productive triples.
    fn paths(&self, a: &Dfa, rhs: &[Symbol], at: u32, q: u32, path: &mut Vec<Step>, out: &mut Vec<Vec<Step>>) {
        let Some((first, rest)) = rhs.split_first() else {
            if at == q {
                out.push(path.clone());
            }
            return;
        };
        match *first {
            Symbol::T(letter) => {
                if let Some(next) = a.step(at as usize, letter as usize) {
                    path.push(Step::Letter(letter));
                    self.paths(a, rest, next as u32, q, path, out);
                    path.pop();
                }
            }
            Symbol::N(y) => {
                if let Some(list) = self.ends.get(&(y, at)) {
                    for &e in list {
                        path.push(Step::Via(at, y, e));
                        self.paths(a, rest, e, q, path, out);
                        path.pop();
                    }
                }
            }
        }
    }
}

/// A code word from a word of letters.
pub fn to_code(word: Vec<u32>) -> CodeWord {
    CodeWord { letters: word.into_iter().map(|l| l as usize).collect() }
}
