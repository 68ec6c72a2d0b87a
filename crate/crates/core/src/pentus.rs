//! Span-indexed context-free grammar whose language is the set of codes of
//! all nets over a translated string (sisterhood is not checked here).
//!
//! Nonterminal `F(i,j,k,R)` derives the codes of correct segments pairing
//! literals `i..k` (exclusive) whose outer region has open par `c_j`, with
//! profile `R`. Indices are 0-based; dumps print them 1-based.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::cfg::{Grammar, Symbol};
use crate::translation::{Conn, OmegaString};

/// Dominant tensors, clusters and the chains `V_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Topology {
    /// Representative of each tensor's cluster; `None` for pars.
    pub tau: Vec<Option<usize>>,
    /// Dominant tensors in string order.
    pub dominant: Vec<usize>,
    /// `V_i`: dominant tensors on the path from `c_i` to its root, lowest
    /// first.
    pub chains: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
}

pub fn topology(w: &OmegaString) -> Topology {
    let n = w.len();
    let is_tensor = |c: usize| w.conns[c] == Conn::Tensor;
    let dominant_at = |c: usize| is_tensor(c) && w.parent[c].is_none_or(|p| !is_tensor(p));
    let tau = (0..n)
        .map(|c| {
            if !is_tensor(c) {
                return None;
            }
            let mut at = c;
            while let Some(p) = w.parent[at].filter(|&p| is_tensor(p)) {
                at = p;
            }
            Some(at)
        })
        .collect();
    let dominant = (0..n).filter(|&c| dominant_at(c)).collect();
    let chains = (0..n)
        .map(|c| {
            let mut chain = Vec::new();
            let mut at = Some(c);
            while let Some(x) = at {
                if dominant_at(x) {
                    chain.push(x);
                }
                at = w.parent[x];
            }
            chain
        })
        .collect();
    Topology { tau, dominant, chains, parent: w.parent.clone() }
}

impl Topology {
    /// Tensors grouped by representative.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut by_rep: Vec<Vec<usize>> = vec![Vec::new(); self.tau.len()];
        for (c, t) in self.tau.iter().enumerate() {
            if let Some(t) = t {
                by_rep[*t].push(c);
            }
        }
        by_rep.into_iter().filter(|members| !members.is_empty()).collect()
    }

    /// Reachability along dominance, allowing downward steps inside a
    /// cluster.
    pub fn weakly_below(&self, a: usize, b: usize) -> bool {
        let mut seen = vec![false; self.tau.len()];
        let mut stack = vec![a];
        while let Some(x) = stack.pop() {
            if std::mem::replace(&mut seen[x], true) {
                continue;
            }
            if x == b && x != a {
                return true;
            }
            if let Some(p) = self.parent[x] {
                stack.push(p);
            }
            if let Some(t) = self.tau[x] {
                stack.extend((0..self.tau.len()).filter(|&y| self.tau[y] == Some(t)));
            }
        }
        false
    }

    /// `≺` restricted to `V_i`, as (lower, upper) pairs.
    pub fn chain_order(&self, i: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let chain = &self.chains[i];
        (0..chain.len()).flat_map(move |s| (s + 1..chain.len()).map(move |t| (chain[s], chain[t])))
    }

    pub fn max_chain(&self) -> usize {
        self.chains.iter().map(Vec::len).max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Nonterminal {
    Start,
    F { i: u32, j: u32, k: u32, profile: u32 },
}

impl fmt::Display for Nonterminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonterminal::Start => f.write_str("S"),
            Nonterminal::F { i, j, k, profile } => write!(f, "F{},{},{};R{}", i + 1, j + 1, k + 1, profile),
        }
    }
}

/// Which split to use when both ends of a span are tensors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SplitPreference {
    /// Pair the leftmost literal.
    #[default]
    Left,
    /// Pair the rightmost literal.
    Right,
}

/// `(j, relation, nonterminal id)` for one span.
pub type SpanEntry<'a> = (usize, &'a [(u32, u32)], u32);

#[derive(Clone, Debug)]
pub struct PentusGrammar {
    pub grammar: Grammar<Nonterminal>,
    pub topology: Topology,
    profiles: Vec<Vec<(u32, u32)>>,
    by_key: HashMap<(u32, u32, u32, u32), u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GrammarStats {
    pub nonterminals: usize,
    pub rules: usize,
    pub size: usize,
    pub max_rule_length: usize,
    pub distinct_profiles: usize,
    /// Largest number of nonterminals sharing one `(i,j,k)`.
    pub max_profiles_per_triple: usize,
}

/// Bound on the number of profiles of one triple for alternation depth `d`,
/// saturating.
pub fn profile_count_bound(d: usize) -> u128 {
    if 12 * d >= 128 {
        u128::MAX
    } else {
        1u128 << (12 * d)
    }
}

/// `5(n³K + 1)`, saturating.
pub fn grammar_size_bound(n: usize, k: u128) -> u128 {
    let n = n as u128;
    n.saturating_mul(n)
        .saturating_mul(n)
        .saturating_mul(k)
        .saturating_add(1)
        .saturating_mul(5)
}

impl PentusGrammar {
    pub fn profile(&self, id: u32) -> &[(u32, u32)] {
        &self.profiles[id as usize]
    }

    /// The nonterminal `F(i,j,k,R)` if it was materialised.
    pub fn nonterminal(&self, i: usize, j: usize, k: usize, relation: &[(u32, u32)]) -> Option<u32> {
        let mut sorted = relation.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let pid = self.profiles.iter().position(|p| *p == sorted)? as u32;
        self.by_key.get(&(i as u32, j as u32, k as u32, pid)).copied()
    }

    /// All materialised `(j, R, id)` for the span `(i, k)`.
    pub fn nonterminals_of(&self, i: usize, k: usize) -> Vec<SpanEntry<'_>> {
        let mut out: Vec<SpanEntry<'_>> = self
            .by_key
            .iter()
            .filter(|(key, _)| key.0 as usize == i && key.2 as usize == k)
            .map(|(key, &id)| (key.1 as usize, self.profile(key.3), id))
            .collect();
        out.sort_by_key(|&(j, _, id)| (j, id));
        out
    }

    pub fn stats(&self) -> GrammarStats {
        let mut per_triple: HashMap<(u32, u32, u32), usize> = HashMap::new();
        for key in self.by_key.keys() {
            *per_triple.entry((key.0, key.1, key.2)).or_default() += 1;
        }
        GrammarStats {
            nonterminals: self.grammar.nonterminal_count(),
            rules: self.grammar.rule_count(),
            size: self.grammar.size(),
            max_rule_length: self.grammar.max_rule_length(),
            distinct_profiles: self.profiles.len(),
            max_profiles_per_triple: per_triple.values().copied().max().unwrap_or(0),
        }
    }
}

pub fn build_grammar(w: &OmegaString) -> PentusGrammar {
    build_grammar_with(w, SplitPreference::Left)
}

pub fn build_grammar_with(w: &OmegaString, preference: SplitPreference) -> PentusGrammar {
    Builder::new(w).run(preference)
}

struct Builder<'a> {
    w: &'a OmegaString,
    n: usize,
    topo: Topology,
    grammar: Grammar<Nonterminal>,
    profiles: Vec<Vec<(u32, u32)>>,
    profile_ids: HashMap<Vec<(u32, u32)>, u32>,
    by_key: HashMap<(u32, u32, u32, u32), u32>,
    /// Nonterminals of each span `(i, k)`, flattened as `i * n + k`.
    spans: Vec<Vec<u32>>,
    info: Vec<(u32, u32)>,
    closure: Closure,
}

impl<'a> Builder<'a> {
    fn new(w: &'a OmegaString) -> Builder<'a> {
        let n = w.len();
        let topo = topology(w);
        Builder {
            w,
            n,
            closure: Closure::new(n),
            topo,
            grammar: Grammar::new(n, Nonterminal::Start),
            profiles: Vec::new(),
            profile_ids: HashMap::new(),
            by_key: HashMap::new(),
            spans: vec![Vec::new(); n * n],
            // (j, profile) per nonterminal id; the start symbol is 0
            info: vec![(u32::MAX, u32::MAX)],
        }
    }

    fn intern_profile(&mut self, relation: Vec<(u32, u32)>) -> u32 {
        if let Some(&id) = self.profile_ids.get(&relation) {
            return id;
        }
        let id = self.profiles.len() as u32;
        self.profiles.push(relation.clone());
        self.profile_ids.insert(relation, id);
        id
    }

    fn nonterminal(&mut self, i: usize, j: usize, k: usize, pid: u32) -> u32 {
        let key = (i as u32, j as u32, k as u32, pid);
        if let Some(&id) = self.by_key.get(&key) {
            return id;
        }
        let id = self.grammar.add_nonterminal(Nonterminal::F { i: key.0, j: key.1, k: key.2, profile: pid });
        self.by_key.insert(key, id);
        self.spans[i * self.n + k].push(id);
        self.info.push((j as u32, pid));
        id
    }

    fn run(mut self, preference: SplitPreference) -> PentusGrammar {
        let n = self.n;
        let is_par = |c: usize| self.w.conns[c].is_par_like();
        for i in 0..n {
            if is_par(i) {
                let q: Vec<(u32, u32)> = self.topo.chain_order(i).map(|(a, b)| (a as u32, b as u32)).collect();
                let pid = self.intern_profile(q);
                let x = self.nonterminal(i, i, i, pid);
                self.grammar.add_rule(x, &[]);
            }
        }
        for len in (2..n).step_by(2) {
            for i in 0..n - len {
                let k = i + len;
                let (left, right) = (!is_par(i), !is_par(k));
                match (left, right, preference) {
                    (false, false, _) => {}
                    (true, false, _) | (true, true, SplitPreference::Left) => self.first_kind(i, k),
                    _ => self.second_kind(i, k),
                }
            }
        }
        self.start_rules();
        PentusGrammar { grammar: self.grammar, topology: self.topo, profiles: self.profiles, by_key: self.by_key }
    }

    fn group_by_profile(&self, ids: &[u32]) -> Vec<(u32, Vec<u32>)> {
        let mut groups: Vec<(u32, Vec<u32>)> = Vec::new();
        for &x in ids {
            let pid = self.info[x as usize].1;
            match groups.iter_mut().find(|(p, _)| *p == pid) {
                Some((_, list)) => list.push(x),
                None => groups.push((pid, vec![x])),
            }
        }
        groups
    }

    /// `c_i` is a tensor: pair `ℓ_i` with `ℓ_(h-1)`.
    fn first_kind(&mut self, i: usize, k: usize) {
        let n = self.n;
        let tau = self.topo.tau[i].expect("c_i is a tensor");
        let mut memo: HashMap<(u32, u32, u32), Option<u32>> = HashMap::new();
        for h in (i + 2..=k).step_by(2) {
            if !self.w.lits[i].is_dual_of(&self.w.lits[h - 1]) {
                continue;
            }
            let inner = self.group_by_profile(&self.spans[(i + 1) * n + h - 1]);
            let outer = self.spans[h * n + k].clone();
            if inner.is_empty() {
                continue;
            }
            for x2 in outer {
                let (j, p2) = self.info[x2 as usize];
                for (p1, x1s) in &inner {
                    let key = (*p1, j, p2);
                    let result = match memo.get(&key) {
                        Some(&r) => r,
                        None => {
                            let r = self.combine(*p1, p2, i, j as usize, k, i, tau);
                            memo.insert(key, r);
                            r
                        }
                    };
                    let Some(pid) = result else { continue };
                    let x = self.nonterminal(i, j as usize, k, pid);
                    for &x1 in x1s {
                        let rhs = [Symbol::T((h - 1) as u32), Symbol::N(x1), Symbol::T(i as u32), Symbol::N(x2)];
                        self.grammar.add_rule(x, &rhs);
                    }
                }
            }
        }
    }

    /// `c_k` is a tensor: pair `ℓ_(k-1)` with `ℓ_h`.
    fn second_kind(&mut self, i: usize, k: usize) {
        let n = self.n;
        let tau = self.topo.tau[k].expect("c_k is a tensor");
        let mut memo: HashMap<(u32, u32, u32), Option<u32>> = HashMap::new();
        for h in (i..=k - 2).step_by(2) {
            if !self.w.lits[h].is_dual_of(&self.w.lits[k - 1]) {
                continue;
            }
            let inner = self.group_by_profile(&self.spans[(h + 1) * n + k - 1]);
            let outer = self.spans[i * n + h].clone();
            if inner.is_empty() {
                continue;
            }
            for x1 in outer {
                let (j, p1) = self.info[x1 as usize];
                for (p2, x2s) in &inner {
                    let key = (p1, j, *p2);
                    let result = match memo.get(&key) {
                        Some(&r) => r,
                        None => {
                            let r = self.combine(p1, *p2, i, j as usize, k, k, tau);
                            memo.insert(key, r);
                            r
                        }
                    };
                    let Some(pid) = result else { continue };
                    let x = self.nonterminal(i, j as usize, k, pid);
                    for &x2 in x2s {
                        let rhs = [Symbol::N(x1), Symbol::T((k - 1) as u32), Symbol::N(x2), Symbol::T(h as u32)];
                        self.grammar.add_rule(x, &rhs);
                    }
                }
            }
        }
    }

    /// Closure of `R1 ∪ R2 ∪ Q_t ∪ {τ → d | d ∈ V_j}` restricted to
    /// `V_i ∪ V_j ∪ V_k`, or `None` if it is not irreflexive.
    #[allow(clippy::too_many_arguments)]
    fn combine(&mut self, p1: u32, p2: u32, i: usize, j: usize, k: usize, t: usize, tau: usize) -> Option<u32> {
        let topo = &self.topo;
        let c = &mut self.closure;
        c.clear();
        for &(a, b) in self.profiles[p1 as usize].iter().chain(&self.profiles[p2 as usize]) {
            c.edge(a as usize, b as usize);
        }
        for (a, b) in topo.chain_order(t) {
            c.edge(a, b);
        }
        for &d in &topo.chains[j] {
            c.edge(tau, d);
        }
        if !c.close() {
            return None;
        }
        let keep: Vec<usize> = [i, j, k].iter().flat_map(|&x| topo.chains[x].iter().copied()).collect();
        let relation = c.restrict(&keep);
        Some(self.intern_profile(relation))
    }

    fn start_rules(&mut self) {
        let n = self.n;
        if n < 2 || n % 2 == 1 {
            return;
        }
        let start = self.grammar.start();
        for h in (0..=n - 2).step_by(2) {
            if !self.w.lits[h].is_dual_of(&self.w.lits[n - 1]) {
                continue;
            }
            let left: Vec<u32> = self.spans[h].iter().copied().filter(|&x| self.info[x as usize].0 == 0).collect();
            let inner = self.spans[(h + 1) * n + n - 1].clone();
            for &x1 in &left {
                for &x2 in &inner {
                    let (p1, p2) = (self.info[x1 as usize].1, self.info[x2 as usize].1);
                    let c = &mut self.closure;
                    c.clear();
                    for &(a, b) in self.profiles[p1 as usize].iter().chain(&self.profiles[p2 as usize]) {
                        c.edge(a as usize, b as usize);
                    }
                    if c.close() {
                        let rhs = [Symbol::N(x1), Symbol::T((n - 1) as u32), Symbol::N(x2), Symbol::T(h as u32)];
                        self.grammar.add_rule(start, &rhs);
                    }
                }
            }
        }
    }
}

/// Transitive closure over a handful of vertices with bit rows.
struct Closure {
    local: Vec<u32>,
    vertices: Vec<usize>,
    rows: Vec<u64>,
    edges: Vec<(usize, usize)>,
    words: usize,
}

impl Closure {
    fn new(n: usize) -> Closure {
        Closure { local: vec![u32::MAX; n], vertices: Vec::new(), rows: Vec::new(), edges: Vec::new(), words: 1 }
    }

    fn clear(&mut self) {
        for &v in &self.vertices {
            self.local[v] = u32::MAX;
        }
        self.vertices.clear();
        self.edges.clear();
    }

    fn id(&mut self, v: usize) -> usize {
        if self.local[v] == u32::MAX {
            self.local[v] = self.vertices.len() as u32;
            self.vertices.push(v);
        }
        self.local[v] as usize
    }

    fn edge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.id(a), self.id(b));
        self.edges.push((a, b));
    }

    /// Closes the relation; false if some vertex reaches itself.
    fn close(&mut self) -> bool {
        let m = self.vertices.len();
        let words = m.div_ceil(64).max(1);
        self.words = words;
        self.rows.clear();
        self.rows.resize(m * words, 0);
        for &(a, b) in &self.edges {
            self.rows[a * words + b / 64] |= 1 << (b % 64);
        }
        for via in 0..m {
            for from in 0..m {
                if self.rows[from * words + via / 64] >> (via % 64) & 1 == 1 {
                    for word in 0..words {
                        let bits = self.rows[via * words + word];
                        self.rows[from * words + word] |= bits;
                    }
                }
            }
        }
        (0..m).all(|v| self.rows[v * words + v / 64] >> (v % 64) & 1 == 0)
    }

    fn has(&self, a: usize, b: usize) -> bool {
        self.rows[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    /// Sorted pairs among `keep` (global positions).
    fn restrict(&self, keep: &[usize]) -> Vec<(u32, u32)> {
        let mut ids: Vec<usize> = keep.iter().copied().filter(|&v| self.local[v] != u32::MAX).collect();
        ids.sort_unstable();
        ids.dedup();
        let mut out = Vec::new();
        for &a in &ids {
            for &b in &ids {
                if self.has(self.local[a] as usize, self.local[b] as usize) {
                    out.push((a as u32, b as u32));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofnet::{encode, enumerate_nets_bounded};
    use crate::syntax::parse_sequent;
    use crate::translation::translate;

    fn omega(text: &str) -> OmegaString {
        translate(&parse_sequent(text).unwrap())
    }

    fn net_codes(w: &OmegaString) -> Vec<Vec<u32>> {
        let mut codes: Vec<Vec<u32>> = enumerate_nets_bounded(w, false, usize::MAX, 64)
            .unwrap()
            .iter()
            .map(|net| encode(&net.structure).letters.iter().map(|&l| l as u32).collect())
            .collect();
        codes.sort();
        codes
    }

    #[test]
    fn axiom_grammar() {
        let w = omega("p => p");
        let g = build_grammar(&w);
        assert_eq!(g.grammar.dump(), "F1,1,1;R0 ->\nF2,2,2;R0 ->\nS -> F1,1,1;R0 e2 F2,2,2;R0 e1\n");
        assert_eq!(g.grammar.enumerate_language(10), vec![vec![1, 0]]);
    }

    #[test]
    fn topology_of_diamond() {
        // ⋄ ] ⊗ p ⊗ [
        let t = topology(&omega("=> <>p"));
        assert_eq!(t.tau, vec![None, Some(1), Some(1)]);
        assert_eq!(t.dominant, vec![1]);
        assert_eq!(t.clusters(), vec![vec![1, 2]]);
        assert!(t.weakly_below(1, 2));
        assert!(t.weakly_below(2, 1));
        assert_eq!(t.chains[2], vec![1]);
    }

    #[test]
    fn separate_clusters() {
        // ⋄ p̄ ⋄ p ⊗ p̄ ⋄ p
        let t = topology(&omega("p/p, p => p"));
        assert_eq!(t.dominant, vec![2]);
        assert_eq!(t.clusters(), vec![vec![2]]);
        let t = topology(&omega(r"p/(p\p), p => p"));
        // ⋄ p̄ ⋄ (p̄ ⅋ p) ⊗ p̄ ⋄ p : tensor over par, one cluster each
        assert_eq!(t.clusters().len(), 1);
        assert_eq!(t.max_chain(), 1);
    }

    #[test]
    fn languages_match_brute_force() {
        for text in [
            "p => p",
            r"p/p, p, p\p => p",
            r"p/p, p/p, p, p\p => p",
            r"p, p\q => q",
            r"(p/p)/(p/p) => p/p",
            r"=> (p/p)*(p/p)",
            "{ []p }, { []q } => <>[](p*q)",
            r"{ N }, <>N\S => S",
            "p*q, q\\r => p*r",
            r"p\(p*p) => p*(p\p)",
        ] {
            let w = omega(text);
            for pref in [SplitPreference::Left, SplitPreference::Right] {
                let g = build_grammar_with(&w, pref);
                assert_eq!(g.grammar.enumerate_language(100_000), net_codes(&w), "{text} {pref:?}");
                assert!(g.grammar.max_rule_length() <= 5);
            }
        }
    }

    #[test]
    fn counter_example_has_one_code() {
        let w = omega("{ []p }, { []q } => <>[](p*q)");
        let g = build_grammar(&w);
        let words = g.grammar.enumerate_language(10);
        assert_eq!(words, vec![vec![15, 14, 13, 4, 3, 6, 5, 12, 11, 10, 9, 8, 7, 2, 1, 0]]);
    }

    #[test]
    fn bounds() {
        assert_eq!(profile_count_bound(0), 1);
        assert_eq!(profile_count_bound(1), 4096);
        assert_eq!(grammar_size_bound(2, 1), 45);
        let w = omega(r"p/p, p/p, p, p\p, p\p => p");
        let g = build_grammar(&w);
        let s = g.stats();
        let d = w.params().d;
        assert!(s.max_profiles_per_triple as u128 <= profile_count_bound(d));
        assert!(s.size as u128 <= grammar_size_bound(w.len(), profile_count_bound(d)));
    }
}
