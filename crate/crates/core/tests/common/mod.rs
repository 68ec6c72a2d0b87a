//! Generators and brute-force references shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use lbstar_core::pentus::Topology;
use lbstar_core::proofnet::{is_planar, ProofStructure};
use lbstar_core::{Formula, Item, MetaFormula, OmegaString, Sequent};
use rand::Rng;

pub const VARS: [&str; 2] = ["p", "q"];

/// Literal fixtures as (sequent, derivable).
pub const FIXTURES: [(&str, bool); 7] = [
    ("p => p", true),
    (r"N, (N\S)/S, N, (N\S)/N, N => S", true),
    (r"CN, (CN\CN)/(S/N), N, (N\S)/S, N, (N\S)/N => CN", true),
    (r"{ N }, <>N\S, { []((<>N\S)\(<>N\S))/(<>N\S), <>N\S } => S", true),
    (r"r, (r\p)/s, s, r, (r\q)/s, s => (r*((r\(p*q))/s))*s", true),
    (r"CN, (CN\CN)/(S/N), N, N\S, { []((N\S)\(N\S))/(N\S), (N\S)/N } => CN", false),
    ("{ []p }, { []q } => <>[](p*q)", false),
];

/// Further small sequents with a known answer.
pub const EXTRA_FIXTURES: [(&str, bool); 15] = [
    ("p => q", false),
    ("=> p/p", true),
    (r"=> (p/p)\(p/p)", true),
    ("=> p", false),
    ("{ { p } } => <><>p", true),
    ("{ []p } => p", true),
    ("p => []<>p", true),
    ("p => <>p", false),
    ("[]p => p", false),
    (r"p/p, p, p\p => p", true),
    (r"a/b, b/c => a/c", true),
    (r"p*q, q\r => p*r", true),
    (r"{ a, a\b } => <>b", true),
    (r"p, q => q*p", false),
    // two profiles share one triple
    (r"p\p*(p\p) => p\p*((p\p)*p/p)", true),
];

pub fn random_formula<R: Rng>(rng: &mut R, vars: &[&str], connectives: usize) -> Formula {
    if connectives == 0 {
        return Formula::var(vars[rng.gen_range(0..vars.len())]);
    }
    let rest = connectives - 1;
    match rng.gen_range(0..8) {
        0 => Formula::diamond(random_formula(rng, vars, rest)),
        1 => Formula::boxinv(random_formula(rng, vars, rest)),
        kind => {
            let left = rng.gen_range(0..=rest);
            let a = random_formula(rng, vars, left);
            let b = random_formula(rng, vars, rest - left);
            match kind % 3 {
                0 => Formula::under(a, b),
                1 => Formula::over(a, b),
                _ => Formula::prod(a, b),
            }
        }
    }
}

/// Antecedent with `formulas` formulas spread over random meta-brackets.
pub fn random_structure<R: Rng>(rng: &mut R, formulas: Vec<Formula>, bracket_depth: usize) -> MetaFormula {
    let mut items = Vec::new();
    let mut rest = formulas.into_iter().peekable();
    while rest.peek().is_some() {
        if bracket_depth > 0 && rng.gen_bool(0.25) {
            let take = rng.gen_range(0..=2);
            let inner: Vec<Formula> = rest.by_ref().take(take).collect();
            items.push(Item::Bracket(random_structure(rng, inner, bracket_depth - 1)));
        } else {
            items.push(Item::Formula(rest.next().unwrap()));
        }
    }
    MetaFormula::new(items)
}

pub fn random_sequent<R: Rng>(rng: &mut R, vars: &[&str], max_connectives: usize) -> Sequent {
    let total = rng.gen_range(0..=max_connectives);
    let count = rng.gen_range(0..=3usize);
    let mut budget = vec![0; count + 1];
    for _ in 0..total {
        budget[rng.gen_range(0..=count)] += 1;
    }
    let succedent = random_formula(rng, vars, budget[count]);
    let formulas = budget[..count].iter().map(|&c| random_formula(rng, vars, c)).collect();
    Sequent::new(random_structure(rng, formulas, 2), succedent)
}

/// Balanced-literal sequents with `n <= max_n`; half of the draws insist on
/// every variable occurring an even number of times, which is where the
/// derivable ones live.
pub fn random_small_sequent<R: Rng>(rng: &mut R, max_n: usize) -> Sequent {
    let want_balanced = rng.gen_bool(0.5);
    loop {
        let s = random_sequent(rng, &VARS, 6);
        let n = lbstar_core::translate(&s).len();
        if n > max_n {
            continue;
        }
        if !want_balanced || balanced(&s) {
            return s;
        }
    }
}

/// One variable and several antecedent formulas: every literal can link to
/// every dual, so segments of one span often differ in profile.
pub fn random_dense_sequent<R: Rng>(rng: &mut R, max_n: usize) -> Sequent {
    loop {
        let count = rng.gen_range(1..=3);
        let formulas = (0..count)
            .map(|_| {
                let c = rng.gen_range(1..=5);
                random_formula(rng, &["p"], c)
            })
            .collect();
        let c = rng.gen_range(1..=5);
        let s = Sequent::new(random_structure(rng, formulas, 1), random_formula(rng, &["p"], c));
        if lbstar_core::translate(&s).len() <= max_n {
            return s;
        }
    }
}

fn balanced(s: &Sequent) -> bool {
    let w = lbstar_core::translate(s);
    let mut counts = std::collections::HashMap::new();
    for l in &w.lits {
        let key = if l.is_negative() { l.dual() } else { l.clone() };
        *counts.entry(key).or_insert(0i64) += if l.is_negative() { -1 } else { 1 };
    }
    counts.values().all(|&c| c == 0)
}

/// Calls `f` on every formula over `vars` with exactly `c` connectives and
/// modal nesting at most `depth`.
pub fn visit_formulas(vars: &[&str], c: usize, depth: usize, f: &mut dyn FnMut(&Formula)) {
    if c == 0 {
        for v in vars {
            f(&Formula::var(*v));
        }
        return;
    }
    if depth > 0 {
        visit_formulas(vars, c - 1, depth - 1, &mut |a| {
            f(&Formula::diamond(a.clone()));
            f(&Formula::boxinv(a.clone()));
        });
    }
    for left in 0..c {
        visit_formulas(vars, left, depth, &mut |a| {
            visit_formulas(vars, c - 1 - left, depth, &mut |b| {
                f(&Formula::under(a.clone(), b.clone()));
                f(&Formula::over(a.clone(), b.clone()));
                f(&Formula::prod(a.clone(), b.clone()));
            });
        });
    }
}

/// Cost of a sequent for the exhaustive set: logical connectives plus
/// meta-bracket pairs.
pub fn weight(s: &Sequent) -> usize {
    s.connectives() + s.antecedent.bracket_count()
}

/// Calls `f` on every sequent over two variables with weight exactly
/// `weight`, bracket depth at most `depth` and at most `formulas` antecedent
/// formulas, up to renaming of variables (the first one read is `p`).
pub fn visit_sequents(weight: usize, depth: usize, formulas: usize, f: &mut dyn FnMut(&Sequent)) {
    visit_items(weight, depth, formulas, &mut |items, used| {
        let antecedent = MetaFormula::new(items.to_vec());
        visit_formulas(&VARS, weight - used, depth, &mut |succedent| {
            let s = Sequent::new(antecedent.clone(), succedent.clone());
            if canonical(&s) && s.metrics().bdepth <= depth {
                f(&s);
            }
        });
    });
}

/// Item sequences using at most `budget`, reported with the weight used.
fn visit_items(budget: usize, depth: usize, formulas: usize, f: &mut dyn FnMut(&[Item], usize)) {
    let mut items = Vec::new();
    extend_items(&mut items, 0, budget, depth, formulas, f);
}

fn extend_items(
    items: &mut Vec<Item>,
    used: usize,
    budget: usize,
    depth: usize,
    formulas: usize,
    f: &mut dyn FnMut(&[Item], usize),
) {
    f(items, used);
    for c in 0..=budget - used {
        if formulas > 0 {
            visit_formulas(&VARS, c, depth, &mut |a| {
                items.push(Item::Formula(a.clone()));
                extend_items(items, used + c, budget, depth, formulas - 1, f);
                items.pop();
            });
        }
    }
    if depth > 0 && used < budget {
        visit_items(budget - used - 1, depth - 1, formulas, &mut |inner, w| {
            let count = MetaFormula::new(inner.to_vec()).formulas().len();
            items.push(Item::Bracket(MetaFormula::new(inner.to_vec())));
            extend_items(items, used + w + 1, budget, depth, formulas - count, f);
            items.pop();
        });
    }
}

fn canonical(s: &Sequent) -> bool {
    let mut names = Vec::new();
    for f in s.antecedent.formulas() {
        f.variables(&mut names);
    }
    s.succedent.variables(&mut names);
    names.first().is_none_or(|&v| v == "p")
}

/// Profile and open par of every correct segment over literals `i..k`,
/// keyed by its code (absolute letters).
pub type SegmentKey = (usize, Vec<(u32, u32)>, Vec<u32>);

pub fn brute_force_segments(w: &OmegaString, topo: &Topology, i: usize, k: usize) -> BTreeSet<SegmentKey> {
    let mut out = BTreeSet::new();
    if k < i || (k - i) % 2 == 1 {
        return out;
    }
    let mut partner = vec![usize::MAX; k - i];
    pairings(w, i, 0, &mut partner, &mut |p| {
        if let Some(key) = segment_profile(w, topo, i, k, p) {
            out.insert(key);
        }
    });
    out
}

fn pairings(w: &OmegaString, i: usize, at: usize, partner: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if at == partner.len() {
        f(partner);
        return;
    }
    if partner[at] != usize::MAX {
        return pairings(w, i, at + 1, partner, f);
    }
    for other in at + 1..partner.len() {
        if partner[other] == usize::MAX && w.lits[i + at].is_dual_of(&w.lits[i + other]) {
            partner[at] = other;
            partner[other] = at;
            pairings(w, i, at + 1, partner, f);
            partner[at] = usize::MAX;
            partner[other] = usize::MAX;
        }
    }
}

fn segment_profile(w: &OmegaString, topo: &Topology, i: usize, k: usize, local: &[usize]) -> Option<SegmentKey> {
    let m = local.len();
    let p = ProofStructure::new(if m == 0 { Vec::new() } else { local.to_vec() }).ok();
    if m > 0 && !p.as_ref().is_some_and(is_planar) {
        return None;
    }
    // innermost enclosing link of each connective c_i..c_k, by its left end
    let mut region = vec![None; k - i + 1];
    for (c, slot) in region.iter_mut().enumerate() {
        let mut best: Option<usize> = None;
        for (a, &b) in local.iter().enumerate() {
            if a < b && a < c && c <= b && best.is_none_or(|x| a > x) {
                best = Some(a);
            }
        }
        *slot = best;
    }
    let par = |c: usize| w.conns[c].is_par_like();
    let mut open = None;
    let mut owner: std::collections::HashMap<Option<usize>, usize> = Default::default();
    for (c, &r) in region.iter().enumerate() {
        if par(i + c) {
            if owner.insert(r, i + c).is_some() {
                return None;
            }
            if r.is_none() {
                open = Some(i + c);
            }
        }
    }
    let regions: HashSet<Option<usize>> =
        std::iter::once(None).chain((0..m).filter(|&a| a < local[a]).map(Some)).collect();
    if regions.iter().any(|r| !owner.contains_key(r)) {
        return None;
    }
    let j = open?;
    let n = w.len();
    let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, r) in region.iter().enumerate() {
        if !par(i + c) {
            edges[i + c].push(owner[r]);
        }
    }
    for (c, out) in edges.iter_mut().enumerate() {
        if let Some(parent) = w.parent[c] {
            out.push(parent);
        }
    }
    if has_cycle(&edges) {
        return None;
    }
    // add cluster moves for the profile
    for c in 0..n {
        if let Some(t) = topo.tau[c] {
            edges[t].push(c);
        }
    }
    let keep: BTreeSet<usize> = [i, j, k].iter().flat_map(|&x| topo.chains[x].iter().copied()).collect();
    let mut relation = Vec::new();
    for &a in &keep {
        let reach = reachable(&edges, a);
        for &b in &keep {
            if a != b && reach[b] {
                relation.push((a as u32, b as u32));
            }
        }
    }
    let code = (0..m).map(|a| (i + local[a]) as u32).collect();
    Some((j, relation, code))
}

fn reachable(edges: &[Vec<usize>], from: usize) -> Vec<bool> {
    let mut seen = vec![false; edges.len()];
    let mut stack: Vec<usize> = edges[from].clone();
    while let Some(x) = stack.pop() {
        if !std::mem::replace(&mut seen[x], true) {
            stack.extend(&edges[x]);
        }
    }
    seen
}

fn has_cycle(edges: &[Vec<usize>]) -> bool {
    let mut indegree = vec![0; edges.len()];
    for list in edges {
        for &b in list {
            indegree[b] += 1;
        }
    }
    let mut queue: Vec<usize> = (0..edges.len()).filter(|&v| indegree[v] == 0).collect();
    let mut removed = 0;
    while let Some(v) = queue.pop() {
        removed += 1;
        for &b in &edges[v] {
            indegree[b] -= 1;
            if indegree[b] == 0 {
                queue.push(b);
            }
        }
    }
    removed < edges.len()
}
