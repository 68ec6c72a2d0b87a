//! Proof structures over a translated string and the net correctness
//! criterion.
//!
//! All indices are 0-based literal positions; connective `i` sits right
//! before literal `i`.

mod dot;
mod reconstruct;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::translation::{Conn, OmegaString};

pub use dot::to_dot;
pub use reconstruct::{net_to_derivation, ReconstructError};

/// Default largest `n` accepted by [`enumerate_nets`].
pub const ENUMERATION_BOUND: usize = 20;

/// A fixed-point-free involution on literal positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ProofStructure {
    partner: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("position {0} is paired with itself")]
    FixedPoint(usize),
    #[error("position {0} points outside the string")]
    OutOfRange(usize),
    #[error("pairing is not symmetric at position {0}")]
    NotInvolution(usize),
}

impl ProofStructure {
    pub fn new(partner: Vec<usize>) -> Result<ProofStructure, StructureError> {
        let n = partner.len();
        for (i, &j) in partner.iter().enumerate() {
            if j >= n {
                return Err(StructureError::OutOfRange(i));
            }
            if j == i {
                return Err(StructureError::FixedPoint(i));
            }
            if partner[j] != i {
                return Err(StructureError::NotInvolution(i));
            }
        }
        Ok(ProofStructure { partner })
    }

    /// Builds the structure from unordered pairs covering `0..n`.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<ProofStructure, StructureError> {
        let mut partner = vec![usize::MAX; n];
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(StructureError::OutOfRange(a.max(b)));
            }
            if partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(StructureError::NotInvolution(a));
            }
            partner[a] = b;
            partner[b] = a;
        }
        if let Some(i) = partner.iter().position(|&j| j == usize::MAX) {
            return Err(StructureError::OutOfRange(i));
        }
        ProofStructure::new(partner)
    }

    pub fn len(&self) -> usize {
        self.partner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    pub fn partner(&self, i: usize) -> usize {
        self.partner[i]
    }

    pub fn partners(&self) -> &[usize] {
        &self.partner
    }

    /// Edges `(a, b)` with `a < b`, sorted by `a`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(i, &j)| i < j)
            .map(|(i, &j)| (i, j))
            .collect()
    }
}

/// True iff no two edges cross when drawn above the line.
pub fn is_planar(p: &ProofStructure) -> bool {
    let mut stack = Vec::new();
    for i in 0..p.len() {
        let j = p.partner(i);
        if j > i {
            stack.push(i);
        } else if stack.pop() != Some(j) {
            return false;
        }
    }
    stack.is_empty()
}

/// Faces of a planar structure. Region 0 is the outer one; region `k > 0`
/// lies directly under the `k`-th edge in order of left endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Regions {
    pub of_conn: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    /// Bounding edge `(a, b)` of each inner region.
    pub edges: Vec<(usize, usize)>,
}

impl Regions {
    pub fn count(&self) -> usize {
        self.members.len()
    }
}

pub fn regions(p: &ProofStructure) -> Option<Regions> {
    if !is_planar(p) {
        return None;
    }
    let edges = p.pairs();
    let mut region_of_edge = vec![0; p.len()];
    for (k, &(a, _)) in edges.iter().enumerate() {
        region_of_edge[a] = k + 1;
    }
    let mut members = vec![Vec::new(); edges.len() + 1];
    let mut of_conn = Vec::with_capacity(p.len());
    let mut stack: Vec<usize> = Vec::new();
    for i in 0..p.len() {
        let region = stack.last().map_or(0, |&a| region_of_edge[a]);
        of_conn.push(region);
        members[region].push(i);
        if p.partner(i) > i {
            stack.push(i);
        } else {
            stack.pop();
        }
    }
    Some(Regions { of_conn, members, edges })
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub enum Violation {
    #[error("structure has {structure} positions, string has {string}")]
    Length { structure: usize, string: usize },
    #[error("literals {0} and {1} are linked but not dual")]
    Duality(usize, usize),
    #[error("edges cross")]
    NonPlanar,
    #[error("region {region} holds {count} par-like connectives")]
    RegionPar { region: usize, count: usize },
    #[error("the attachment and dominance graph has a cycle")]
    Cycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofNet {
    pub structure: ProofStructure,
    pub regions: Regions,
    /// For each `⊗`, the `⅋`/`⋄` of its region.
    pub attach: Vec<Option<usize>>,
}

/// Checks duality, planarity, one par per region and acyclicity, reporting
/// the first failed condition.
pub fn check_net(p: &ProofStructure, w: &OmegaString) -> Result<ProofNet, Violation> {
    let n = w.len();
    if p.len() != n {
        return Err(Violation::Length { structure: p.len(), string: n });
    }
    for (a, b) in p.pairs() {
        if !w.lits[a].is_dual_of(&w.lits[b]) {
            return Err(Violation::Duality(a, b));
        }
    }
    let regions = regions(p).ok_or(Violation::NonPlanar)?;
    let mut par_of = vec![usize::MAX; regions.count()];
    for (region, members) in regions.members.iter().enumerate() {
        let pars: Vec<usize> = members.iter().copied().filter(|&c| w.conns[c].is_par_like()).collect();
        if pars.len() != 1 {
            return Err(Violation::RegionPar { region, count: pars.len() });
        }
        par_of[region] = pars[0];
    }
    let attach: Vec<Option<usize>> = (0..n)
        .map(|c| (w.conns[c] == Conn::Tensor).then(|| par_of[regions.of_conn[c]]))
        .collect();
    if has_cycle(w, &attach) {
        return Err(Violation::Cycle);
    }
    Ok(ProofNet { structure: p.clone(), regions, attach })
}

/// Every connective has at most two outgoing edges: to its dominator and,
/// for a tensor, to its attached par.
fn has_cycle(w: &OmegaString, attach: &[Option<usize>]) -> bool {
    let n = w.len();
    let mut indegree = vec![0usize; n];
    let succ = |c: usize| w.parent[c].into_iter().chain(attach[c]);
    for c in 0..n {
        for d in succ(c) {
            indegree[d] += 1;
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&c| indegree[c] == 0).collect();
    let mut seen = 0;
    while let Some(c) = ready.pop() {
        seen += 1;
        for d in succ(c) {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                ready.push(d);
            }
        }
    }
    seen != n
}

/// Sister brackets are linked to sister brackets.
pub fn respects_sisterhood(p: &ProofStructure, w: &OmegaString) -> bool {
    (0..w.len()).all(|i| match w.sister_lit[i] {
        None => true,
        Some(j) => {
            let i2 = p.partner(i);
            match w.sister_lit[i2] {
                Some(j2) => p.partner(j) == j2,
                None => false,
            }
        }
    })
}

/// `letters[i] = j` stands for the letter `e_(j+1)` at position `i+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CodeWord {
    pub letters: Vec<usize>,
}

impl fmt::Display for CodeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &j) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "e{}", j + 1)?;
        }
        Ok(())
    }
}

pub fn encode(p: &ProofStructure) -> CodeWord {
    CodeWord { letters: p.partner.clone() }
}

pub fn decode(cw: &CodeWord) -> Result<ProofStructure, StructureError> {
    ProofStructure::new(cw.letters.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("string has {n} literals, enumeration is limited to {bound}")]
    TooLong { n: usize, bound: usize },
}

/// All nets over `w` (with sisterhood if asked), at most `limit` of them.
pub fn enumerate_nets(w: &OmegaString, require_sisterhood: bool, limit: usize) -> Result<Vec<ProofNet>, EnumerationError> {
    enumerate_nets_bounded(w, require_sisterhood, limit, ENUMERATION_BOUND)
}

pub fn enumerate_nets_bounded(
    w: &OmegaString,
    require_sisterhood: bool,
    limit: usize,
    bound: usize,
) -> Result<Vec<ProofNet>, EnumerationError> {
    let n = w.len();
    if n > bound {
        return Err(EnumerationError::TooLong { n, bound });
    }
    let mut out = Vec::new();
    if n % 2 == 1 || w.natural_total() != -1 || limit == 0 {
        return Ok(out);
    }
    let mut search = Search {
        w,
        require_sisterhood,
        limit,
        partner: vec![usize::MAX; n],
        stack: Vec::new(),
        out: &mut out,
    };
    search.step(0, 0);
    Ok(out)
}

struct Search<'a> {
    w: &'a OmegaString,
    require_sisterhood: bool,
    limit: usize,
    partner: Vec<usize>,
    /// Open edges with the number of pars seen so far in their region.
    stack: Vec<(usize, usize)>,
    out: &'a mut Vec<ProofNet>,
}

impl Search<'_> {
    /// Position `i` has its connective still unprocessed; `outer` counts
    /// pars of the outer region.
    fn step(&mut self, i: usize, outer: usize) {
        if self.out.len() >= self.limit {
            return;
        }
        let n = self.w.len();
        if i == n {
            if outer == 1 && self.stack.is_empty() {
                self.finish();
            }
            return;
        }
        // a stack this deep can no longer be closed
        if self.stack.len() > n - i {
            return;
        }
        let par = usize::from(self.w.conns[i].is_par_like());
        let outer = match self.stack.last_mut() {
            Some(top) => {
                top.1 += par;
                if top.1 > 1 {
                    top.1 -= par;
                    return;
                }
                outer
            }
            None if outer + par > 1 => return,
            None => outer + par,
        };
        // close the innermost open edge
        if let Some(&(a, count)) = self.stack.last() {
            if count == 1 && self.w.lits[a].is_dual_of(&self.w.lits[i]) {
                self.stack.pop();
                self.partner[a] = i;
                self.partner[i] = a;
                self.step(i + 1, outer);
                self.partner[a] = usize::MAX;
                self.partner[i] = usize::MAX;
                self.stack.push((a, count));
            }
        }
        // or open a new one
        self.stack.push((i, 0));
        self.step(i + 1, outer);
        self.stack.pop();
        if let Some(top) = self.stack.last_mut() {
            top.1 -= par;
        }
    }

    fn finish(&mut self) {
        let p = ProofStructure { partner: self.partner.clone() };
        if self.require_sisterhood && !respects_sisterhood(&p, self.w) {
            return;
        }
        if let Ok(net) = check_net(&p, self.w) {
            self.out.push(net);
        }
    }
}
