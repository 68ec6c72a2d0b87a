//! Sequent derivations read off a sisterhood-respecting net.
//!
//! Every literal of the original string keeps an identity while the goal is
//! decomposed. At each step the current subgoal is translated afresh, the net
//! is restricted to its literals, and a maximal `⅋`/`⊗` selects the last rule.

use thiserror::Error;

use super::{check_net, ProofNet, ProofStructure, Violation};
use crate::derivation::{Derivation, Hole, Rule};
use crate::syntax::{Formula, Item, MetaFormula, Sequent};
use crate::translation::{translate, Conn, Location, OmegaString, Origin};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReconstructError {
    #[error("net has {net} literals, sequent translates to {string}")]
    Length { net: usize, string: usize },
    #[error("structure is not a net over the sequent: {0}")]
    NotANet(Violation),
    #[error("inconsistent subgoal {goal}: {reason}")]
    Internal { goal: String, reason: String },
}

/// Literal identities: variables carry one, modalities their left and right
/// bracket literals in string order.
#[derive(Clone, Debug)]
enum Tagged {
    Var(String, usize),
    Under(Box<Tagged>, Box<Tagged>),
    Over(Box<Tagged>, Box<Tagged>),
    Prod(Box<Tagged>, Box<Tagged>),
    Diamond(Box<Tagged>, usize, usize),
    BoxInv(Box<Tagged>, usize, usize),
}

#[derive(Clone, Debug)]
enum TItem {
    Formula(Tagged),
    /// Contents with the ids of `[̄` and `]̄`.
    Bracket(Vec<TItem>, usize, usize),
}

#[derive(Clone, Debug)]
struct Goal {
    ante: Vec<TItem>,
    succ: Tagged,
}

impl Tagged {
    fn from_formula(f: &Formula) -> Tagged {
        let b = |g: &Formula| Box::new(Tagged::from_formula(g));
        match f {
            Formula::Var(name) => Tagged::Var(name.clone(), 0),
            Formula::Under(a, c) => Tagged::Under(b(a), b(c)),
            Formula::Over(c, a) => Tagged::Over(b(c), b(a)),
            Formula::Prod(a, c) => Tagged::Prod(b(a), b(c)),
            Formula::Diamond(a) => Tagged::Diamond(b(a), 0, 0),
            Formula::BoxInv(a) => Tagged::BoxInv(b(a), 0, 0),
        }
    }

    fn strip(&self) -> Formula {
        match self {
            Tagged::Var(name, _) => Formula::Var(name.clone()),
            Tagged::Under(a, b) => Formula::under(a.strip(), b.strip()),
            Tagged::Over(b, a) => Formula::over(b.strip(), a.strip()),
            Tagged::Prod(a, b) => Formula::prod(a.strip(), b.strip()),
            Tagged::Diamond(a, ..) => Formula::diamond(a.strip()),
            Tagged::BoxInv(a, ..) => Formula::boxinv(a.strip()),
        }
    }

    /// Visits literal ids in the order the translation emits them.
    fn walk(&mut self, positive: bool, f: &mut impl FnMut(&mut usize)) {
        match self {
            Tagged::Var(_, id) => f(id),
            Tagged::Prod(a, b) if positive => {
                a.walk(true, f);
                b.walk(true, f);
            }
            Tagged::Prod(a, b) => {
                b.walk(false, f);
                a.walk(false, f);
            }
            Tagged::Under(a, b) if positive => {
                a.walk(false, f);
                b.walk(true, f);
            }
            Tagged::Under(a, b) => {
                b.walk(false, f);
                a.walk(true, f);
            }
            Tagged::Over(b, a) if positive => {
                b.walk(true, f);
                a.walk(false, f);
            }
            Tagged::Over(b, a) => {
                a.walk(true, f);
                b.walk(false, f);
            }
            Tagged::Diamond(a, l, r) | Tagged::BoxInv(a, l, r) => {
                f(l);
                a.walk(positive, f);
                f(r);
            }
        }
    }
}

fn tag_items(m: &MetaFormula) -> Vec<TItem> {
    m.items
        .iter()
        .map(|item| match item {
            Item::Formula(f) => TItem::Formula(Tagged::from_formula(f)),
            Item::Bracket(inner) => TItem::Bracket(tag_items(inner), 0, 0),
        })
        .collect()
}

fn strip_items(items: &[TItem]) -> MetaFormula {
    MetaFormula::new(
        items
            .iter()
            .map(|item| match item {
                TItem::Formula(f) => Item::Formula(f.strip()),
                TItem::Bracket(inner, ..) => Item::Bracket(strip_items(inner)),
            })
            .collect(),
    )
}

fn walk_items(items: &mut [TItem], f: &mut impl FnMut(&mut usize)) {
    for item in items.iter_mut().rev() {
        match item {
            TItem::Formula(t) => t.walk(false, f),
            TItem::Bracket(inner, open, close) => {
                f(open);
                walk_items(inner, f);
                f(close);
            }
        }
    }
}

impl Goal {
    fn sequent(&self) -> Sequent {
        Sequent::new(strip_items(&self.ante), self.succ.strip())
    }

    fn walk(&mut self, f: &mut impl FnMut(&mut usize)) {
        walk_items(&mut self.ante, f);
        self.succ.walk(true, f);
    }

    fn ids(&self) -> Vec<usize> {
        let mut copy = self.clone();
        let mut out = Vec::new();
        copy.walk(&mut |id| out.push(*id));
        out
    }
}

fn level<'a>(items: &'a [TItem], path: &[usize]) -> Option<&'a [TItem]> {
    match path.split_first() {
        None => Some(items),
        Some((&k, rest)) => match items.get(k)? {
            TItem::Bracket(inner, ..) => level(inner, rest),
            TItem::Formula(_) => None,
        },
    }
}

fn splice(items: &[TItem], path: &[usize], start: usize, end: usize, with: Vec<TItem>) -> Vec<TItem> {
    let mut out = items.to_vec();
    match path.split_first() {
        None => {
            out.splice(start..end, with);
        }
        Some((&k, rest)) => {
            if let TItem::Bracket(inner, open, close) = &items[k] {
                out[k] = TItem::Bracket(splice(inner, rest, start, end, with), *open, *close);
            }
        }
    }
    out
}

/// Builds a derivation of `s` from a sisterhood-respecting net over
/// `translate(s)`.
pub fn net_to_derivation(net: &ProofNet, s: &Sequent) -> Result<Derivation, ReconstructError> {
    let w = translate(s);
    if net.structure.len() != w.len() {
        return Err(ReconstructError::Length { net: net.structure.len(), string: w.len() });
    }
    check_net(&net.structure, &w).map_err(ReconstructError::NotANet)?;
    let mut goal = Goal { ante: tag_items(&s.antecedent), succ: Tagged::from_formula(&s.succedent) };
    let mut next = 0;
    goal.walk(&mut |id| {
        *id = next;
        next += 1;
    });
    decompose(goal, net.structure.partners())
}

fn decompose(goal: Goal, link: &[usize]) -> Result<Derivation, ReconstructError> {
    let seq = goal.sequent();
    let fail = |reason: &str| ReconstructError::Internal { goal: seq.to_string(), reason: reason.to_string() };
    let w = translate(&seq);
    let ids = goal.ids();
    let mut local = vec![usize::MAX; link.len()];
    for (pos, &id) in ids.iter().enumerate() {
        local[id] = pos;
    }
    let partner = ids
        .iter()
        .map(|&id| local[link[id]])
        .collect::<Vec<_>>();
    if partner.contains(&usize::MAX) {
        return Err(fail("links leave the subgoal"));
    }
    let structure = ProofStructure::new(partner).map_err(|e| fail(&e.to_string()))?;
    let net = check_net(&structure, &w).map_err(|v| fail(&format!("restriction is not a net: {v}")))?;

    let Some(c) = maximal(&w, &net) else {
        return match (&goal.ante[..], &goal.succ) {
            ([TItem::Formula(Tagged::Var(a, _))], Tagged::Var(b, _)) if a == b => Ok(Derivation::axiom(a)),
            _ => Err(fail("no connective left but not an axiom")),
        };
    };
    let span = w
        .spans
        .iter()
        .find(|s| s.root == Some(c))
        .ok_or_else(|| fail("maximal connective is not principal"))?;
    let gap_of = |t: usize| match &w.origin[t] {
        Origin::Meta { path, gap } => Some((path.clone(), *gap)),
        Origin::Formula { .. } => None,
    };
    let tensor_gap = || net.attach[c].and_then(gap_of).ok_or_else(|| fail("tensor is not attached to a meta par"));
    let node = |rule: Rule, hole: Option<Hole>, premises: Vec<Goal>| -> Result<Derivation, ReconstructError> {
        let premises = premises
            .into_iter()
            .map(|g| decompose(g, link))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Derivation::node(seq.clone(), rule, hole, premises))
    };

    match &span.location {
        Location::Succedent => {
            let ante = goal.ante.clone();
            match (&goal.succ, w.conns[c]) {
                (Tagged::Under(a, b), Conn::Par) => {
                    let mut items = vec![TItem::Formula((**a).clone())];
                    items.extend(ante);
                    node(Rule::UnderRight, None, vec![Goal { ante: items, succ: (**b).clone() }])
                }
                (Tagged::Over(b, a), Conn::Par) => {
                    let mut items = ante;
                    items.push(TItem::Formula((**a).clone()));
                    node(Rule::OverRight, None, vec![Goal { ante: items, succ: (**b).clone() }])
                }
                (Tagged::BoxInv(a, left, right), Conn::Par) => {
                    // ]̄ ⅋ A⁺ ⅋ [̄ : the right literal opens the new bracket
                    let items = vec![TItem::Bracket(ante, *right, *left)];
                    node(Rule::BoxRight, None, vec![Goal { ante: items, succ: (**a).clone() }])
                }
                (Tagged::Prod(a, b), Conn::Tensor) => {
                    let (path, k) = tensor_gap()?;
                    if !path.is_empty() || k > ante.len() {
                        return Err(fail("product split point is not at the top level"));
                    }
                    let left = Goal { ante: ante[..k].to_vec(), succ: (**a).clone() };
                    let right = Goal { ante: ante[k..].to_vec(), succ: (**b).clone() };
                    node(Rule::ProdRight, None, vec![left, right])
                }
                (Tagged::Diamond(a, ..), Conn::Tensor) => match &ante[..] {
                    [TItem::Bracket(inner, ..)] => {
                        node(Rule::DiamondRight, None, vec![Goal { ante: inner.clone(), succ: (**a).clone() }])
                    }
                    _ => Err(fail("diamond succedent without a single bracket")),
                },
                _ => Err(fail("no case applies to the succedent")),
            }
        }
        Location::Antecedent { path, index } => {
            let pos = *index;
            let items = level(&goal.ante, path).ok_or_else(|| fail("bad formula location"))?;
            let TItem::Formula(f) = &items[pos] else {
                return Err(fail("location does not hold a formula"));
            };
            let replace = |start: usize, end: usize, with: Vec<TItem>| Goal {
                ante: splice(&goal.ante, path, start, end, with),
                succ: goal.succ.clone(),
            };
            let hole = |start: usize, end: usize| Some(Hole::new(path.clone(), start, end));
            match (f, w.conns[c]) {
                (Tagged::Prod(a, b), Conn::Par) => {
                    let with = vec![TItem::Formula((**a).clone()), TItem::Formula((**b).clone())];
                    node(Rule::ProdLeft, hole(pos, pos + 1), vec![replace(pos, pos + 1, with)])
                }
                (Tagged::Diamond(a, left, right), Conn::Par) => {
                    let with = vec![TItem::Bracket(vec![TItem::Formula((**a).clone())], *left, *right)];
                    node(Rule::DiamondLeft, hole(pos, pos + 1), vec![replace(pos, pos + 1, with)])
                }
                (Tagged::Under(a, b), Conn::Tensor) => {
                    let (gpath, g) = tensor_gap()?;
                    if &gpath != path || g > pos {
                        return Err(fail("left division attached outside its level"));
                    }
                    let minor = Goal { ante: items[g..pos].to_vec(), succ: (**a).clone() };
                    let major = replace(g, pos + 1, vec![TItem::Formula((**b).clone())]);
                    node(Rule::UnderLeft, hole(g, pos + 1), vec![minor, major])
                }
                (Tagged::Over(b, a), Conn::Tensor) => {
                    let (gpath, g) = tensor_gap()?;
                    if &gpath != path || g <= pos {
                        return Err(fail("right division attached outside its level"));
                    }
                    let minor = Goal { ante: items[pos + 1..g].to_vec(), succ: (**a).clone() };
                    let major = replace(pos, g, vec![TItem::Formula((**b).clone())]);
                    node(Rule::OverLeft, hole(pos, g), vec![minor, major])
                }
                (Tagged::BoxInv(a, ..), Conn::Tensor) => {
                    let Some((&k, outer)) = path.split_last() else {
                        return Err(fail("boxed formula outside a bracket"));
                    };
                    if items.len() != 1 {
                        return Err(fail("bracket around a boxed formula holds more"));
                    }
                    let goal2 = Goal {
                        ante: splice(&goal.ante, outer, k, k + 1, vec![TItem::Formula((**a).clone())]),
                        succ: goal.succ.clone(),
                    };
                    node(Rule::BoxLeft, Some(Hole::new(outer.to_vec(), k, k + 1)), vec![goal2])
                }
                _ => Err(fail("no case applies to the antecedent formula")),
            }
        }
    }
}

/// Smallest `⅋`/`⊗` with no outgoing dominance or attachment edge to another
/// `⅋`/`⊗`.
fn maximal(w: &OmegaString, net: &ProofNet) -> Option<usize> {
    (0..w.len()).find(|&c| {
        w.conns[c] != Conn::Meta
            && w.parent[c].is_none()
            && net.attach[c].is_none_or(|t| w.conns[t] == Conn::Meta)
    })
}
