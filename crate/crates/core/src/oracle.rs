//! Exhaustive backward proof search in the cut-free sequent calculus.
//!
//! This is the slow reference decider: every backward rule application
//! removes one logical connective, so search depth is bounded by the
//! connective count of the goal. The rules `·→`, `⟨⟩→`, `→\`, `→/` and
//! `→[]⁻¹` are invertible and are applied eagerly without backtracking.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::derivation::{Derivation, Hole, Rule};
use crate::syntax::{Formula, Item, MetaFormula, Sequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Goals with more logical connectives than this are refused.
    pub max_connectives: usize,
    pub time_limit: Option<Duration>,
    /// Cap on expanded search nodes.
    pub max_nodes: Option<usize>,
}

impl SearchBudget {
    /// A budget sized for `goal` with no time or node limit.
    pub fn for_goal(goal: &Sequent) -> SearchBudget {
        SearchBudget {
            max_connectives: goal.connectives().max(1),
            time_limit: None,
            max_nodes: None,
        }
    }

    pub fn with_time_limit(mut self, limit: Duration) -> SearchBudget {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_max_nodes(mut self, nodes: usize) -> SearchBudget {
        self.max_nodes = Some(nodes);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofOutcome {
    Proved(Derivation),
    NotDerivable,
    BudgetExceeded,
}

impl ProofOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProofOutcome::Proved(_))
    }

    /// `Some(derivable)` unless the budget ran out.
    pub fn derivable(&self) -> Option<bool> {
        match self {
            ProofOutcome::Proved(_) => Some(true),
            ProofOutcome::NotDerivable => Some(false),
            ProofOutcome::BudgetExceeded => None,
        }
    }
}

struct Exceeded;

struct Search {
    memo: HashMap<Sequent, Option<Derivation>>,
    nodes: usize,
    max_nodes: Option<usize>,
    deadline: Option<Instant>,
}

/// Searches for a cut-free derivation of `goal`.
pub fn prove(goal: &Sequent, budget: SearchBudget) -> ProofOutcome {
    if goal.connectives() > budget.max_connectives {
        return ProofOutcome::BudgetExceeded;
    }
    let mut search = Search {
        memo: HashMap::new(),
        nodes: 0,
        max_nodes: budget.max_nodes,
        deadline: budget.time_limit.map(|t| Instant::now() + t),
    };
    match search.solve(goal) {
        Ok(Some(d)) => ProofOutcome::Proved(d),
        Ok(None) => ProofOutcome::NotDerivable,
        Err(Exceeded) => ProofOutcome::BudgetExceeded,
    }
}

/// Literal balance: every variable occurs as often positively as
/// negatively, and bracket literals balance likewise. Necessary for
/// derivability, since every rule preserves it and axioms satisfy it.
pub(crate) fn balanced(goal: &Sequent) -> bool {
    fn walk<'a>(f: &'a Formula, pol: i64, vars: &mut HashMap<&'a str, i64>, brackets: &mut i64) {
        match f {
            Formula::Var(name) => *vars.entry(name.as_str()).or_insert(0) += pol,
            Formula::Under(arg, res) | Formula::Over(res, arg) => {
                walk(arg, -pol, vars, brackets);
                walk(res, pol, vars, brackets);
            }
            Formula::Prod(a, b) => {
                walk(a, pol, vars, brackets);
                walk(b, pol, vars, brackets);
            }
            Formula::Diamond(a) => {
                *brackets += pol;
                walk(a, pol, vars, brackets);
            }
            Formula::BoxInv(a) => {
                *brackets -= pol;
                walk(a, pol, vars, brackets);
            }
        }
    }
    fn config<'a>(m: &'a MetaFormula, vars: &mut HashMap<&'a str, i64>, brackets: &mut i64) {
        for item in &m.items {
            match item {
                Item::Formula(f) => walk(f, -1, vars, brackets),
                Item::Bracket(inner) => {
                    *brackets -= 1;
                    config(inner, vars, brackets);
                }
            }
        }
    }
    let mut vars = HashMap::new();
    let mut brackets = 0;
    config(&goal.antecedent, &mut vars, &mut brackets);
    walk(&goal.succedent, 1, &mut vars, &mut brackets);
    brackets == 0 && vars.values().all(|&v| v == 0)
}

/// A formula occurrence in the antecedent: bracket path, index, formula.
fn occurrences(m: &MetaFormula) -> Vec<(Vec<usize>, usize, &Formula)> {
    fn walk<'a>(m: &'a MetaFormula, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, usize, &'a Formula)>) {
        for (idx, item) in m.items.iter().enumerate() {
            match item {
                Item::Formula(f) => out.push((path.clone(), idx, f)),
                Item::Bracket(inner) => {
                    path.push(idx);
                    walk(inner, path, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    walk(m, &mut Vec::new(), &mut out);
    out
}

/// Brackets holding exactly one `[]A`: (path to the bracket's level, index, A).
fn boxed_brackets(m: &MetaFormula) -> Vec<(Vec<usize>, usize, &Formula)> {
    fn walk<'a>(m: &'a MetaFormula, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, usize, &'a Formula)>) {
        for (idx, item) in m.items.iter().enumerate() {
            if let Item::Bracket(inner) = item {
                if let [Item::Formula(Formula::BoxInv(a))] = &inner.items[..] {
                    out.push((path.clone(), idx, a));
                }
                path.push(idx);
                walk(inner, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(m, &mut Vec::new(), &mut out);
    out
}

fn formula_item(f: &Formula) -> Item {
    Item::Formula(f.clone())
}

impl Search {
    fn tick(&mut self) -> Result<(), Exceeded> {
        self.nodes += 1;
        if self.max_nodes.is_some_and(|max| self.nodes > max) {
            return Err(Exceeded);
        }
        if self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() > d) {
            return Err(Exceeded);
        }
        Ok(())
    }

    fn solve(&mut self, goal: &Sequent) -> Result<Option<Derivation>, Exceeded> {
        if let Some(hit) = self.memo.get(goal) {
            return Ok(hit.clone());
        }
        self.tick()?;
        let result = if balanced(goal) { self.expand(goal)? } else { None };
        self.memo.insert(goal.clone(), result.clone());
        Ok(result)
    }

    fn unary(&mut self, goal: &Sequent, rule: Rule, hole: Option<Hole>, premise: Sequent) -> Result<Option<Derivation>, Exceeded> {
        Ok(self
            .solve(&premise)?
            .map(|d| Derivation::node(goal.clone(), rule, hole, vec![d])))
    }

    fn binary(
        &mut self,
        goal: &Sequent,
        rule: Rule,
        hole: Option<Hole>,
        first: Sequent,
        second: Sequent,
    ) -> Result<Option<Derivation>, Exceeded> {
        if !balanced(&first) || !balanced(&second) {
            return Ok(None);
        }
        let Some(d1) = self.solve(&first)? else { return Ok(None) };
        let Some(d2) = self.solve(&second)? else { return Ok(None) };
        Ok(Some(Derivation::node(goal.clone(), rule, hole, vec![d1, d2])))
    }

    fn expand(&mut self, goal: &Sequent) -> Result<Option<Derivation>, Exceeded> {
        let gamma = &goal.antecedent;
        let c = &goal.succedent;

        if let ([Item::Formula(Formula::Var(a))], Formula::Var(b)) = (&gamma.items[..], c) {
            return Ok((a == b).then(|| Derivation::axiom(a)));
        }

        // invertible right rules
        match c {
            Formula::Under(a, b) => {
                let mut items = vec![formula_item(a)];
                items.extend(gamma.items.iter().cloned());
                let premise = Sequent::new(MetaFormula::new(items), (**b).clone());
                return self.unary(goal, Rule::UnderRight, None, premise);
            }
            Formula::Over(b, a) => {
                let mut items = gamma.items.clone();
                items.push(formula_item(a));
                let premise = Sequent::new(MetaFormula::new(items), (**b).clone());
                return self.unary(goal, Rule::OverRight, None, premise);
            }
            Formula::BoxInv(a) => {
                let premise = Sequent::new(MetaFormula::new(vec![Item::Bracket(gamma.clone())]), (**a).clone());
                return self.unary(goal, Rule::BoxRight, None, premise);
            }
            _ => {}
        }

        let occs = occurrences(gamma);

        // invertible left rules
        for (path, idx, f) in &occs {
            let replacement = match f {
                Formula::Prod(a, b) => (Rule::ProdLeft, vec![formula_item(a), formula_item(b)]),
                Formula::Diamond(a) => (Rule::DiamondLeft, vec![Item::Bracket(MetaFormula::from_formulas([(**a).clone()]))]),
                _ => continue,
            };
            let antecedent = gamma.splice(path, *idx, idx + 1, replacement.1).expect("occurrence path is valid");
            let hole = Hole::new(path.clone(), *idx, idx + 1);
            return self.unary(goal, replacement.0, Some(hole), Sequent::new(antecedent, c.clone()));
        }

        // non-invertible rules
        match c {
            Formula::Prod(a, b) => {
                for split in 0..=gamma.items.len() {
                    let first = Sequent::new(MetaFormula::new(gamma.items[..split].to_vec()), (**a).clone());
                    let second = Sequent::new(MetaFormula::new(gamma.items[split..].to_vec()), (**b).clone());
                    if let Some(d) = self.binary(goal, Rule::ProdRight, None, first, second)? {
                        return Ok(Some(d));
                    }
                }
            }
            Formula::Diamond(a) => {
                if let [Item::Bracket(pi)] = &gamma.items[..] {
                    let premise = Sequent::new(pi.clone(), (**a).clone());
                    if let Some(d) = self.unary(goal, Rule::DiamondRight, None, premise)? {
                        return Ok(Some(d));
                    }
                }
            }
            _ => {}
        }

        for (path, idx, a) in boxed_brackets(gamma) {
            let antecedent = gamma.splice(&path, idx, idx + 1, vec![formula_item(a)]).expect("bracket path is valid");
            let hole = Hole::new(path, idx, idx + 1);
            if let Some(d) = self.unary(goal, Rule::BoxLeft, Some(hole), Sequent::new(antecedent, c.clone()))? {
                return Ok(Some(d));
            }
        }

        for (path, idx, f) in &occs {
            let level = gamma.level(path).expect("occurrence path is valid");
            match f {
                Formula::Under(a, b) => {
                    for start in (0..=*idx).rev() {
                        let pi = MetaFormula::new(level[start..*idx].to_vec());
                        let major = gamma.splice(path, start, idx + 1, vec![formula_item(b)]).expect("valid range");
                        let hole = Hole::new(path.clone(), start, idx + 1);
                        let found = self.binary(
                            goal,
                            Rule::UnderLeft,
                            Some(hole),
                            Sequent::new(pi, (**a).clone()),
                            Sequent::new(major, c.clone()),
                        )?;
                        if found.is_some() {
                            return Ok(found);
                        }
                    }
                }
                Formula::Over(b, a) => {
                    for end in idx + 1..=level.len() {
                        let pi = MetaFormula::new(level[idx + 1..end].to_vec());
                        let major = gamma.splice(path, *idx, end, vec![formula_item(b)]).expect("valid range");
                        let hole = Hole::new(path.clone(), *idx, end);
                        let found = self.binary(
                            goal,
                            Rule::OverLeft,
                            Some(hole),
                            Sequent::new(pi, (**a).clone()),
                            Sequent::new(major, c.clone()),
                        )?;
                        if found.is_some() {
                            return Ok(found);
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(None)
    }
}

/// Outcome of comparing a decision procedure with the oracle.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AgreementReport {
    pub checked: usize,
    pub disagreements: Vec<Disagreement>,
    pub budget_exceeded: Vec<Sequent>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub sequent: Sequent,
    pub oracle: bool,
    pub decider: bool,
}

impl AgreementReport {
    pub fn is_clean(&self) -> bool {
        self.disagreements.is_empty() && self.budget_exceeded.is_empty()
    }
}

/// Runs the oracle and `decider` on every sequent and lists where they
/// differ. Sequents the oracle could not settle are listed separately.
pub fn count_derivability_agreement<'a, I, F>(seqs: I, mut decider: F) -> AgreementReport
where
    I: IntoIterator<Item = &'a Sequent>,
    F: FnMut(&Sequent) -> bool,
{
    let mut report = AgreementReport::default();
    for s in seqs {
        report.checked += 1;
        match prove(s, SearchBudget::for_goal(s)).derivable() {
            None => report.budget_exceeded.push(s.clone()),
            Some(oracle) => {
                let decided = decider(s);
                if decided != oracle {
                    report.disagreements.push(Disagreement { sequent: s.clone(), oracle, decider: decided });
                }
            }
        }
    }
    report
}
