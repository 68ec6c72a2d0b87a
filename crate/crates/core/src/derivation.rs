//! Sequent derivations and a checker for them.
//!
//! Rules that act inside a context `Δ(…)` carry a [`Hole`] locating the
//! affected items in the conclusion's antecedent: the bracket path to the
//! level, and the half-open item range the rule rewrites.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Formula, Item, MetaFormula, Sequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    Axiom,
    /// `\→`
    UnderLeft,
    /// `→\`
    UnderRight,
    /// `/→`
    OverLeft,
    /// `→/`
    OverRight,
    /// `·→`
    ProdLeft,
    /// `→·`
    ProdRight,
    /// `⟨⟩→`
    DiamondLeft,
    /// `→⟨⟩`
    DiamondRight,
    /// `[]⁻¹→`
    BoxLeft,
    /// `→[]⁻¹`
    BoxRight,
}

impl Rule {
    pub fn arity(self) -> usize {
        match self {
            Rule::Axiom => 0,
            Rule::UnderLeft | Rule::OverLeft | Rule::ProdRight => 2,
            _ => 1,
        }
    }

    /// Whether the rule rewrites the antecedent inside a context and so
    /// needs a hole descriptor.
    pub fn uses_hole(self) -> bool {
        matches!(
            self,
            Rule::UnderLeft | Rule::OverLeft | Rule::ProdLeft | Rule::DiamondLeft | Rule::BoxLeft
        )
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rule::Axiom => "ax",
            Rule::UnderLeft => "\\->",
            Rule::UnderRight => "->\\",
            Rule::OverLeft => "/->",
            Rule::OverRight => "->/",
            Rule::ProdLeft => "*->",
            Rule::ProdRight => "->*",
            Rule::DiamondLeft => "<>->",
            Rule::DiamondRight => "-><>",
            Rule::BoxLeft => "[]->",
            Rule::BoxRight => "->[]",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Location of `Δ(…)`'s argument: `items[start..end]` of the level reached
/// through `path`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Hole {
    pub path: Vec<usize>,
    pub start: usize,
    pub end: usize,
}

impl Hole {
    pub fn new(path: Vec<usize>, start: usize, end: usize) -> Hole {
        Hole { path, start, end }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub conclusion: Sequent,
    pub rule: Rule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hole: Option<Hole>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn axiom(name: &str) -> Derivation {
        let p = Formula::var(name);
        Derivation {
            conclusion: Sequent::new(MetaFormula::from_formulas([p.clone()]), p),
            rule: Rule::Axiom,
            hole: None,
            premises: Vec::new(),
        }
    }

    pub fn node(conclusion: Sequent, rule: Rule, hole: Option<Hole>, premises: Vec<Derivation>) -> Derivation {
        Derivation { conclusion, rule, hole, premises }
    }

    /// Number of non-axiom nodes.
    pub fn rule_count(&self) -> usize {
        let own = usize::from(self.rule != Rule::Axiom);
        own + self.premises.iter().map(Derivation::rule_count).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Derivation::height).max().unwrap_or(0)
    }

    /// Indented tree rendering, conclusion first.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        use std::fmt::Write;
        let _ = writeln!(out, "{:indent$}{}   [{}]", "", self.conclusion, self.rule, indent = 2 * depth);
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("rule {rule} expects {expected} premises, found {found}")]
    Arity { rule: Rule, expected: usize, found: usize },
    #[error("hole {hole:?} does not locate a range in {conclusion}")]
    MalformedHole { hole: Hole, conclusion: String },
    #[error("rule {rule} is missing its hole descriptor")]
    MissingHole { rule: Rule },
    #[error("{rule} does not match at {conclusion}: {reason}")]
    Mismatch { rule: Rule, conclusion: String, reason: &'static str },
}

/// Checks every node of `d` against its rule schema.
pub fn check_derivation(d: &Derivation) -> Result<(), CheckError> {
    if d.premises.len() != d.rule.arity() {
        return Err(CheckError::Arity {
            rule: d.rule,
            expected: d.rule.arity(),
            found: d.premises.len(),
        });
    }
    check_node(d)?;
    d.premises.iter().try_for_each(check_derivation)
}

/// `check_derivation(d).is_ok()`
pub fn is_valid(d: &Derivation) -> bool {
    check_derivation(d).is_ok()
}

fn check_node(d: &Derivation) -> Result<(), CheckError> {
    let concl = &d.conclusion;
    let gamma = &concl.antecedent;
    let c = &concl.succedent;
    let mismatch = |reason: &'static str| CheckError::Mismatch {
        rule: d.rule,
        conclusion: concl.to_string(),
        reason,
    };
    let prem = |i: usize| &d.premises[i].conclusion;

    if d.rule.uses_hole() {
        let hole = d.hole.as_ref().ok_or(CheckError::MissingHole { rule: d.rule })?;
        let level = gamma.level(&hole.path).filter(|items| hole.start < hole.end && hole.end <= items.len());
        let Some(level) = level else {
            return Err(CheckError::MalformedHole { hole: hole.clone(), conclusion: concl.to_string() });
        };
        let region = &level[hole.start..hole.end];
        let context_with = |replacement: Vec<Item>| {
            gamma.splice(&hole.path, hole.start, hole.end, replacement).expect("hole validated above")
        };
        let single_formula = || match region {
            [Item::Formula(f)] => Some(f),
            _ => None,
        };
        match d.rule {
            Rule::ProdLeft => {
                let Some(Formula::Prod(a, b)) = single_formula() else {
                    return Err(mismatch("hole must hold a single product"));
                };
                let expect = Sequent::new(
                    context_with(vec![Item::Formula((**a).clone()), Item::Formula((**b).clone())]),
                    c.clone(),
                );
                if prem(0) != &expect {
                    return Err(mismatch("premise is not Γ(A, B) → C"));
                }
            }
            Rule::DiamondLeft => {
                let Some(Formula::Diamond(a)) = single_formula() else {
                    return Err(mismatch("hole must hold a single diamond formula"));
                };
                let inner = MetaFormula::from_formulas([(**a).clone()]);
                let expect = Sequent::new(context_with(vec![Item::Bracket(inner)]), c.clone());
                if prem(0) != &expect {
                    return Err(mismatch("premise is not Δ([A]) → C"));
                }
            }
            Rule::BoxLeft => {
                let a = match region {
                    [Item::Bracket(inner)] => match &inner.items[..] {
                        [Item::Formula(Formula::BoxInv(a))] => a,
                        _ => return Err(mismatch("bracket must hold exactly one boxed formula")),
                    },
                    _ => return Err(mismatch("hole must hold a single bracket")),
                };
                let expect = Sequent::new(context_with(vec![Item::Formula((**a).clone())]), c.clone());
                if prem(0) != &expect {
                    return Err(mismatch("premise is not Δ(A) → C"));
                }
            }
            Rule::UnderLeft => {
                let (pi, last) = region.split_at(region.len() - 1);
                let Item::Formula(Formula::Under(a, b)) = &last[0] else {
                    return Err(mismatch("last item of the hole must be A\\B"));
                };
                let minor = Sequent::new(MetaFormula::new(pi.to_vec()), (**a).clone());
                let major = Sequent::new(context_with(vec![Item::Formula((**b).clone())]), c.clone());
                if prem(0) != &minor {
                    return Err(mismatch("first premise is not Π → A"));
                }
                if prem(1) != &major {
                    return Err(mismatch("second premise is not Δ(B) → C"));
                }
            }
            Rule::OverLeft => {
                let (first, pi) = region.split_at(1);
                let Item::Formula(Formula::Over(b, a)) = &first[0] else {
                    return Err(mismatch("first item of the hole must be B/A"));
                };
                let minor = Sequent::new(MetaFormula::new(pi.to_vec()), (**a).clone());
                let major = Sequent::new(context_with(vec![Item::Formula((**b).clone())]), c.clone());
                if prem(0) != &minor {
                    return Err(mismatch("first premise is not Π → A"));
                }
                if prem(1) != &major {
                    return Err(mismatch("second premise is not Δ(B) → C"));
                }
            }
            _ => unreachable!(),
        }
        return Ok(());
    }

    if d.hole.is_some() {
        return Err(mismatch("rule takes no hole descriptor"));
    }
    match d.rule {
        Rule::Axiom => match (&gamma.items[..], c) {
            ([Item::Formula(Formula::Var(a))], Formula::Var(b)) if a == b => Ok(()),
            _ => Err(mismatch("axioms are p → p for a variable p")),
        },
        Rule::UnderRight => {
            let Formula::Under(a, b) = c else {
                return Err(mismatch("succedent must be A\\B"));
            };
            let mut items = vec![Item::Formula((**a).clone())];
            items.extend(gamma.items.iter().cloned());
            if prem(0) != &Sequent::new(MetaFormula::new(items), (**b).clone()) {
                return Err(mismatch("premise is not A, Π → B"));
            }
            Ok(())
        }
        Rule::OverRight => {
            let Formula::Over(b, a) = c else {
                return Err(mismatch("succedent must be B/A"));
            };
            let mut items = gamma.items.clone();
            items.push(Item::Formula((**a).clone()));
            if prem(0) != &Sequent::new(MetaFormula::new(items), (**b).clone()) {
                return Err(mismatch("premise is not Π, A → B"));
            }
            Ok(())
        }
        Rule::ProdRight => {
            let Formula::Prod(a, b) = c else {
                return Err(mismatch("succedent must be A*B"));
            };
            let (left, right) = (prem(0), prem(1));
            if &left.succedent != a.as_ref() || &right.succedent != b.as_ref() {
                return Err(mismatch("premise succedents are not A and B"));
            }
            let mut joined = left.antecedent.items.clone();
            joined.extend(right.antecedent.items.iter().cloned());
            if joined != gamma.items {
                return Err(mismatch("premise antecedents do not concatenate to Γ, Δ"));
            }
            Ok(())
        }
        Rule::DiamondRight => {
            let Formula::Diamond(a) = c else {
                return Err(mismatch("succedent must be <>A"));
            };
            let [Item::Bracket(pi)] = &gamma.items[..] else {
                return Err(mismatch("antecedent must be a single bracket [Π]"));
            };
            if prem(0) != &Sequent::new(pi.clone(), (**a).clone()) {
                return Err(mismatch("premise is not Π → A"));
            }
            Ok(())
        }
        Rule::BoxRight => {
            let Formula::BoxInv(a) = c else {
                return Err(mismatch("succedent must be []A"));
            };
            let bracketed = MetaFormula::new(vec![Item::Bracket(gamma.clone())]);
            if prem(0) != &Sequent::new(bracketed, (**a).clone()) {
                return Err(mismatch("premise is not [Π] → A"));
            }
            Ok(())
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_sequent;

    fn seq(t: &str) -> Sequent {
        parse_sequent(t).unwrap()
    }

    #[test]
    fn axiom_on_variable() {
        assert!(is_valid(&Derivation::axiom("p")));
    }

    #[test]
    fn axiom_on_compound_is_rejected() {
        let d = Derivation::node(seq("p*q => p*q"), Rule::Axiom, None, vec![]);
        assert!(matches!(check_derivation(&d), Err(CheckError::Mismatch { .. })));
    }

    #[test]
    fn diamond_right_over_axiom() {
        let d = Derivation::node(seq("{p} => <>p"), Rule::DiamondRight, None, vec![Derivation::axiom("p")]);
        assert_eq!(check_derivation(&d), Ok(()));
    }

    #[test]
    fn malformed_hole_is_distinct_from_mismatch() {
        let d = Derivation::node(
            seq("p*q => p*q"),
            Rule::ProdLeft,
            Some(Hole::new(vec![3], 0, 1)),
            vec![Derivation::axiom("p")],
        );
        assert!(matches!(check_derivation(&d), Err(CheckError::MalformedHole { .. })));
        let d = Derivation::node(
            seq("p*q => p*q"),
            Rule::ProdLeft,
            Some(Hole::new(vec![], 0, 0)),
            vec![Derivation::axiom("p")],
        );
        assert!(matches!(check_derivation(&d), Err(CheckError::MalformedHole { .. })));
    }

    #[test]
    fn product_identity() {
        // p, q => p*q ; then p*q => p*q
        let right = Derivation::node(
            seq("p, q => p*q"),
            Rule::ProdRight,
            None,
            vec![Derivation::axiom("p"), Derivation::axiom("q")],
        );
        let d = Derivation::node(seq("p*q => p*q"), Rule::ProdLeft, Some(Hole::new(vec![], 0, 1)), vec![right]);
        assert_eq!(check_derivation(&d), Ok(()));
        assert_eq!(d.rule_count(), d.conclusion.connectives());
    }

    #[test]
    fn application_inside_bracket() {
        // { a, a\b } => <>b
        let inner = Derivation::node(
            seq(r"a, a\b => b"),
            Rule::UnderLeft,
            Some(Hole::new(vec![], 0, 2)),
            vec![Derivation::axiom("a"), Derivation::axiom("b")],
        );
        let d = Derivation::node(seq(r"{ a, a\b } => <>b"), Rule::DiamondRight, None, vec![inner]);
        assert_eq!(check_derivation(&d), Ok(()));

        // wrong split: hole covers only a\b, so Π is empty
        let bad = Derivation::node(
            seq(r"a, a\b => b"),
            Rule::UnderLeft,
            Some(Hole::new(vec![], 1, 2)),
            vec![Derivation::axiom("a"), Derivation::axiom("b")],
        );
        assert!(matches!(check_derivation(&bad), Err(CheckError::Mismatch { .. })));
    }

    #[test]
    fn box_rules() {
        // []p => []p : from { []p } => p, from p => p
        let left = Derivation::node(seq("{ []p } => p"), Rule::BoxLeft, Some(Hole::new(vec![], 0, 1)), vec![Derivation::axiom("p")]);
        let d = Derivation::node(seq("[]p => []p"), Rule::BoxRight, None, vec![left]);
        assert_eq!(check_derivation(&d), Ok(()));
        let wrong_arity = Derivation::node(seq("[]p => []p"), Rule::BoxRight, None, vec![]);
        assert!(matches!(check_derivation(&wrong_arity), Err(CheckError::Arity { .. })));
    }
}
