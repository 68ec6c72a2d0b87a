//! Formulas, configurations and sequents of the Lambek calculus with
//! bracket modalities, together with their text format and the three
//! complexity measures (size, order, bracket depth).
//!
//! The concrete syntax is
//!
//! ```text
//! sequent  := config "=>" formula
//! config   := (item ("," item)*)?
//! item     := formula | "{" config "}"
//! formula  := product (("\" | "/") product)?
//! product  := unary ("*" unary)?
//! unary    := "<>" unary | "[]" unary | atom
//! atom     := ident | "(" formula ")"
//! ```
//!
//! Chains of binary operators must be parenthesized: `a\b/c` and `a*b*c`
//! are rejected rather than silently associated.

mod parse;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

pub use parse::{parse_formula, parse_sequent, ParseError};

/// A type of the calculus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(String),
    /// `A \ B`: the argument `A` is expected on the left.
    Under(Box<Formula>, Box<Formula>),
    /// `B / A`, stored as `Over(B, A)`: the argument `A` is expected on the right.
    Over(Box<Formula>, Box<Formula>),
    /// `A * B`
    Prod(Box<Formula>, Box<Formula>),
    /// `<>A`
    Diamond(Box<Formula>),
    /// `[]A`, the inverse box.
    BoxInv(Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    pub fn under(a: Formula, b: Formula) -> Formula {
        Formula::Under(Box::new(a), Box::new(b))
    }

    /// `b / a`
    pub fn over(b: Formula, a: Formula) -> Formula {
        Formula::Over(Box::new(b), Box::new(a))
    }

    pub fn prod(a: Formula, b: Formula) -> Formula {
        Formula::Prod(Box::new(a), Box::new(b))
    }

    pub fn diamond(a: Formula) -> Formula {
        Formula::Diamond(Box::new(a))
    }

    pub fn boxinv(a: Formula) -> Formula {
        Formula::BoxInv(Box::new(a))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Formula::Var(_))
    }

    /// Number of logical connectives (binary and unary) in the formula.
    pub fn connectives(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::Under(a, b) | Formula::Over(a, b) | Formula::Prod(a, b) => {
                1 + a.connectives() + b.connectives()
            }
            Formula::Diamond(a) | Formula::BoxInv(a) => 1 + a.connectives(),
        }
    }

    /// 1 for products and diamonds, 0 otherwise.
    pub fn prod_flag(&self) -> usize {
        matches!(self, Formula::Prod(..) | Formula::Diamond(_)) as usize
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::Under(a, b) | Formula::Over(a, b) | Formula::Prod(a, b) => {
                a.size() + b.size() + 1
            }
            Formula::Diamond(a) | Formula::BoxInv(a) => a.size() + 1,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::Prod(a, b) => a.order().max(b.order()),
            // a \ b and b / a share the recursion with `a` the argument
            Formula::Under(arg, res) | Formula::Over(res, arg) => {
                (arg.order() + 1).max(res.order() + res.prod_flag())
            }
            Formula::Diamond(a) => a.order(),
            Formula::BoxInv(a) => (a.order() + a.prod_flag()).max(1),
        }
    }

    pub fn bdepth(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::Under(a, b) | Formula::Over(a, b) | Formula::Prod(a, b) => {
                a.bdepth().max(b.bdepth())
            }
            Formula::Diamond(a) | Formula::BoxInv(a) => a.bdepth() + 1,
        }
    }

    /// Collects variable names, left to right.
    pub fn variables<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Formula::Var(name) => out.push(name),
            Formula::Under(a, b) | Formula::Over(a, b) | Formula::Prod(a, b) => {
                a.variables(out);
                b.variables(out);
            }
            Formula::Diamond(a) | Formula::BoxInv(a) => a.variables(out),
        }
    }
}

/// One element of a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Item {
    Formula(Formula),
    Bracket(MetaFormula),
}

/// A configuration: a comma-separated sequence of formulas and bracketed
/// sub-configurations. The empty sequence is the empty configuration.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MetaFormula {
    pub items: Vec<Item>,
}

impl MetaFormula {
    pub fn new(items: Vec<Item>) -> MetaFormula {
        MetaFormula { items }
    }

    pub fn empty() -> MetaFormula {
        MetaFormula::default()
    }

    pub fn from_formulas(formulas: impl IntoIterator<Item = Formula>) -> MetaFormula {
        MetaFormula::new(formulas.into_iter().map(Item::Formula).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// The item list reached by descending through the bracketed items
    /// named by `path`.
    pub fn level(&self, path: &[usize]) -> Option<&[Item]> {
        let mut items = &self.items[..];
        for &idx in path {
            match items.get(idx)? {
                Item::Bracket(inner) => items = &inner.items,
                Item::Formula(_) => return None,
            }
        }
        Some(items)
    }

    /// Replaces `items[start..end]` of the level at `path` by `replacement`.
    pub fn splice(
        &self,
        path: &[usize],
        start: usize,
        end: usize,
        replacement: Vec<Item>,
    ) -> Option<MetaFormula> {
        let mut out = self.clone();
        let mut items = &mut out.items;
        for &idx in path {
            match items.get_mut(idx)? {
                Item::Bracket(inner) => items = &mut inner.items,
                Item::Formula(_) => return None,
            }
        }
        if start > end || end > items.len() {
            return None;
        }
        items.splice(start..end, replacement);
        Some(out)
    }

    pub fn size(&self) -> usize {
        self.items
            .iter()
            .map(|item| match item {
                Item::Formula(f) => f.size(),
                Item::Bracket(inner) => inner.size() + 2,
            })
            .sum()
    }

    pub fn order(&self) -> usize {
        self.items
            .iter()
            .map(|item| match item {
                Item::Formula(f) => f.order(),
                Item::Bracket(inner) => inner.order(),
            })
            .max()
            .unwrap_or(0)
    }

    pub fn bdepth(&self) -> usize {
        self.items
            .iter()
            .map(|item| match item {
                Item::Formula(f) => f.bdepth(),
                Item::Bracket(inner) => inner.bdepth() + 1,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn connectives(&self) -> usize {
        self.items
            .iter()
            .map(|item| match item {
                Item::Formula(f) => f.connectives(),
                Item::Bracket(inner) => inner.connectives(),
            })
            .sum()
    }

    /// Number of meta-bracket pairs at any depth.
    pub fn bracket_count(&self) -> usize {
        self.items
            .iter()
            .map(|item| match item {
                Item::Formula(_) => 0,
                Item::Bracket(inner) => 1 + inner.bracket_count(),
            })
            .sum()
    }

    /// All formulas at any depth, left to right.
    pub fn formulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn walk<'a>(m: &'a MetaFormula, out: &mut Vec<&'a Formula>) {
            for item in &m.items {
                match item {
                    Item::Formula(f) => out.push(f),
                    Item::Bracket(inner) => walk(inner, out),
                }
            }
        }
        walk(self, &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    pub antecedent: MetaFormula,
    pub succedent: Formula,
}

/// Size, order and bracket nesting depth of a sequent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub size: usize,
    pub order: usize,
    pub bdepth: usize,
}

impl Sequent {
    pub fn new(antecedent: MetaFormula, succedent: Formula) -> Sequent {
        Sequent { antecedent, succedent }
    }

    pub fn metrics(&self) -> Metrics {
        let c = &self.succedent;
        Metrics {
            size: self.antecedent.size() + c.size(),
            order: (self.antecedent.order() + 1).max(c.order() + c.prod_flag()),
            bdepth: self.antecedent.bdepth().max(c.bdepth()),
        }
    }

    /// Logical connectives on both sides; meta-brackets are not counted.
    pub fn connectives(&self) -> usize {
        self.antecedent.connectives() + self.succedent.connectives()
    }
}

/// Free-function form of [`Sequent::metrics`].
pub fn metrics(s: &Sequent) -> Metrics {
    s.metrics()
}

/// Prints a sequent in canonical form. `parse_sequent(&print_sequent(s))`
/// returns `s` again.
pub fn print_sequent(s: &Sequent) -> String {
    s.to_string()
}

// Binding strength of the context a formula is printed in.
const SLASH: u8 = 0;
const PRODUCT: u8 = 1;
const UNARY: u8 = 2;

fn write_formula(f: &Formula, ctx: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::Var(name) => out.write_str(name),
        Formula::Diamond(a) => {
            out.write_str("<>")?;
            write_formula(a, UNARY, out)
        }
        Formula::BoxInv(a) => {
            out.write_str("[]")?;
            write_formula(a, UNARY, out)
        }
        Formula::Prod(a, b) => {
            let paren = ctx > PRODUCT;
            if paren {
                out.write_str("(")?;
            }
            write_formula(a, UNARY, out)?;
            out.write_str("*")?;
            write_formula(b, UNARY, out)?;
            if paren {
                out.write_str(")")?;
            }
            Ok(())
        }
        Formula::Under(a, b) | Formula::Over(a, b) => {
            let op = if matches!(f, Formula::Under(..)) { "\\" } else { "/" };
            let paren = ctx > SLASH;
            if paren {
                out.write_str("(")?;
            }
            write_formula(a, PRODUCT, out)?;
            out.write_str(op)?;
            write_formula(b, PRODUCT, out)?;
            if paren {
                out.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, SLASH, f)
    }
}

impl fmt::Display for MetaFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, item) in self.items.iter().enumerate() {
            if idx > 0 {
                f.write_str(", ")?;
            }
            match item {
                Item::Formula(formula) => write!(f, "{formula}")?,
                Item::Bracket(inner) if inner.is_empty() => f.write_str("{ }")?,
                Item::Bracket(inner) => write!(f, "{{ {inner} }}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.antecedent.is_empty() {
            write!(f, "=> {}", self.succedent)
        } else {
            write!(f, "{} => {}", self.antecedent, self.succedent)
        }
    }
}

impl FromStr for Sequent {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sequent(s)
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

impl Serialize for Sequent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(text: &str) -> Sequent {
        parse_sequent(text).unwrap()
    }

    #[test]
    fn smallest_sequent() {
        let s = seq("p => p");
        assert_eq!(s.antecedent, MetaFormula::from_formulas([Formula::var("p")]));
        assert_eq!(s.succedent, Formula::var("p"));
        assert_eq!(print_sequent(&s), "p => p");
    }

    #[test]
    fn bracketed_counter_example_parses() {
        let s = seq("{ []p }, { []q } => <>[](p*q)");
        let boxed = |v: &str| {
            Item::Bracket(MetaFormula::from_formulas([Formula::boxinv(Formula::var(v))]))
        };
        assert_eq!(s.antecedent, MetaFormula::new(vec![boxed("p"), boxed("q")]));
        assert_eq!(
            s.succedent,
            Formula::diamond(Formula::boxinv(Formula::prod(
                Formula::var("p"),
                Formula::var("q")
            )))
        );
        assert_eq!(s.succedent.to_string(), "<>[](p*q)");
    }

    #[test]
    fn three_formula_antecedent_round_trips() {
        let s = seq(r"N, (N\S)/S, N => S");
        assert_eq!(s.antecedent.items.len(), 3);
        assert_eq!(print_sequent(&s), r"N, (N\S)/S, N => S");
        assert_eq!(seq(&print_sequent(&s)), s);
    }

    #[test]
    fn canonical_printing_drops_redundant_parentheses() {
        let s = seq(r"(<>N)\S, ((a*b))/c => (p)");
        assert_eq!(print_sequent(&s), r"<>N\S, a*b/c => p");
        assert_eq!(print_sequent(&seq("=> p/p")), "=> p/p");
        assert_eq!(print_sequent(&seq("{ }, {{p}} => q")), "{ }, { { p } } => q");
    }

    #[test]
    fn metrics_of_axiom() {
        let m = seq("p => p").metrics();
        assert_eq!((m.size, m.order, m.bdepth), (0, 1, 0));
    }

    #[test]
    fn metrics_of_counter_example() {
        let m = seq("{ []p } , { []q } => <>[](p*q)").metrics();
        assert_eq!(m.size, 9);
        assert_eq!(m.bdepth, 2);
    }

    #[test]
    fn order_counts_division_nesting() {
        assert_eq!(seq("p/p, p => p").metrics().order, 2);
        // box over a product pays for the alternation
        assert_eq!(Formula::from_str("[](p*q)").unwrap().order(), 1);
        assert_eq!(Formula::from_str("[]p").unwrap().order(), 1);
        assert_eq!(Formula::from_str(r"p\(q*(r\s))").unwrap().order(), 2);
    }

    #[test]
    fn splice_replaces_inside_brackets() {
        let s = seq("a, { b, c*d }, e => f");
        let out = s
            .antecedent
            .splice(&[1], 1, 2, vec![Item::Formula(Formula::var("c")), Item::Formula(Formula::var("d"))])
            .unwrap();
        assert_eq!(out.to_string(), "a, { b, c, d }, e");
        assert!(s.antecedent.splice(&[0], 0, 0, vec![]).is_none());
        assert!(s.antecedent.level(&[1]).is_some());
    }
}
