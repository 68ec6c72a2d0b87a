//! Translation of a sequent into an alternating string of connectives and
//! literals, with its dominance forest and sisterhood relations.
//!
//! Indices are 0-based: connective `i` sits immediately before literal `i`,
//! so the token order is `c0 l0 c1 l1 … c(n-1) l(n-1)`.

use std::fmt::{self, Write};
use std::ops::Range;

use serde::Serialize;

use crate::syntax::{Formula, Item, MetaFormula, Sequent};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    Pos(String),
    Neg(String),
    /// `[`
    Open,
    /// `]`
    Close,
    /// `[̄`
    NegOpen,
    /// `]̄`
    NegClose,
}

impl Literal {
    pub fn dual(&self) -> Literal {
        match self {
            Literal::Pos(name) => Literal::Neg(name.clone()),
            Literal::Neg(name) => Literal::Pos(name.clone()),
            Literal::Open => Literal::NegOpen,
            Literal::NegOpen => Literal::Open,
            Literal::Close => Literal::NegClose,
            Literal::NegClose => Literal::Close,
        }
    }

    pub fn is_dual_of(&self, other: &Literal) -> bool {
        match (self, other) {
            (Literal::Pos(a), Literal::Neg(b)) | (Literal::Neg(a), Literal::Pos(b)) => a == b,
            (Literal::Open, Literal::NegOpen)
            | (Literal::NegOpen, Literal::Open)
            | (Literal::Close, Literal::NegClose)
            | (Literal::NegClose, Literal::Close) => true,
            _ => false,
        }
    }

    pub fn is_bracket(&self) -> bool {
        !matches!(self, Literal::Pos(_) | Literal::Neg(_))
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Literal::Neg(_) | Literal::NegOpen | Literal::NegClose)
    }

    /// ASCII spelling used in dumps: `p`, `~p`, `[`, `]`, `~[`, `~]`.
    pub fn ascii(&self) -> String {
        match self {
            Literal::Pos(name) => name.clone(),
            Literal::Neg(name) => format!("~{name}"),
            Literal::Open => "[".into(),
            Literal::Close => "]".into(),
            Literal::NegOpen => "~[".into(),
            Literal::NegClose => "~]".into(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Pos(name) => f.write_str(name),
            Literal::Neg(name) => write!(f, "{name}\u{0304}"),
            Literal::Open => f.write_str("["),
            Literal::Close => f.write_str("]"),
            Literal::NegOpen => f.write_str("[\u{0304}"),
            Literal::NegClose => f.write_str("]\u{0304}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Conn {
    Par,
    Tensor,
    /// The sequent-level par introduced by commas and meta-brackets.
    Meta,
}

impl Conn {
    /// ⅋ or ⋄
    pub fn is_par_like(self) -> bool {
        !matches!(self, Conn::Tensor)
    }

    pub fn ascii(self) -> &'static str {
        match self {
            Conn::Par => "par",
            Conn::Tensor => "tensor",
            Conn::Meta => "meta",
        }
    }
}

impl fmt::Display for Conn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conn::Par => "⅋",
            Conn::Tensor => "⊗",
            Conn::Meta => "⋄",
        })
    }
}

/// Where a formula occurrence sits in the sequent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    Antecedent { path: Vec<usize>, index: usize },
    Succedent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaSpan {
    pub location: Location,
    /// Literal indices covered by the formula's translation.
    pub lits: Range<usize>,
    /// Connective indices strictly inside the translation.
    pub conns: Range<usize>,
    /// Principal connective, `None` for a variable.
    pub root: Option<usize>,
}

/// Provenance of a connective occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// A `⋄` at the boundary before item `gap` of the level at `path`
    /// (gap `m` is the right end of an `m`-item level).
    Meta { path: Vec<usize>, gap: usize },
    /// A `⅋`/`⊗` inside formula span `span`.
    Formula { span: usize },
}

/// The translated string with its relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaString {
    pub conns: Vec<Conn>,
    pub lits: Vec<Literal>,
    /// Immediate dominator of each connective; `⋄` and formula roots have none.
    pub parent: Vec<Option<usize>>,
    pub sister_lit: Vec<Option<usize>>,
    pub sister_conn: Vec<Option<usize>>,
    pub origin: Vec<Origin>,
    pub spans: Vec<FormulaSpan>,
    /// Operand subtrees of each `⅋`/`⊗`, for the alternation-depth recursion.
    children: Vec<Option<(Node, Node)>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Node {
    Lit(usize),
    Conn(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaParams {
    /// Number of literals.
    pub n: usize,
    /// Connective alternation depth.
    pub d: usize,
    /// Maximal nesting of sister bracket pairs.
    pub b: usize,
}

#[derive(Default)]
struct Builder {
    conns: Vec<Conn>,
    lits: Vec<Literal>,
    parent: Vec<Option<usize>>,
    sister_lit: Vec<Option<usize>>,
    sister_conn: Vec<Option<usize>>,
    origin: Vec<Origin>,
    spans: Vec<FormulaSpan>,
    children: Vec<Option<(Node, Node)>>,
    current_span: usize,
}

impl Builder {
    fn conn(&mut self, c: Conn, origin: Origin) -> usize {
        debug_assert_eq!(self.conns.len(), self.lits.len(), "connectives and literals alternate");
        self.conns.push(c);
        self.parent.push(None);
        self.sister_conn.push(None);
        self.origin.push(origin);
        self.children.push(None);
        self.conns.len() - 1
    }

    fn lit(&mut self, l: Literal) -> Node {
        debug_assert_eq!(self.conns.len(), self.lits.len() + 1, "connectives and literals alternate");
        self.lits.push(l);
        self.sister_lit.push(None);
        Node::Lit(self.lits.len() - 1)
    }

    fn formula_conn(&mut self, c: Conn) -> usize {
        let span = self.current_span;
        self.conn(c, Origin::Formula { span })
    }

    fn link(&mut self, parent: usize, left: Node, right: Node) {
        for child in [left, right] {
            if let Node::Conn(k) = child {
                self.parent[k] = Some(parent);
            }
        }
        self.children[parent] = Some((left, right));
    }

    fn binary(&mut self, c: Conn, left: impl FnOnce(&mut Self) -> Node, right: impl FnOnce(&mut Self) -> Node) -> Node {
        let l = left(self);
        let k = self.formula_conn(c);
        let r = right(self);
        self.link(k, l, r);
        Node::Conn(k)
    }

    /// `x c1 (body c2 y)`, two right-associated tensors.
    fn tensor_triple(&mut self, first: Literal, body: impl FnOnce(&mut Self) -> Node, last: Literal) -> Node {
        let x = self.lit(first);
        let outer = self.formula_conn(Conn::Tensor);
        let a = body(self);
        let inner = self.formula_conn(Conn::Tensor);
        let y = self.lit(last);
        self.link(inner, a, y);
        self.link(outer, x, Node::Conn(inner));
        self.sisters(x, y, outer, inner);
        Node::Conn(outer)
    }

    /// `(x c1 body) c2 y`, two left-associated pars.
    fn par_triple(&mut self, first: Literal, body: impl FnOnce(&mut Self) -> Node, last: Literal) -> Node {
        let x = self.lit(first);
        let inner = self.formula_conn(Conn::Par);
        let a = body(self);
        self.link(inner, x, a);
        let outer = self.formula_conn(Conn::Par);
        let y = self.lit(last);
        self.link(outer, Node::Conn(inner), y);
        self.sisters(x, y, outer, inner);
        Node::Conn(outer)
    }

    fn sisters(&mut self, x: Node, y: Node, c1: usize, c2: usize) {
        self.sister_lits(x, y);
        self.sister_conn[c1] = Some(c2);
        self.sister_conn[c2] = Some(c1);
    }

    fn sister_lits(&mut self, x: Node, y: Node) {
        if let (Node::Lit(a), Node::Lit(b)) = (x, y) {
            self.sister_lit[a] = Some(b);
            self.sister_lit[b] = Some(a);
        }
    }

    fn positive(&mut self, f: &Formula) -> Node {
        match f {
            Formula::Var(name) => self.lit(Literal::Pos(name.clone())),
            Formula::Prod(a, b) => self.binary(Conn::Tensor, |s| s.positive(a), |s| s.positive(b)),
            Formula::Under(a, b) => self.binary(Conn::Par, |s| s.negative(a), |s| s.positive(b)),
            Formula::Over(b, a) => self.binary(Conn::Par, |s| s.positive(b), |s| s.negative(a)),
            Formula::Diamond(a) => self.tensor_triple(Literal::Close, |s| s.positive(a), Literal::Open),
            Formula::BoxInv(a) => self.par_triple(Literal::NegClose, |s| s.positive(a), Literal::NegOpen),
        }
    }

    fn negative(&mut self, f: &Formula) -> Node {
        match f {
            Formula::Var(name) => self.lit(Literal::Neg(name.clone())),
            Formula::Prod(a, b) => self.binary(Conn::Par, |s| s.negative(b), |s| s.negative(a)),
            Formula::Under(a, b) => self.binary(Conn::Tensor, |s| s.negative(b), |s| s.positive(a)),
            Formula::Over(b, a) => self.binary(Conn::Tensor, |s| s.positive(a), |s| s.negative(b)),
            Formula::Diamond(a) => self.par_triple(Literal::NegOpen, |s| s.negative(a), Literal::NegClose),
            Formula::BoxInv(a) => self.tensor_triple(Literal::Open, |s| s.negative(a), Literal::Close),
        }
    }

    fn span(&mut self, location: Location, f: &Formula, positive: bool) {
        let id = self.spans.len();
        self.current_span = id;
        let first_lit = self.lits.len();
        let first_conn = self.conns.len();
        let root = if positive { self.positive(f) } else { self.negative(f) };
        self.spans.push(FormulaSpan {
            location,
            lits: first_lit..self.lits.len(),
            conns: first_conn..self.conns.len(),
            root: match root {
                Node::Conn(k) => Some(k),
                Node::Lit(_) => None,
            },
        });
    }

    /// `⋄ X(m-1) ⋄ … ⋄ X0 ⋄`, items in reverse order; returns the outer `⋄`s.
    fn config(&mut self, m: &MetaFormula, path: &mut Vec<usize>) -> (usize, usize) {
        let len = m.items.len();
        let first = self.conn(Conn::Meta, Origin::Meta { path: path.clone(), gap: len });
        let mut last = first;
        for idx in (0..len).rev() {
            match &m.items[idx] {
                Item::Formula(f) => {
                    let location = Location::Antecedent { path: path.clone(), index: idx };
                    self.span(location, f, false);
                }
                Item::Bracket(inner) => {
                    let open = self.lit(Literal::NegOpen);
                    path.push(idx);
                    let (c1, c2) = self.config(inner, path);
                    path.pop();
                    let close = self.lit(Literal::NegClose);
                    if c1 != c2 {
                        self.sisters(open, close, c1, c2);
                    } else {
                        self.sister_lits(open, close);
                    }
                }
            }
            last = self.conn(Conn::Meta, Origin::Meta { path: path.clone(), gap: idx });
        }
        (first, last)
    }
}

/// Translates `Γ → C` into `⋄ Γ⁻ ⋄ C⁺` (or `⋄ C⁺` when `Γ` is empty).
pub fn translate(s: &Sequent) -> OmegaString {
    let mut b = Builder::default();
    b.config(&s.antecedent, &mut Vec::new());
    b.span(Location::Succedent, &s.succedent, true);
    OmegaString {
        conns: b.conns,
        lits: b.lits,
        parent: b.parent,
        sister_lit: b.sister_lit,
        sister_conn: b.sister_conn,
        origin: b.origin,
        spans: b.spans,
        children: b.children,
    }
}

impl OmegaString {
    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    /// Whether `lower ≺ upper` (strict, transitive).
    pub fn dominates(&self, upper: usize, lower: usize) -> bool {
        let mut at = self.parent[lower];
        while let Some(k) = at {
            if k == upper {
                return true;
            }
            at = self.parent[k];
        }
        false
    }

    /// All pairs `(lower, upper)` with `lower ≺ upper`.
    pub fn dominance(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for lower in 0..self.conns.len() {
            let mut at = self.parent[lower];
            while let Some(k) = at {
                out.push((lower, k));
                at = self.parent[k];
            }
        }
        out
    }

    /// `#negative literals − #(⅋ and ⋄)` over the given index ranges.
    pub fn natural(&self, lits: Range<usize>, conns: Range<usize>) -> i64 {
        let negatives = self.lits[lits].iter().filter(|l| l.is_negative()).count() as i64;
        let pars = self.conns[conns].iter().filter(|c| c.is_par_like()).count() as i64;
        negatives - pars
    }

    /// `natural` of the whole string.
    pub fn natural_total(&self) -> i64 {
        self.natural(0..self.lits.len(), 0..self.conns.len())
    }

    /// `natural` of one formula's translation.
    pub fn natural_of_span(&self, span: usize) -> i64 {
        let s = &self.spans[span];
        self.natural(s.lits.clone(), s.conns.clone())
    }

    fn depth_of(&self, node: Node) -> (usize, usize) {
        // (d, prod)
        match node {
            Node::Lit(_) => (0, 0),
            Node::Conn(k) => {
                let (l, r) = self.children[k].expect("formula connectives have operands");
                let (dl, pl) = self.depth_of(l);
                let (dr, pr) = self.depth_of(r);
                match self.conns[k] {
                    Conn::Tensor => (dl.max(dr), 1),
                    _ => ((dl + pl).max(dr + pr), 0),
                }
            }
        }
    }

    /// Connective alternation depth of the whole string.
    pub fn alternation_depth(&self) -> usize {
        // ⋄ levels contribute max(d + prod) over their operands
        self.spans
            .iter()
            .map(|s| match s.root {
                None => 0,
                Some(k) => {
                    let (d, p) = self.depth_of(Node::Conn(k));
                    d + p
                }
            })
            .max()
            .unwrap_or(0)
    }

    /// Maximal nesting depth of sister bracket pairs.
    pub fn bracket_depth(&self) -> usize {
        let pairs: Vec<(usize, usize)> = self
            .sister_lit
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.filter(|&j| j > i).map(|j| (i, j)))
            .collect();
        pairs
            .iter()
            .map(|&(a, b)| pairs.iter().filter(|&&(x, y)| x <= a && b <= y).count())
            .max()
            .unwrap_or(0)
    }

    pub fn params(&self) -> OmegaParams {
        OmegaParams {
            n: self.len(),
            d: self.alternation_depth(),
            b: self.bracket_depth(),
        }
    }

    /// One token per line, `idx kind payload`; indices are 1-based.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            let _ = write!(out, "{} conn {}", i + 1, self.conns[i].ascii());
            if let Some(p) = self.parent[i] {
                let _ = write!(out, " dom={}", p + 1);
            }
            if let Some(s) = self.sister_conn[i] {
                let _ = write!(out, " sister={}", s + 1);
            }
            out.push('\n');
            let _ = write!(out, "{} lit {}", i + 1, self.lits[i].ascii());
            if let Some(s) = self.sister_lit[i] {
                let _ = write!(out, " sister={}", s + 1);
            }
            out.push('\n');
        }
        out
    }
}

/// Free-function form of [`OmegaString::params`].
pub fn params(w: &OmegaString) -> OmegaParams {
    w.params()
}

impl fmt::Display for OmegaString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{} {}", self.conns[i], self.lits[i])?;
        }
        Ok(())
    }
}
