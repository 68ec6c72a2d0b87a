use thiserror::Error;

use super::{Formula, Item, MetaFormula, Sequent};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at offset {pos}")]
    Lexical { pos: usize, ch: char },
    #[error("unbalanced {what} at offset {pos}")]
    Unbalanced { pos: usize, what: &'static str },
    #[error("missing succedent after `=>`")]
    EmptySuccedent,
    #[error("missing `=>`")]
    MissingArrow,
    #[error("operator chain at offset {pos} needs explicit parentheses")]
    Ambiguous { pos: usize },
    #[error("expected {expected} at offset {pos}, found {found}")]
    Unexpected {
        pos: usize,
        expected: &'static str,
        found: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Under,
    Over,
    Star,
    Diamond,
    Box,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Arrow,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("`{name}`"),
            Tok::Under => "`\\`".into(),
            Tok::Over => "`/`".into(),
            Tok::Star => "`*`".into(),
            Tok::Diamond => "`<>`".into(),
            Tok::Box => "`[]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Arrow => "`=>`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut idx = 0;
    while idx < bytes.len() {
        let (pos, ch) = bytes[idx];
        let next = bytes.get(idx + 1).map(|&(_, c)| c);
        let tok = match ch {
            c if c.is_whitespace() => {
                idx += 1;
                continue;
            }
            '\\' => Tok::Under,
            '/' => Tok::Over,
            '*' => Tok::Star,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '<' if next == Some('>') => {
                idx += 1;
                Tok::Diamond
            }
            '[' if next == Some(']') => {
                idx += 1;
                Tok::Box
            }
            '=' if next == Some('>') => {
                idx += 1;
                Tok::Arrow
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = pos;
                let mut end = idx;
                while let Some(&(_, c)) = bytes.get(end + 1) {
                    if c.is_alphanumeric() || c == '_' || c == '\'' {
                        end += 1;
                    } else {
                        break;
                    }
                }
                let stop = bytes.get(end + 1).map_or(text.len(), |&(p, _)| p);
                idx = end;
                Tok::Ident(text[start..stop].to_string())
            }
            c => return Err(ParseError::Lexical { pos, ch: c }),
        };
        out.push((pos, tok));
        idx += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |&(p, _)| p)
    }

    fn found(&self) -> String {
        self.peek().map_or_else(|| "end of input".into(), Tok::describe)
    }

    fn bump(&mut self) -> Option<Tok> {
        let tok = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        tok
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let left = self.product()?;
        let op = match self.peek() {
            Some(Tok::Under) => Tok::Under,
            Some(Tok::Over) => Tok::Over,
            _ => return Ok(left),
        };
        self.bump();
        let right = self.product()?;
        if matches!(self.peek(), Some(Tok::Under | Tok::Over)) {
            return Err(ParseError::Ambiguous { pos: self.pos() });
        }
        Ok(match op {
            Tok::Under => Formula::under(left, right),
            _ => Formula::over(left, right),
        })
    }

    fn product(&mut self) -> Result<Formula, ParseError> {
        let left = self.unary()?;
        if self.peek() != Some(&Tok::Star) {
            return Ok(left);
        }
        self.bump();
        let right = self.unary()?;
        if self.peek() == Some(&Tok::Star) {
            return Err(ParseError::Ambiguous { pos: self.pos() });
        }
        Ok(Formula::prod(left, right))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Diamond) => {
                self.bump();
                Ok(Formula::diamond(self.unary()?))
            }
            Some(Tok::Box) => {
                self.bump();
                Ok(Formula::boxinv(self.unary()?))
            }
            Some(Tok::Ident(_)) => match self.bump() {
                Some(Tok::Ident(name)) => Ok(Formula::Var(name)),
                _ => unreachable!(),
            },
            Some(Tok::LParen) => {
                let open = self.pos();
                self.bump();
                let inner = self.formula()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.bump();
                        Ok(inner)
                    }
                    None => Err(ParseError::Unbalanced { pos: open, what: "parenthesis" }),
                    Some(_) => Err(ParseError::Unexpected {
                        pos: self.pos(),
                        expected: "`)`",
                        found: self.found(),
                    }),
                }
            }
            Some(Tok::RParen) => Err(ParseError::Unbalanced { pos: self.pos(), what: "parenthesis" }),
            _ => Err(ParseError::Unexpected {
                pos: self.pos(),
                expected: "a formula",
                found: self.found(),
            }),
        }
    }

    /// Items up to (not including) `}` or `=>`.
    fn config(&mut self) -> Result<MetaFormula, ParseError> {
        let mut items = Vec::new();
        if matches!(self.peek(), Some(Tok::RBrace | Tok::Arrow)) {
            return Ok(MetaFormula::new(items));
        }
        loop {
            if self.peek() == Some(&Tok::LBrace) {
                let open = self.pos();
                self.bump();
                let inner = self.config()?;
                match self.peek() {
                    Some(Tok::RBrace) => {
                        self.bump();
                    }
                    _ => return Err(ParseError::Unbalanced { pos: open, what: "meta-bracket" }),
                }
                items.push(Item::Bracket(inner));
            } else {
                items.push(Item::Formula(self.formula()?));
            }
            match self.peek() {
                Some(Tok::Comma) => {
                    self.bump();
                }
                Some(Tok::RBrace | Tok::Arrow) | None => break,
                Some(_) => {
                    return Err(ParseError::Unexpected {
                        pos: self.pos(),
                        expected: "`,` or `=>`",
                        found: self.found(),
                    })
                }
            }
        }
        Ok(MetaFormula::new(items))
    }
}

/// Parses one sequent, e.g. `{ []p }, { []q } => <>[](p*q)`.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len() };
    let antecedent = p.config()?;
    match p.peek() {
        Some(Tok::Arrow) => {
            p.bump();
        }
        Some(Tok::RBrace) => {
            return Err(ParseError::Unbalanced { pos: p.pos(), what: "meta-bracket" })
        }
        _ => return Err(ParseError::MissingArrow),
    }
    if p.peek().is_none() {
        return Err(ParseError::EmptySuccedent);
    }
    let succedent = p.formula()?;
    if p.peek().is_some() {
        return Err(match p.peek() {
            Some(Tok::RParen) => ParseError::Unbalanced { pos: p.pos(), what: "parenthesis" },
            _ => ParseError::Unexpected {
                pos: p.pos(),
                expected: "end of input",
                found: p.found(),
            },
        });
    }
    Ok(Sequent { antecedent, succedent })
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len() };
    let f = p.formula()?;
    match p.peek() {
        None => Ok(f),
        Some(Tok::RParen) => Err(ParseError::Unbalanced { pos: p.pos(), what: "parenthesis" }),
        Some(_) => Err(ParseError::Unexpected {
            pos: p.pos(),
            expected: "end of input",
            found: p.found(),
        }),
    }
}
