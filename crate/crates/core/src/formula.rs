//! Modal formulas over indexed propositional variables, with a text
//! grammar, a pretty printer and substitution application.
//!
//! Grammar tokens: `p<digits>` (index >= 1), `_|_` (falsum), `~`, `&`,
//! `|`, `->`, `<->`, `[]`, `<>` and parentheses. Binding strength,
//! tightest first: unary (`~`, `[]`, `<>`), `&`, `|`, `->`, `<->`.
//! `&` and `|` associate to the left, `->` and `<->` to the right.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A modal formula. `Dia` is a first-class constructor even though S4
/// defines `<>A` as `~[]~A`; the prover normalizes internally, surface
/// syntax and printing keep the diamond.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bot,
    Var(u32),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Dia(Box<Formula>),
}

/// Finite map from variable indices to replacement formulas; indices
/// outside the map are left unchanged.
pub type Substitution = BTreeMap<u32, Formula>;

impl Formula {
    pub fn var(i: u32) -> Self {
        debug_assert!(i >= 1, "variable indices start at 1");
        Formula::Var(i)
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn boxed(f: Formula) -> Self {
        Formula::Box(Box::new(f))
    }

    pub fn dia(f: Formula) -> Self {
        Formula::Dia(Box::new(f))
    }

    /// Verum, as sugar for `~_|_`.
    pub fn top() -> Self {
        Formula::not(Formula::Bot)
    }

    /// Conjunction of a sequence, left associated; empty input gives verum.
    pub fn conj<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::top(),
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Disjunction of a sequence, left associated; empty input gives falsum.
    pub fn disj<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::Bot,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    /// All variable indices occurring in the formula.
    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        match self {
            Formula::Bot => {}
            Formula::Var(i) => {
                out.insert(*i);
            }
            Formula::Not(a) | Formula::Box(a) | Formula::Dia(a) => a.collect_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Largest variable index occurring, or 0 for a variable-free formula.
    pub fn max_var(&self) -> u32 {
        self.vars().into_iter().next_back().unwrap_or(0)
    }

    /// Apply a substitution homomorphically over all connectives.
    pub fn apply(&self, sigma: &Substitution) -> Formula {
        match self {
            Formula::Bot => Formula::Bot,
            Formula::Var(i) => sigma.get(i).cloned().unwrap_or(Formula::Var(*i)),
            Formula::Not(a) => Formula::not(a.apply(sigma)),
            Formula::And(a, b) => Formula::and(a.apply(sigma), b.apply(sigma)),
            Formula::Or(a, b) => Formula::or(a.apply(sigma), b.apply(sigma)),
            Formula::Imp(a, b) => Formula::imp(a.apply(sigma), b.apply(sigma)),
            Formula::Iff(a, b) => Formula::iff(a.apply(sigma), b.apply(sigma)),
            Formula::Box(a) => Formula::boxed(a.apply(sigma)),
            Formula::Dia(a) => Formula::dia(a.apply(sigma)),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Imp(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(..) | Formula::Box(..) | Formula::Dia(..) => 5,
            Formula::Bot | Formula::Var(..) => 6,
        }
    }
}

/// Free-function form of [`Formula::apply`].
pub fn apply_substitution(sigma: &Substitution, f: &Formula) -> Formula {
    f.apply(sigma)
}

/// Parse a formula from the text grammar.
pub fn parse(text: &str) -> Result<Formula, Error> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.parse_iff()?;
    match p.peek() {
        None => Ok(f),
        Some((_, at)) => Err(Error::Parse {
            pos: *at,
            msg: "unexpected trailing input".into(),
        }),
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Var(u32),
    Bot,
    Not,
    And,
    Or,
    Imp,
    Iff,
    BoxOp,
    DiaOp,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, Error> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let at = i;
        match bytes[i] {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'(' => {
                toks.push((Tok::LParen, at));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, at));
                i += 1;
            }
            b'~' => {
                toks.push((Tok::Not, at));
                i += 1;
            }
            b'&' => {
                toks.push((Tok::And, at));
                i += 1;
            }
            b'|' => {
                toks.push((Tok::Or, at));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Imp, at));
                    i += 2;
                } else {
                    return Err(Error::Parse {
                        pos: at,
                        msg: "expected '->'".into(),
                    });
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((Tok::Iff, at));
                    i += 3;
                } else if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::DiaOp, at));
                    i += 2;
                } else {
                    return Err(Error::Parse {
                        pos: at,
                        msg: "expected '<>' or '<->'".into(),
                    });
                }
            }
            b'[' => {
                if bytes.get(i + 1) == Some(&b']') {
                    toks.push((Tok::BoxOp, at));
                    i += 2;
                } else {
                    return Err(Error::Parse {
                        pos: at,
                        msg: "expected '[]'".into(),
                    });
                }
            }
            b'_' => {
                if bytes.get(i + 1) == Some(&b'|') && bytes.get(i + 2) == Some(&b'_') {
                    toks.push((Tok::Bot, at));
                    i += 3;
                } else {
                    return Err(Error::Parse {
                        pos: at,
                        msg: "expected '_|_'".into(),
                    });
                }
            }
            b'p' => {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j == start {
                    return Err(Error::Parse {
                        pos: at,
                        msg: "expected digits after 'p'".into(),
                    });
                }
                let idx: u32 = text[start..j].parse().map_err(|_| Error::Parse {
                    pos: at,
                    msg: "variable index out of range".into(),
                })?;
                if idx == 0 {
                    return Err(Error::Parse {
                        pos: at,
                        msg: "variable index 0 is not allowed".into(),
                    });
                }
                toks.push((Tok::Var(idx), at));
                i = j;
            }
            c => {
                return Err(Error::Parse {
                    pos: at,
                    msg: format!("unexpected character '{}'", c as char),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, t: Tok) -> bool {
        if self.peek().map(|(tok, _)| *tok) == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn here(&self) -> usize {
        self.peek().map(|&(_, at)| at).unwrap_or(self.end)
    }

    fn parse_iff(&mut self) -> Result<Formula, Error> {
        let lhs = self.parse_imp()?;
        if self.eat(Tok::Iff) {
            let rhs = self.parse_iff()?;
            Ok(Formula::iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_imp(&mut self) -> Result<Formula, Error> {
        let lhs = self.parse_or()?;
        if self.eat(Tok::Imp) {
            let rhs = self.parse_imp()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Formula, Error> {
        let mut lhs = self.parse_and()?;
        while self.eat(Tok::Or) {
            let rhs = self.parse_and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Formula, Error> {
        let mut lhs = self.parse_unary()?;
        while self.eat(Tok::And) {
            let rhs = self.parse_unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Formula, Error> {
        if self.eat(Tok::Not) {
            Ok(Formula::not(self.parse_unary()?))
        } else if self.eat(Tok::BoxOp) {
            Ok(Formula::boxed(self.parse_unary()?))
        } else if self.eat(Tok::DiaOp) {
            Ok(Formula::dia(self.parse_unary()?))
        } else {
            self.parse_atom()
        }
    }

    fn parse_atom(&mut self) -> Result<Formula, Error> {
        let at = self.here();
        match self.peek().map(|&(tok, _)| tok) {
            Some(Tok::Var(i)) => {
                self.pos += 1;
                Ok(Formula::Var(i))
            }
            Some(Tok::Bot) => {
                self.pos += 1;
                Ok(Formula::Bot)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.parse_iff()?;
                if self.eat(Tok::RParen) {
                    Ok(f)
                } else {
                    Err(Error::Parse {
                        pos: self.here(),
                        msg: "expected ')'".into(),
                    })
                }
            }
            Some(_) => Err(Error::Parse {
                pos: at,
                msg: "expected a formula".into(),
            }),
            None => Err(Error::Parse {
                pos: at,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(
            f: &mut fmt::Formatter<'_>,
            c: &Formula,
            parens_if_below: u8,
        ) -> fmt::Result {
            if c.prec() < parens_if_below {
                write!(f, "(")?;
                fmt::Display::fmt(c, f)?;
                write!(f, ")")
            } else {
                fmt::Display::fmt(c, f)
            }
        }

        match self {
            Formula::Bot => write!(f, "_|_"),
            Formula::Var(i) => write!(f, "p{i}"),
            Formula::Not(a) => {
                write!(f, "~")?;
                child(f, a, 5)
            }
            Formula::Box(a) => {
                write!(f, "[]")?;
                child(f, a, 5)
            }
            Formula::Dia(a) => {
                write!(f, "<>")?;
                child(f, a, 5)
            }
            // Left-associative: the right child needs parentheses at equal
            // precedence, the left one does not.
            Formula::And(a, b) => {
                child(f, a, 4)?;
                write!(f, " & ")?;
                child(f, b, 5)
            }
            Formula::Or(a, b) => {
                child(f, a, 3)?;
                write!(f, " | ")?;
                child(f, b, 4)
            }
            // Right-associative: mirrored.
            Formula::Imp(a, b) => {
                child(f, a, 3)?;
                write!(f, " -> ")?;
                child(f, b, 2)
            }
            Formula::Iff(a, b) => {
                child(f, a, 2)?;
                write!(f, " <-> ")?;
                child(f, b, 1)
            }
        }
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(de::Error::custom)
    }
}
