//! Regular path expressions: syntax tree, text parser and subset construction.
//!
//! Syntax: identifiers `[a-z][a-zA-Z0-9_]*`, concatenation by `.` or
//! whitespace, union `|`, postfix `*` and `+`, grouping `( )`, feature sets
//! `{f,g}`. `()` is the empty word and `{}` the empty language.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::dfa::RawDfa;
use super::{Alphabet, LangError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegexAst {
    Feature(String),
    Concat(Box<RegexAst>, Box<RegexAst>),
    Union(Box<RegexAst>, Box<RegexAst>),
    Star(Box<RegexAst>),
    Plus(Box<RegexAst>),
    Empty,
    Epsilon,
}

impl RegexAst {
    pub fn feature(name: &str) -> Self {
        RegexAst::Feature(name.to_string())
    }

    pub fn concat(a: RegexAst, b: RegexAst) -> Self {
        RegexAst::Concat(Box::new(a), Box::new(b))
    }

    pub fn union(a: RegexAst, b: RegexAst) -> Self {
        RegexAst::Union(Box::new(a), Box::new(b))
    }

    pub fn star(a: RegexAst) -> Self {
        RegexAst::Star(Box::new(a))
    }

    pub fn plus(a: RegexAst) -> Self {
        RegexAst::Plus(Box::new(a))
    }

    /// Parses the textual syntax. Positions in errors are byte offsets.
    pub fn parse(text: &str) -> Result<RegexAst, LangError> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let ast = p.union()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected character"));
        }
        Ok(ast)
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            RegexAst::Feature(n) => write!(f, "{n}"),
            RegexAst::Empty => write!(f, "{{}}"),
            RegexAst::Epsilon => write!(f, "()"),
            RegexAst::Union(a, b) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 0)?;
                write!(f, "|")?;
                b.fmt_prec(f, 0)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            RegexAst::Concat(a, b) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, ".")?;
                b.fmt_prec(f, 1)?;
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            RegexAst::Star(a) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")
            }
            RegexAst::Plus(a) => {
                a.fmt_prec(f, 2)?;
                write!(f, "+")
            }
        }
    }
}

impl fmt::Display for RegexAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> LangError {
        LangError::Syntax {
            offset: self.pos,
            message: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), LangError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String, LangError> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_lowercase() => self.pos += 1,
            _ => return Err(self.error("expected feature name")),
        }
        while let Some(c) = self.src.get(self.pos) {
            if c.is_ascii_alphanumeric() || *c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn union(&mut self) -> Result<RegexAst, LangError> {
        let mut left = self.concat()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            let right = self.concat()?;
            left = RegexAst::union(left, right);
        }
        Ok(left)
    }

    fn starts_atom(c: Option<u8>) -> bool {
        matches!(c, Some(c) if c.is_ascii_lowercase() || c == b'(' || c == b'{')
    }

    fn concat(&mut self) -> Result<RegexAst, LangError> {
        let mut left = self.postfix()?;
        loop {
            match self.peek() {
                Some(b'.') => {
                    self.pos += 1;
                    let right = self.postfix()?;
                    left = RegexAst::concat(left, right);
                }
                c if Self::starts_atom(c) => {
                    let right = self.postfix()?;
                    left = RegexAst::concat(left, right);
                }
                _ => return Ok(left),
            }
        }
    }

    fn postfix(&mut self) -> Result<RegexAst, LangError> {
        let mut atom = self.atom()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    atom = RegexAst::star(atom);
                }
                Some(b'+') => {
                    self.pos += 1;
                    atom = RegexAst::plus(atom);
                }
                _ => return Ok(atom),
            }
        }
    }

    fn atom(&mut self) -> Result<RegexAst, LangError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    return Ok(RegexAst::Epsilon);
                }
                let inner = self.union()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'{') => {
                self.pos += 1;
                if self.peek() == Some(b'}') {
                    self.pos += 1;
                    return Ok(RegexAst::Empty);
                }
                let mut set = RegexAst::Feature(self.ident()?);
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    set = RegexAst::union(set, RegexAst::Feature(self.ident()?));
                }
                self.expect(b'}')?;
                Ok(set)
            }
            Some(c) if c.is_ascii_lowercase() => Ok(RegexAst::Feature(self.ident()?)),
            _ => Err(self.error("expected feature, '(' or '{'")),
        }
    }
}

/// Thompson-style NFA with epsilon moves.
struct Nfa {
    eps: Vec<Vec<usize>>,
    moves: Vec<Vec<(usize, usize)>>,
}

impl Nfa {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.moves.push(Vec::new());
        self.eps.len() - 1
    }

    /// Returns (start, accept) of the fragment.
    fn build(&mut self, ast: &RegexAst, alphabet: &Alphabet) -> Result<(usize, usize), LangError> {
        let s = self.state();
        let t = self.state();
        match ast {
            RegexAst::Feature(name) => {
                let f = alphabet
                    .feature(name)
                    .ok_or_else(|| LangError::UnknownFeature(name.clone()))?;
                self.moves[s].push((f.index(), t));
            }
            RegexAst::Empty => {}
            RegexAst::Epsilon => self.eps[s].push(t),
            RegexAst::Concat(a, b) => {
                let (a0, a1) = self.build(a, alphabet)?;
                let (b0, b1) = self.build(b, alphabet)?;
                self.eps[s].push(a0);
                self.eps[a1].push(b0);
                self.eps[b1].push(t);
            }
            RegexAst::Union(a, b) => {
                let (a0, a1) = self.build(a, alphabet)?;
                let (b0, b1) = self.build(b, alphabet)?;
                self.eps[s].extend([a0, b0]);
                self.eps[a1].push(t);
                self.eps[b1].push(t);
            }
            RegexAst::Star(a) | RegexAst::Plus(a) => {
                let (a0, a1) = self.build(a, alphabet)?;
                self.eps[s].push(a0);
                self.eps[a1].extend([a0, t]);
                if matches!(ast, RegexAst::Star(_)) {
                    self.eps[s].push(t);
                }
            }
        }
        Ok((s, t))
    }

    fn closure(&self, set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &n in &self.eps[q] {
                if set.insert(n) {
                    stack.push(n);
                }
            }
        }
    }
}

/// Subset construction; the result is not yet minimized.
pub(crate) fn to_raw_dfa(ast: &RegexAst, alphabet: &Alphabet) -> Result<RawDfa, LangError> {
    let mut nfa = Nfa {
        eps: Vec::new(),
        moves: Vec::new(),
    };
    let (start, accept) = nfa.build(ast, alphabet)?;
    let n_feat = alphabet.len();

    let mut init = BTreeSet::from([start]);
    nfa.closure(&mut init);
    let mut index: BTreeMap<BTreeSet<usize>, u32> = BTreeMap::new();
    let mut sets = vec![init.clone()];
    index.insert(init, 0);
    let mut trans = Vec::new();
    let mut finals = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let cur = sets[i].clone();
        let mut row = vec![None; n_feat];
        for (f, slot) in row.iter_mut().enumerate() {
            let mut next: BTreeSet<usize> = cur
                .iter()
                .flat_map(|&q| nfa.moves[q].iter())
                .filter(|(g, _)| *g == f)
                .map(|(_, t)| *t)
                .collect();
            if next.is_empty() {
                continue;
            }
            nfa.closure(&mut next);
            let fresh = sets.len() as u32;
            let id = *index.entry(next.clone()).or_insert_with(|| {
                sets.push(next);
                fresh
            });
            *slot = Some(id);
        }
        trans.push(row);
        finals.push(cur.contains(&accept));
        i += 1;
    }
    Ok(RawDfa {
        trans,
        finals,
        init: 0,
    })
}
