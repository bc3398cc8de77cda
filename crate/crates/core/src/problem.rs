//! Problem files.
//!
//! ```text
//! features comp, obj, topic;
//! sorts A, B;
//! s topic x;
//! s <comp* . obj> x;
//! A(x);
//! ```
//!
//! Statements end in `;`. Besides sort restrictions `A(x)`, agreements
//! `x = y` and paths `x item... y` (items are features, path variables
//! `$m`, or `<REGEX>`), constraints may be written directly as
//! `div(t, t)`, `prefix(t, t)`, `patheq(t, t)` and `in(t, REGEX)`, where a
//! term is a feature or a path variable. `#` and `//` start comments.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::clause::{
    extend_km, Clause, Constraint, FoVar, KmConstraint, PathItem, PathVar, SimpleTerm, SortName,
    Symbols,
};
use crate::lang::{Alphabet, LangError, LangId, LangStore};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub struct Problem {
    pub store: LangStore,
    pub symbols: Symbols,
    pub statements: Vec<KmConstraint>,
    /// Constraints given in the extended forms.
    pub direct: Vec<Constraint>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("symbols", &self.symbols)
            .field("statements", &self.statements)
            .field("direct", &self.direct)
            .finish_non_exhaustive()
    }
}

impl Problem {
    pub fn parse(text: &str) -> Result<Problem, ParseError> {
        Parser::new(text).problem()
    }

    pub fn parse_with_cap(text: &str, cap: usize) -> Result<Problem, ParseError> {
        let mut p = Parser::new(text);
        p.cap = Some(cap);
        p.problem()
    }

    /// The input clause: direct constraints plus the translated statements.
    pub fn clause(&self) -> Clause {
        let mut base = Clause::from_constraints(self.direct.iter().copied());
        let fo = self
            .symbols
            .fo_names
            .keys()
            .map(|x| x.0 + 1)
            .max()
            .unwrap_or(0);
        let path = self
            .symbols
            .path_names
            .keys()
            .map(|v| v.0 + 1)
            .max()
            .unwrap_or(0);
        base.reserve(fo, path);
        extend_km(base, &self.statements)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    cap: Option<usize>,
    store: Option<LangStore>,
    sorts: Vec<String>,
    fo: BTreeMap<String, FoVar>,
    paths: BTreeMap<String, PathVar>,
    statements: Vec<KmConstraint>,
    direct: Vec<Constraint>,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            pos: 0,
            cap: None,
            store: None,
            sorts: Vec::new(),
            fo: BTreeMap::new(),
            paths: BTreeMap::new(),
            statements: Vec::new(),
            direct: Vec::new(),
        }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let before = &self.src[..pos.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') || trimmed.starts_with("//") {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> Result<(usize, &'a str), ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if is_ident_start(c) => {}
            _ => return Err(self.error("expected an identifier")),
        }
        let len = self
            .rest()
            .find(|c: char| !is_ident_char(c))
            .unwrap_or(self.rest().len());
        self.pos += len;
        Ok((start, &self.src[start..self.pos]))
    }

    fn store(&self, at: usize) -> Result<&LangStore, ParseError> {
        self.store
            .as_ref()
            .ok_or_else(|| self.error_at(at, "features must be declared before use"))
    }

    fn fo_var(&mut self, name: &str) -> FoVar {
        let next = FoVar(self.fo.len() as u32);
        *self.fo.entry(name.to_string()).or_insert(next)
    }

    fn path_var(&mut self) -> Result<PathVar, ParseError> {
        self.expect('$')?;
        let (_, name) = self.ident()?;
        let next = PathVar(self.paths.len() as u32);
        Ok(*self.paths.entry(name.to_string()).or_insert(next))
    }

    fn regex(&self, text: &str, at: usize) -> Result<LangId, ParseError> {
        let store = self.store(at)?;
        store.compile_str(text).map_err(|e| match e {
            LangError::Syntax { offset, message } => self.error_at(at + offset, message),
            other => self.error_at(at, other.to_string()),
        })
    }

    /// `<REGEX>`, returning the compiled language.
    fn angle_regex(&mut self) -> Result<LangId, ParseError> {
        self.expect('<')?;
        let start = self.pos;
        let Some(len) = self.rest().find('>') else {
            return Err(self.error("unterminated '<'"));
        };
        self.pos += len + 1;
        self.regex(&self.src[start..start + len], start)
    }

    /// Raw regex text up to the closing parenthesis of `in(...)`.
    fn raw_regex(&mut self) -> Result<LangId, ParseError> {
        self.skip_ws();
        if self.peek() == Some('<') {
            let l = self.angle_regex()?;
            self.expect(')')?;
            return Ok(l);
        }
        let start = self.pos;
        let mut depth = 0usize;
        for (i, c) in self.rest().char_indices() {
            match c {
                '(' | '{' => depth += 1,
                '}' => depth = depth.saturating_sub(1),
                ')' if depth == 0 => {
                    self.pos = start + i + 1;
                    return self.regex(&self.src[start..start + i], start);
                }
                ')' => depth -= 1,
                ';' => break,
                _ => {}
            }
        }
        Err(self.error_at(start, "unterminated 'in('"))
    }

    fn term(&mut self) -> Result<SimpleTerm, ParseError> {
        self.skip_ws();
        if self.peek() == Some('$') {
            return Ok(SimpleTerm::Var(self.path_var()?));
        }
        let (at, name) = self.ident()?;
        let f = self
            .store(at)?
            .alphabet()
            .feature(name)
            .ok_or_else(|| self.error_at(at, format!("unknown feature '{name}'")))?;
        Ok(SimpleTerm::Feat(f))
    }

    fn name_list(&mut self) -> Result<Vec<(usize, &'a str)>, ParseError> {
        let mut names = vec![self.ident()?];
        while self.eat(',') {
            names.push(self.ident()?);
        }
        self.expect(';')?;
        Ok(names)
    }

    fn problem(mut self) -> Result<Problem, ParseError> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                break;
            }
            self.statement()?;
        }
        if self.statements.is_empty() && self.direct.is_empty() {
            return Err(self.error("no constraints"));
        }
        let store = match self.store {
            Some(s) => s,
            None => return Err(self.error_at(0, "missing features declaration")),
        };
        let symbols = Symbols {
            sorts: self.sorts,
            fo_names: self.fo.into_iter().map(|(n, x)| (x, n)).collect(),
            path_names: self.paths.into_iter().map(|(n, v)| (v, n)).collect(),
        };
        Ok(Problem {
            store,
            symbols,
            statements: self.statements,
            direct: self.direct,
        })
    }

    fn statement(&mut self) -> Result<(), ParseError> {
        let (at, head) = self.ident()?;
        self.skip_ws();
        let call = self.peek() == Some('(');
        match head {
            "features" if !call => {
                if self.store.is_some() {
                    return Err(self.error_at(at, "features declared twice"));
                }
                let names: Vec<&str> = self.name_list()?.into_iter().map(|(_, n)| n).collect();
                for (i, n) in names.iter().enumerate() {
                    if !n.starts_with(|c: char| c.is_ascii_lowercase()) {
                        return Err(self.error_at(
                            at,
                            format!("feature '{n}' must start with a lowercase letter"),
                        ));
                    }
                    if names[..i].contains(n) {
                        return Err(self.error_at(at, format!("feature '{n}' declared twice")));
                    }
                }
                let alphabet = Alphabet::new(names);
                self.store = Some(match self.cap {
                    Some(cap) => LangStore::with_cap(alphabet, cap),
                    None => LangStore::new(alphabet),
                });
            }
            "sorts" if !call => {
                for (p, n) in self.name_list()? {
                    if self.sorts.iter().any(|s| s == n) {
                        return Err(self.error_at(p, format!("sort '{n}' declared twice")));
                    }
                    self.sorts.push(n.to_string());
                }
            }
            "div" | "prefix" | "patheq" if call => {
                self.expect('(')?;
                let a = self.term()?;
                self.expect(',')?;
                let b = self.term()?;
                self.expect(')')?;
                self.expect(';')?;
                self.direct.push(match head {
                    "div" => Constraint::div(a, b),
                    "prefix" => Constraint::prefix(a, b),
                    _ => Constraint::path_eq(a, b),
                });
            }
            "in" if call => {
                self.expect('(')?;
                let t = self.term()?;
                self.expect(',')?;
                let l = self.raw_regex()?;
                self.expect(';')?;
                self.direct.push(Constraint::restrict(t, l));
            }
            _ if call => {
                let Some(sort) = self.sorts.iter().position(|s| s == head) else {
                    return Err(self.error_at(at, format!("unknown sort '{head}'")));
                };
                self.expect('(')?;
                let (_, var) = self.ident()?;
                self.expect(')')?;
                self.expect(';')?;
                let x = self.fo_var(var);
                self.statements
                    .push(KmConstraint::Sort(SortName(sort as u32), x));
            }
            _ => {
                let x = self.fo_var(head);
                if self.eat('=') {
                    let (_, other) = self.ident()?;
                    self.expect(';')?;
                    let y = self.fo_var(other);
                    self.statements.push(KmConstraint::Agree(x, y));
                    return Ok(());
                }
                self.path_statement(x)?;
            }
        }
        Ok(())
    }

    fn path_statement(&mut self, x: FoVar) -> Result<(), ParseError> {
        let mut items = Vec::new();
        let mut pending: Vec<(usize, &str)> = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(';') => {
                    self.pos += 1;
                    break;
                }
                Some('$') => {
                    self.flush(&mut pending, &mut items)?;
                    items.push(PathItem::Var(self.path_var()?));
                }
                Some('<') => {
                    self.flush(&mut pending, &mut items)?;
                    items.push(PathItem::Lang(self.angle_regex()?));
                }
                Some(c) if is_ident_start(c) => pending.push(self.ident()?),
                None => return Err(self.error("expected ';'")),
                Some(c) => return Err(self.error(format!("unexpected '{c}'"))),
            }
        }
        let Some((at, target)) = pending.pop() else {
            return Err(self.error("expected a target variable before ';'"));
        };
        self.flush(&mut pending, &mut items)?;
        if items.is_empty() {
            return Err(self.error_at(at, "expected a path between two variables"));
        }
        let y = self.fo_var(target);
        self.statements.push(KmConstraint::Path(x, items, y));
        Ok(())
    }

    /// Pending identifiers inside a path are features.
    fn flush(
        &self,
        pending: &mut Vec<(usize, &str)>,
        items: &mut Vec<PathItem>,
    ) -> Result<(), ParseError> {
        for (at, name) in pending.drain(..) {
            let f = self
                .store(at)?
                .alphabet()
                .feature(name)
                .ok_or_else(|| self.error_at(at, format!("unknown feature '{name}'")))?;
            items.push(PathItem::Feature(f));
        }
        Ok(())
    }
}
