//! Formula syntax: AST, parser and static analysis.
//!
//! The grammar is first-order logic in negation-atomic form extended with
//! dependence, inclusion and independence atoms:
//!
//! ```text
//! formula := quant | "(" formula ("&" | "|") formula ")" | atom
//! quant   := ("exists" | "forall") VAR "." formula
//! atom    := VAR "=" VAR | VAR "!=" VAR | REL "(" varlist ")" | "!" REL "(" varlist ")"
//!          | "dep(" varlist ";" varlist ")" | "inc(" varlist ";" varlist ")"
//!          | "ind(" varlist ";" varlist ";" varlist ")"
//! varlist := VAR { ("," | " ") VAR }     (empty only in ind's first slot)
//! ```

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::structure::Vocabulary;

/// Team-logic formulas. Negation occurs only on relational atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Eq(String, String),
    Neq(String, String),
    Rel(String, Vec<String>),
    NegRel(String, Vec<String>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    /// dep(x̄; ȳ): equal x̄-values force equal ȳ-values.
    Dep(Vec<String>, Vec<String>),
    /// inc(x̄; ȳ): every x̄-value occurs as a ȳ-value (tuples of equal length).
    Inc(Vec<String>, Vec<String>),
    /// ind(z̄; x̄; ȳ): x̄ ⊥_z̄ ȳ, with z̄ possibly empty.
    Ind(Vec<String>, Vec<String>, Vec<String>),
}

/// Which generalized dependency atoms occur in a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct AtomSet(u8);

impl AtomSet {
    pub const EMPTY: AtomSet = AtomSet(0);
    pub const DEP: AtomSet = AtomSet(1);
    pub const INC: AtomSet = AtomSet(2);
    pub const IND: AtomSet = AtomSet(4);

    pub fn union(self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, other: AtomSet) -> bool {
        self.0 & other.0 == other.0
    }

    /// True when every atom present is in `allowed`.
    pub fn within(self, allowed: AtomSet) -> bool {
        self.0 & !allowed.0 == 0
    }
}

impl fmt::Display for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = Vec::new();
        if self.contains(AtomSet::DEP) {
            names.push("dep");
        }
        if self.contains(AtomSet::INC) {
            names.push("inc");
        }
        if self.contains(AtomSet::IND) {
            names.push("ind");
        }
        write!(f, "{{{}}}", names.join(","))
    }
}

/// Static facts about a formula: the atoms used, its free variables and its
/// width (maximum free-variable count over subformulas).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentInfo {
    pub atoms: AtomSet,
    pub free_vars: Vec<String>,
    pub width: usize,
}

impl Formula {
    pub fn free_vars(&self) -> Vec<String> {
        let mut acc = BTreeSet::new();
        self.collect_free(&mut acc);
        acc.into_iter().collect()
    }

    fn collect_free(&self, acc: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(x, y) | Formula::Neq(x, y) => {
                acc.insert(x.clone());
                acc.insert(y.clone());
            }
            Formula::Rel(_, vars) | Formula::NegRel(_, vars) => {
                acc.extend(vars.iter().cloned());
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_free(acc);
                r.collect_free(acc);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let mut inner = BTreeSet::new();
                body.collect_free(&mut inner);
                inner.remove(v);
                acc.extend(inner);
            }
            Formula::Dep(xs, ys) | Formula::Inc(xs, ys) => {
                acc.extend(xs.iter().cloned());
                acc.extend(ys.iter().cloned());
            }
            Formula::Ind(zs, xs, ys) => {
                acc.extend(zs.iter().cloned());
                acc.extend(xs.iter().cloned());
                acc.extend(ys.iter().cloned());
            }
        }
    }

    /// Atoms occurring anywhere in this formula.
    pub fn atoms(&self) -> AtomSet {
        match self {
            Formula::Eq(..) | Formula::Neq(..) | Formula::Rel(..) | Formula::NegRel(..) => {
                AtomSet::EMPTY
            }
            Formula::And(l, r) | Formula::Or(l, r) => l.atoms().union(r.atoms()),
            Formula::Exists(_, body) | Formula::Forall(_, body) => body.atoms(),
            Formula::Dep(..) => AtomSet::DEP,
            Formula::Inc(..) => AtomSet::INC,
            Formula::Ind(..) => AtomSet::IND,
        }
    }

    pub fn fragment(&self) -> FragmentInfo {
        let free: BTreeSet<String> = self.free_vars().into_iter().collect();
        FragmentInfo {
            atoms: self.atoms(),
            width: self.width(),
            free_vars: free.into_iter().collect(),
        }
    }

    fn width(&self) -> usize {
        let own = self.free_vars().len();
        let inner = match self {
            Formula::And(l, r) | Formula::Or(l, r) => l.width().max(r.width()),
            Formula::Exists(_, body) | Formula::Forall(_, body) => body.width(),
            _ => 0,
        };
        own.max(inner)
    }

    pub fn subformula_count(&self) -> usize {
        match self {
            Formula::And(l, r) | Formula::Or(l, r) => {
                1 + l.subformula_count() + r.subformula_count()
            }
            Formula::Exists(_, body) | Formula::Forall(_, body) => 1 + body.subformula_count(),
            _ => 1,
        }
    }

    /// Checks relation symbols and tuple-length constraints against a
    /// vocabulary. The parser runs this; programmatic ASTs can call it too.
    pub fn validate(&self, vocab: &Vocabulary) -> Result<(), ParseError> {
        match self {
            Formula::Eq(..) | Formula::Neq(..) => Ok(()),
            Formula::Rel(name, vars) | Formula::NegRel(name, vars) => match vocab.arity_of(name) {
                None => Err(ParseError::plain(ParseErrorKind::UnknownRelation(
                    name.clone(),
                ))),
                Some(arity) if arity != vars.len() => {
                    Err(ParseError::plain(ParseErrorKind::ArityMismatch {
                        name: name.clone(),
                        arity,
                        got: vars.len(),
                    }))
                }
                Some(_) => Ok(()),
            },
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.validate(vocab)?;
                r.validate(vocab)
            }
            Formula::Exists(_, body) | Formula::Forall(_, body) => body.validate(vocab),
            Formula::Dep(xs, ys) => {
                if xs.is_empty() || ys.is_empty() {
                    Err(ParseError::plain(ParseErrorKind::EmptyTuple))
                } else {
                    Ok(())
                }
            }
            Formula::Inc(xs, ys) => {
                if xs.is_empty() || ys.is_empty() {
                    Err(ParseError::plain(ParseErrorKind::EmptyTuple))
                } else if xs.len() != ys.len() {
                    Err(ParseError::plain(ParseErrorKind::IncLengthMismatch {
                        left: xs.len(),
                        right: ys.len(),
                    }))
                } else {
                    Ok(())
                }
            }
            Formula::Ind(_, xs, ys) => {
                if xs.is_empty() || ys.is_empty() {
                    Err(ParseError::plain(ParseErrorKind::EmptyTuple))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn parse(text: &str, vocab: &Vocabulary) -> Result<Formula, ParseError> {
        let tokens = lex(text)?;
        let mut parser = Parser { tokens, pos: 0 };
        let formula = parser.formula()?;
        parser.expect_end()?;
        formula.validate(vocab).map_err(|mut e| {
            // Vocabulary errors from a parse get the formula's start position.
            if e.line == 0 {
                e.line = 1;
                e.col = 1;
            }
            e
        })?;
        Ok(formula)
    }
}

fn join(vars: &[String]) -> String {
    vars.join(", ")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(x, y) => write!(f, "{x} = {y}"),
            Formula::Neq(x, y) => write!(f, "{x} != {y}"),
            Formula::Rel(name, vars) => write!(f, "{name}({})", join(vars)),
            Formula::NegRel(name, vars) => write!(f, "!{name}({})", join(vars)),
            Formula::And(l, r) => write!(f, "({l} & {r})"),
            Formula::Or(l, r) => write!(f, "({l} | {r})"),
            Formula::Exists(v, body) => write!(f, "exists {v}. {body}"),
            Formula::Forall(v, body) => write!(f, "forall {v}. {body}"),
            Formula::Dep(xs, ys) => write!(f, "dep({}; {})", join(xs), join(ys)),
            Formula::Inc(xs, ys) => write!(f, "inc({}; {})", join(xs), join(ys)),
            Formula::Ind(zs, xs, ys) => write!(f, "ind({}; {}; {})", join(zs), join(xs), join(ys)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken {
        expected: String,
        got: String,
    },
    UnexpectedEnd,
    TrailingInput,
    UnknownRelation(String),
    ArityMismatch {
        name: String,
        arity: usize,
        got: usize,
    },
    IncLengthMismatch {
        left: usize,
        right: usize,
    },
    EmptyTuple,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{col}: {}", self.describe())]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn at(line: usize, col: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, col, kind }
    }

    fn plain(kind: ParseErrorKind) -> Self {
        ParseError {
            line: 0,
            col: 0,
            kind,
        }
    }

    fn describe(&self) -> String {
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => format!("unexpected character `{c}`"),
            ParseErrorKind::UnexpectedToken { expected, got } => {
                format!("expected {expected}, got {got}")
            }
            ParseErrorKind::UnexpectedEnd => "unexpected end of input".to_string(),
            ParseErrorKind::TrailingInput => "trailing input after formula".to_string(),
            ParseErrorKind::UnknownRelation(name) => format!("unknown relation `{name}`"),
            ParseErrorKind::ArityMismatch { name, arity, got } => {
                format!("relation `{name}` has arity {arity}, got {got} arguments")
            }
            ParseErrorKind::IncLengthMismatch { left, right } => {
                format!("inc tuples must have equal length, got {left} and {right}")
            }
            ParseErrorKind::EmptyTuple => "atom tuple may not be empty here".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Amp,
    Pipe,
    Bang,
    EqSign,
    NeqSign,
    Comma,
    Semi,
    Dot,
    Ident(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Amp => write!(f, "`&`"),
            Tok::Pipe => write!(f, "`|`"),
            Tok::Bang => write!(f, "`!`"),
            Tok::EqSign => write!(f, "`=`"),
            Tok::NeqSign => write!(f, "`!=`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (start_line, start_col) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = match c {
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            '&' => {
                bump(&mut chars);
                Tok::Amp
            }
            '|' => {
                bump(&mut chars);
                Tok::Pipe
            }
            '=' => {
                bump(&mut chars);
                Tok::EqSign
            }
            ',' => {
                bump(&mut chars);
                Tok::Comma
            }
            ';' => {
                bump(&mut chars);
                Tok::Semi
            }
            '.' => {
                bump(&mut chars);
                Tok::Dot
            }
            '!' => {
                bump(&mut chars);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    Tok::NeqSign
                } else {
                    Tok::Bang
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                Tok::Ident(ident)
            }
            other => {
                return Err(ParseError::at(
                    start_line,
                    start_col,
                    ParseErrorKind::UnexpectedChar(other),
                ))
            }
        };
        tokens.push(Spanned {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn end_pos(&self) -> (usize, usize) {
        self.tokens
            .last()
            .map(|t| (t.line, t.col + 1))
            .unwrap_or((1, 1))
    }

    fn next(&mut self) -> Result<Spanned, ParseError> {
        let spanned = self.tokens.get(self.pos).cloned().ok_or_else(|| {
            let (line, col) = self.end_pos();
            ParseError::at(line, col, ParseErrorKind::UnexpectedEnd)
        })?;
        self.pos += 1;
        Ok(spanned)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        let got = self.next()?;
        if got.tok == tok {
            Ok(())
        } else {
            Err(ParseError::at(
                got.line,
                got.col,
                ParseErrorKind::UnexpectedToken {
                    expected: tok.to_string(),
                    got: got.tok.to_string(),
                },
            ))
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(spanned) => Err(ParseError::at(
                spanned.line,
                spanned.col,
                ParseErrorKind::TrailingInput,
            )),
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize), ParseError> {
        let got = self.next()?;
        match got.tok {
            Tok::Ident(name) => Ok((name, got.line, got.col)),
            other => Err(ParseError::at(
                got.line,
                got.col,
                ParseErrorKind::UnexpectedToken {
                    expected: "identifier".to_string(),
                    got: other.to_string(),
                },
            )),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let spanned = self.peek().cloned().ok_or_else(|| {
            let (line, col) = self.end_pos();
            ParseError::at(line, col, ParseErrorKind::UnexpectedEnd)
        })?;
        match &spanned.tok {
            Tok::Ident(name) if name == "exists" || name == "forall" => {
                let exists = name == "exists";
                self.pos += 1;
                let (var, ..) = self.ident()?;
                self.expect(Tok::Dot)?;
                let body = Box::new(self.formula()?);
                Ok(if exists {
                    Formula::Exists(var, body)
                } else {
                    Formula::Forall(var, body)
                })
            }
            Tok::LParen => {
                self.pos += 1;
                let left = self.formula()?;
                let op = self.next()?;
                let right = self.formula()?;
                self.expect(Tok::RParen)?;
                match op.tok {
                    Tok::Amp => Ok(Formula::And(Box::new(left), Box::new(right))),
                    Tok::Pipe => Ok(Formula::Or(Box::new(left), Box::new(right))),
                    other => Err(ParseError::at(
                        op.line,
                        op.col,
                        ParseErrorKind::UnexpectedToken {
                            expected: "`&` or `|`".to_string(),
                            got: other.to_string(),
                        },
                    )),
                }
            }
            _ => self.atom(),
        }
    }

    /// A varlist: identifiers separated by commas or plain whitespace.
    fn varlist(&mut self, allow_empty: bool) -> Result<Vec<String>, ParseError> {
        let mut vars = Vec::new();
        while let Some(Spanned {
            tok: Tok::Ident(_), ..
        }) = self.peek()
        {
            let (name, ..) = self.ident()?;
            vars.push(name);
            if let Some(Spanned {
                tok: Tok::Comma, ..
            }) = self.peek()
            {
                self.pos += 1;
            }
        }
        if vars.is_empty() && !allow_empty {
            let (line, col) = self
                .peek()
                .map(|s| (s.line, s.col))
                .unwrap_or_else(|| self.end_pos());
            return Err(ParseError::at(line, col, ParseErrorKind::EmptyTuple));
        }
        Ok(vars)
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let spanned = self.next()?;
        match spanned.tok {
            Tok::Bang => {
                let (name, ..) = self.ident()?;
                self.expect(Tok::LParen)?;
                let vars = self.varlist(false)?;
                self.expect(Tok::RParen)?;
                Ok(Formula::NegRel(name, vars))
            }
            Tok::Ident(name) => match name.as_str() {
                "dep" | "inc" => {
                    self.expect(Tok::LParen)?;
                    let xs = self.varlist(false)?;
                    self.expect(Tok::Semi)?;
                    let ys = self.varlist(false)?;
                    let close = self
                        .peek()
                        .map(|s| (s.line, s.col))
                        .unwrap_or_else(|| self.end_pos());
                    self.expect(Tok::RParen)?;
                    if name == "inc" && xs.len() != ys.len() {
                        return Err(ParseError::at(
                            close.0,
                            close.1,
                            ParseErrorKind::IncLengthMismatch {
                                left: xs.len(),
                                right: ys.len(),
                            },
                        ));
                    }
                    Ok(if name == "dep" {
                        Formula::Dep(xs, ys)
                    } else {
                        Formula::Inc(xs, ys)
                    })
                }
                "ind" => {
                    self.expect(Tok::LParen)?;
                    let zs = self.varlist(true)?;
                    self.expect(Tok::Semi)?;
                    let xs = self.varlist(false)?;
                    self.expect(Tok::Semi)?;
                    let ys = self.varlist(false)?;
                    self.expect(Tok::RParen)?;
                    Ok(Formula::Ind(zs, xs, ys))
                }
                _ => {
                    let follow = self.next()?;
                    match follow.tok {
                        Tok::EqSign => {
                            let (other, ..) = self.ident()?;
                            Ok(Formula::Eq(name, other))
                        }
                        Tok::NeqSign => {
                            let (other, ..) = self.ident()?;
                            Ok(Formula::Neq(name, other))
                        }
                        Tok::LParen => {
                            let vars = self.varlist(false)?;
                            self.expect(Tok::RParen)?;
                            Ok(Formula::Rel(name, vars))
                        }
                        other => Err(ParseError::at(
                            follow.line,
                            follow.col,
                            ParseErrorKind::UnexpectedToken {
                                expected: "`=`, `!=` or `(`".to_string(),
                                got: other.to_string(),
                            },
                        )),
                    }
                }
            },
            other => Err(ParseError::at(
                spanned.line,
                spanned.col,
                ParseErrorKind::UnexpectedToken {
                    expected: "atom".to_string(),
                    got: other.to_string(),
                },
            )),
        }
    }
}
