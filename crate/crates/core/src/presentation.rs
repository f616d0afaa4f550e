//! Plain-text presentations of quadratic path algebras and of modules over them.
//!
//! Algebra files are line oriented:
//!
//! ```text
//! field GF(5)            # or: field Q
//! unit q = 2
//! vertex 1
//! arrow x: 1 -> 1
//! arrow y: 1 -> 1
//! relation x*y - q*y*x
//! relation x*x
//! relation y*y
//! truncate 6             # optional
//! ```
//!
//! Module files hold one `module` statement, optionally followed by `dim`/`act`
//! statements for representations; matrices may span several lines.
//!
//! Paths are written left to right (`x*y` is `x` followed by `y`) and modules are
//! right modules, so a path starting at vertex `v` acts on the component at `v`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use thiserror::Error;

use crate::field::{is_prime, Field, Scalar, MAX_PRIME};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {message}")]
    SyntaxError { line: usize, col: usize, message: String },
    #[error("relation on line {line} is not quadratic")]
    NonQuadraticRelation { line: usize },
    #[error("relation on line {line} mixes paths with different endpoints")]
    MixedEndpoints { line: usize },
    #[error("unknown vertex `{label}` on line {line}")]
    UnknownVertex { line: usize, label: String },
    #[error("modulus {0} is not a prime below 2^31")]
    NonPrimeModulus(u64),
    #[error("duplicate label `{label}` on line {line}")]
    DuplicateLabel { line: usize, label: String },
    #[error("unit `{name}` on line {line} is zero")]
    ZeroUnit { line: usize, name: String },
    #[error("missing `{0}` declaration")]
    Missing(&'static str),
    #[error("unknown generator `{label}` at {line}:{col}")]
    UnknownGenerator { line: usize, col: usize, label: String },
    #[error("entry at {line}:{col} is not an element of the algebra: {message}")]
    EntryNotInAlgebra { line: usize, col: usize, message: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub field: Field,
    /// Named units in declaration order.
    pub named_scalars: Vec<(String, Scalar)>,
}

impl FieldSpec {
    pub fn lookup(&self, name: &str) -> Option<&Scalar> {
        self.named_scalars.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowSpec {
    pub label: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverSpec {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
}

impl QuiverSpec {
    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    pub fn arrow_index(&self, label: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.label == label)
    }

    pub fn path_source(&self, path: &[usize]) -> usize {
        self.arrows[path[0]].source
    }

    pub fn path_target(&self, path: &[usize]) -> usize {
        self.arrows[*path.last().expect("nonempty path")].target
    }

    pub fn is_path(&self, path: &[usize]) -> bool {
        path.windows(2)
            .all(|w| self.arrows[w[0]].target == self.arrows[w[1]].source)
    }
}

/// A vertex idempotent or a nonempty path of arrows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Monomial {
    Idempotent(usize),
    Path(Vec<usize>),
}

impl Monomial {
    pub fn length(&self) -> usize {
        match self {
            Monomial::Idempotent(_) => 0,
            Monomial::Path(p) => p.len(),
        }
    }

    pub fn source(&self, quiver: &QuiverSpec) -> usize {
        match self {
            Monomial::Idempotent(v) => *v,
            Monomial::Path(p) => quiver.path_source(p),
        }
    }

    pub fn target(&self, quiver: &QuiverSpec) -> usize {
        match self {
            Monomial::Idempotent(v) => *v,
            Monomial::Path(p) => quiver.path_target(p),
        }
    }

    fn times(&self, other: &Monomial, quiver: &QuiverSpec) -> Option<Monomial> {
        if self.target(quiver) != other.source(quiver) {
            return None;
        }
        Some(match (self, other) {
            (Monomial::Idempotent(_), m) | (m, Monomial::Idempotent(_)) => m.clone(),
            (Monomial::Path(a), Monomial::Path(b)) => {
                let mut p = a.clone();
                p.extend_from_slice(b);
                Monomial::Path(p)
            }
        })
    }

    fn sort_key(&self) -> (usize, Vec<usize>) {
        match self {
            Monomial::Idempotent(v) => (0, vec![*v]),
            Monomial::Path(p) => (p.len(), p.clone()),
        }
    }
}

/// Length-lexicographic, arrows compared by declaration order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A normalized linear combination of monomials: sorted, combined, no zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AlgElem {
    pub terms: Vec<(Monomial, Scalar)>,
}

impl AlgElem {
    pub fn from_terms(mut terms: Vec<(Monomial, Scalar)>) -> Self {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Monomial, Scalar)> = Vec::new();
        for (m, c) in terms {
            match out.last_mut() {
                Some((last, acc)) if *last == m => *acc += &c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        AlgElem { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common path length, `None` when empty or inhomogeneous.
    pub fn degree(&self) -> Option<usize> {
        let first = self.terms.first()?.0.length();
        self.terms.iter().all(|(m, _)| m.length() == first).then_some(first)
    }

    fn mul(&self, other: &AlgElem, quiver: &QuiverSpec) -> AlgElem {
        let mut terms = Vec::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if let Some(m) = a.times(b, quiver) {
                    terms.push((m, x * y));
                }
            }
        }
        AlgElem::from_terms(terms)
    }

    fn add(&self, other: &AlgElem) -> AlgElem {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        AlgElem::from_terms(terms)
    }

    fn scale(&self, c: &Scalar) -> AlgElem {
        AlgElem::from_terms(self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect())
    }

    pub fn render(&self, quiver: &QuiverSpec) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let word = match m {
                Monomial::Idempotent(v) => format!("e_{}", quiver.vertices[*v]),
                Monomial::Path(p) => p
                    .iter()
                    .map(|a| quiver.arrows[*a].label.as_str())
                    .collect::<Vec<_>>()
                    .join("*"),
            };
            let text = c.to_string();
            let (negative, magnitude) = match text.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, text),
            };
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            if magnitude != "1" {
                let _ = write!(out, "{magnitude}*");
            }
            out.push_str(&word);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraPresentation {
    pub field: FieldSpec,
    pub quiver: QuiverSpec,
    pub relations: Vec<AlgElem>,
    pub truncation: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModulePresentation {
    Simple {
        vertex: usize,
    },
    Regular,
    RegularBimodule,
    /// Cokernel of `matrix`: row `i` is a generator at `vertices[i]` in degree
    /// `degrees[i]`, and column `j` is the relation `Σ_i g_i·matrix[i][j]`.
    Cokernel {
        matrix: Vec<Vec<AlgElem>>,
        degrees: Vec<i32>,
        vertices: Vec<usize>,
    },
    /// Dimensions per (vertex, degree) and arrow actions; an action matrix for
    /// arrow `a` in degree `d` maps the component at `(source(a), d)` to the one at
    /// `(target(a), d + 1)` acting on column vectors.
    Representation {
        dims: Vec<(usize, i32, usize)>,
        actions: Vec<(usize, i32, Vec<Vec<Scalar>>)>,
    },
}

// ---------------------------------------------------------------------------
// tokens

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn tokenize(text: &str, line: usize, col0: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line,
                col,
            });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Int(digits.parse().expect("digits")),
                line,
                col,
            });
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Token { tok: Tok::Sym("->"), line, col });
            i += 2;
        } else {
            let sym = match c {
                '+' => "+",
                '-' => "-",
                '*' => "*",
                '/' => "/",
                '[' => "[",
                ']' => "]",
                '(' => "(",
                ')' => ")",
                ',' => ",",
                ':' => ":",
                '=' => "=",
                _ => {
                    return Err(ParseError::SyntaxError {
                        line,
                        col,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            out.push(Token { tok: Tok::Sym(sym), line, col });
            i += 1;
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    eof_line: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Token], eof_line: usize) -> Self {
        Cursor { toks, pos: 0, eof_line }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(t) => (t.line, t.col),
            None => (self.eof_line, 0),
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::SyntaxError {
            line,
            col,
            message: message.into(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Sym(x), .. }) if *x == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.is_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected `{s}`"))
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize), ParseError> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), line, col }) => {
                self.pos += 1;
                Ok((s.clone(), *line, *col))
            }
            _ => self.error("expected identifier"),
        }
    }

    /// A label: identifier or bare integer (vertex labels are often numbers).
    fn label(&mut self) -> Result<(String, usize, usize), ParseError> {
        match self.peek() {
            Some(Token { tok: Tok::Int(n), line, col }) => {
                self.pos += 1;
                Ok((n.to_string(), *line, *col))
            }
            _ => self.ident(),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let negative = if self.is_sym("-") {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.peek() {
            Some(Token { tok: Tok::Int(n), .. }) => {
                self.pos += 1;
                Ok(if negative { -n.clone() } else { n.clone() })
            }
            _ => self.error("expected integer"),
        }
    }

    fn small_int(&mut self) -> Result<i64, ParseError> {
        let n = self.integer()?;
        i64::try_from(n).or_else(|_| self.error("integer out of range"))
    }
}

fn scalar_literal(cur: &mut Cursor, field: Field) -> Result<Scalar, ParseError> {
    let num = cur.integer()?;
    let den = if cur.is_sym("/") {
        cur.pos += 1;
        cur.integer()?
    } else {
        BigInt::from(1)
    };
    match field.from_ratio(&num, &den) {
        Some(s) => Ok(s),
        None => cur.error("denominator vanishes in the field"),
    }
}

struct ExprContext<'a> {
    field: &'a FieldSpec,
    quiver: &'a QuiverSpec,
}

impl ExprContext<'_> {
    fn one(&self) -> AlgElem {
        AlgElem::from_terms(
            (0..self.quiver.vertices.len())
                .map(|v| (Monomial::Idempotent(v), self.field.field.one()))
                .collect(),
        )
    }

    fn factor(&self, cur: &mut Cursor) -> Result<AlgElem, ParseError> {
        let (line, col) = cur.here();
        match cur.peek().map(|t| &t.tok) {
            Some(Tok::Int(_)) => {
                let s = scalar_literal(cur, self.field.field)?;
                Ok(self.one().scale(&s))
            }
            Some(Tok::Sym("(")) => {
                cur.pos += 1;
                let e = self.expr(cur)?;
                cur.expect_sym(")")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                cur.pos += 1;
                if let Some(s) = self.field.lookup(&name) {
                    return Ok(self.one().scale(s));
                }
                if let Some(a) = self.quiver.arrow_index(&name) {
                    return Ok(AlgElem::from_terms(vec![(Monomial::Path(vec![a]), self.field.field.one())]));
                }
                if let Some(v) = name.strip_prefix("e_").and_then(|l| self.quiver.vertex_index(l)) {
                    return Ok(AlgElem::from_terms(vec![(Monomial::Idempotent(v), self.field.field.one())]));
                }
                Err(ParseError::EntryNotInAlgebra {
                    line,
                    col,
                    message: format!("unknown symbol `{name}`"),
                })
            }
            _ => cur.error("expected a scalar, unit, arrow or idempotent"),
        }
    }

    fn term(&self, cur: &mut Cursor) -> Result<AlgElem, ParseError> {
        let mut acc = self.factor(cur)?;
        while cur.is_sym("*") {
            cur.pos += 1;
            let f = self.factor(cur)?;
            acc = acc.mul(&f, self.quiver);
        }
        Ok(acc)
    }

    fn expr(&self, cur: &mut Cursor) -> Result<AlgElem, ParseError> {
        let mut negate = false;
        if cur.is_sym("-") {
            cur.pos += 1;
            negate = true;
        } else if cur.is_sym("+") {
            cur.pos += 1;
        }
        let minus_one = -self.field.field.one();
        let mut acc = self.term(cur)?;
        if negate {
            acc = acc.scale(&minus_one);
        }
        loop {
            if cur.is_sym("+") {
                cur.pos += 1;
                acc = acc.add(&self.term(cur)?);
            } else if cur.is_sym("-") {
                cur.pos += 1;
                acc = acc.add(&self.term(cur)?.scale(&minus_one));
            } else {
                return Ok(acc);
            }
        }
    }
}

fn check_path_validity(elem: &AlgElem, quiver: &QuiverSpec) -> bool {
    elem.terms.iter().all(|(m, _)| match m {
        Monomial::Path(p) => quiver.is_path(p),
        Monomial::Idempotent(_) => true,
    })
}

/// Parses an algebra source file.
pub fn parse_algebra(text: &str) -> Result<AlgebraPresentation, ParseError> {
    let mut field: Option<Field> = None;
    let mut named: Vec<(String, Scalar)> = Vec::new();
    let mut vertices: Vec<String> = Vec::new();
    let mut arrows: Vec<ArrowSpec> = Vec::new();
    let mut relation_lines: Vec<(usize, Vec<Token>)> = Vec::new();
    let mut truncation = None;

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let toks = tokenize(strip_comment(raw), line, 0)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(&toks, line);
        let (kw, _, _) = cur.ident()?;
        match kw.as_str() {
            "field" => {
                let (name, _, _) = cur.ident()?;
                field = Some(match name.as_str() {
                    "Q" | "QQ" => Field::Rationals,
                    "GF" => {
                        cur.expect_sym("(")?;
                        let p = cur.integer()?;
                        cur.expect_sym(")")?;
                        let p = u64::try_from(p).unwrap_or(0);
                        if !is_prime(p) || p > MAX_PRIME as u64 {
                            return Err(ParseError::NonPrimeModulus(p));
                        }
                        Field::Prime(p as u32)
                    }
                    other => return cur.error(format!("unknown field `{other}`")),
                });
            }
            "unit" => {
                let f = field.ok_or(ParseError::Missing("field"))?;
                let (name, _, _) = cur.ident()?;
                cur.expect_sym("=")?;
                let negative = cur.is_sym("-");
                if negative {
                    cur.pos += 1;
                }
                let mut value = scalar_literal(&mut cur, f)?;
                if negative {
                    value = -value;
                }
                if value.is_zero() {
                    return Err(ParseError::ZeroUnit { line, name });
                }
                if named.iter().any(|(n, _)| *n == name) {
                    return Err(ParseError::DuplicateLabel { line, label: name });
                }
                named.push((name, value));
            }
            "vertex" | "vertices" => {
                while !cur.at_end() {
                    let (label, _, _) = cur.label()?;
                    if vertices.contains(&label) {
                        return Err(ParseError::DuplicateLabel { line, label });
                    }
                    vertices.push(label);
                    if cur.is_sym(",") {
                        cur.pos += 1;
                    }
                }
            }
            "arrow" => {
                let (label, _, _) = cur.ident()?;
                cur.expect_sym(":")?;
                let (s, _, _) = cur.label()?;
                cur.expect_sym("->")?;
                let (t, _, _) = cur.label()?;
                let source = vertices
                    .iter()
                    .position(|v| *v == s)
                    .ok_or_else(|| ParseError::UnknownVertex { line, label: s.clone() })?;
                let target = vertices
                    .iter()
                    .position(|v| *v == t)
                    .ok_or_else(|| ParseError::UnknownVertex { line, label: t.clone() })?;
                if arrows.iter().any(|a| a.label == label) || named.iter().any(|(n, _)| *n == label) {
                    return Err(ParseError::DuplicateLabel { line, label });
                }
                arrows.push(ArrowSpec { label, source, target });
            }
            "relation" => {
                relation_lines.push((line, toks[1..].to_vec()));
                cur.pos = toks.len();
            }
            "truncate" => {
                let d = cur.small_int()?;
                if d < 0 {
                    return cur.error("truncation degree must be nonnegative");
                }
                truncation = Some(d as usize);
            }
            other => return cur.error(format!("unknown statement `{other}`")),
        }
        if !cur.at_end() {
            return cur.error("trailing tokens");
        }
    }

    let field = FieldSpec {
        field: field.ok_or(ParseError::Missing("field"))?,
        named_scalars: named,
    };
    if vertices.is_empty() {
        return Err(ParseError::Missing("vertex"));
    }
    let quiver = QuiverSpec { vertices, arrows };
    let ctx = ExprContext {
        field: &field,
        quiver: &quiver,
    };
    let mut relations = Vec::new();
    for (line, toks) in relation_lines {
        let mut cur = Cursor::new(&toks, line);
        let rel = ctx.expr(&mut cur)?;
        if !cur.at_end() {
            return cur.error("trailing tokens in relation");
        }
        if rel.terms.iter().any(|(m, _)| m.length() != 2) {
            return Err(ParseError::NonQuadraticRelation { line });
        }
        if !check_path_validity(&rel, &quiver) {
            return Err(ParseError::MixedEndpoints { line });
        }
        if let Some((first, _)) = rel.terms.first() {
            let (s, t) = (first.source(&quiver), first.target(&quiver));
            if rel.terms.iter().any(|(m, _)| m.source(&quiver) != s || m.target(&quiver) != t) {
                return Err(ParseError::MixedEndpoints { line });
            }
        }
        if !rel.is_zero() && !relations.contains(&rel) {
            relations.push(rel);
        }
    }
    Ok(AlgebraPresentation {
        field,
        quiver,
        relations,
        truncation,
    })
}

fn parse_matrix<T>(
    cur: &mut Cursor,
    mut entry: impl FnMut(&mut Cursor) -> Result<T, ParseError>,
) -> Result<Vec<Vec<T>>, ParseError> {
    cur.expect_sym("[")?;
    let mut rows = Vec::new();
    loop {
        if cur.is_sym("]") {
            cur.pos += 1;
            break;
        }
        cur.expect_sym("[")?;
        let mut row = Vec::new();
        if !cur.is_sym("]") {
            loop {
                row.push(entry(cur)?);
                if cur.is_sym(",") {
                    cur.pos += 1;
                } else {
                    break;
                }
            }
        }
        cur.expect_sym("]")?;
        rows.push(row);
        if cur.is_sym(",") {
            cur.pos += 1;
        }
    }
    Ok(rows)
}

fn parse_list<T>(
    cur: &mut Cursor,
    mut entry: impl FnMut(&mut Cursor) -> Result<T, ParseError>,
) -> Result<Vec<T>, ParseError> {
    cur.expect_sym("[")?;
    let mut out = Vec::new();
    while !cur.is_sym("]") {
        out.push(entry(cur)?);
        if cur.is_sym(",") {
            cur.pos += 1;
        } else {
            break;
        }
    }
    cur.expect_sym("]")?;
    Ok(out)
}

/// Parses a module source file against an already parsed algebra.
pub fn parse_module(text: &str, algebra: &AlgebraPresentation) -> Result<ModulePresentation, ParseError> {
    let mut toks = Vec::new();
    let mut last_line = 1;
    for (ln, raw) in text.lines().enumerate() {
        toks.extend(tokenize(strip_comment(raw), ln + 1, 0)?);
        last_line = ln + 1;
    }
    let mut cur = Cursor::new(&toks, last_line);
    let quiver = &algebra.quiver;
    let field = algebra.field.field;
    let (kw, _, _) = cur.ident()?;
    if kw != "module" {
        return cur.error("expected `module`");
    }
    let (kind, _, _) = cur.ident()?;
    let vertex_of = |cur: &mut Cursor| -> Result<usize, ParseError> {
        let (label, line, col) = cur.label()?;
        quiver
            .vertex_index(&label)
            .ok_or(ParseError::UnknownGenerator { line, col, label })
    };
    let result = match kind.as_str() {
        "simple" => ModulePresentation::Simple {
            vertex: vertex_of(&mut cur)?,
        },
        "regular" => ModulePresentation::Regular,
        "bimodule" => {
            // `bimodule-regular` tokenizes as bimodule - regular
            cur.expect_sym("-")?;
            let (r, _, _) = cur.ident()?;
            if r != "regular" {
                return cur.error("expected `bimodule-regular`");
            }
            ModulePresentation::RegularBimodule
        }
        "cokernel" => {
            let ctx = ExprContext {
                field: &algebra.field,
                quiver,
            };
            let matrix = parse_matrix(&mut cur, |c| {
                let (line, col) = c.here();
                let e = ctx.expr(c)?;
                if !check_path_validity(&e, quiver) {
                    return Err(ParseError::EntryNotInAlgebra {
                        line,
                        col,
                        message: "not a path".into(),
                    });
                }
                Ok(e)
            })?;
            let nrows = matrix.len();
            let ncols = matrix.first().map_or(0, |r| r.len());
            if matrix.iter().any(|r| r.len() != ncols) {
                return Err(ParseError::ShapeMismatch("rows of the cokernel matrix differ in length".into()));
            }
            let mut degrees = vec![0; nrows];
            let mut vertices: Option<Vec<usize>> = None;
            while !cur.at_end() {
                let (word, _, _) = cur.ident()?;
                match word.as_str() {
                    "degrees" => {
                        degrees = parse_list(&mut cur, |c| c.small_int().map(|d| d as i32))?;
                    }
                    "vertices" => vertices = Some(parse_list(&mut cur, vertex_of)?),
                    other => return cur.error(format!("unexpected `{other}`")),
                }
            }
            if degrees.len() != nrows {
                return Err(ParseError::ShapeMismatch(format!(
                    "{} degrees for {} generators",
                    degrees.len(),
                    nrows
                )));
            }
            let vertices = match vertices {
                Some(v) => v,
                None => infer_row_vertices(&matrix, quiver)?,
            };
            if vertices.len() != nrows {
                return Err(ParseError::ShapeMismatch(format!(
                    "{} vertices for {} generators",
                    vertices.len(),
                    nrows
                )));
            }
            let matrix = restrict_rows(matrix, &vertices, quiver);
            ModulePresentation::Cokernel {
                matrix,
                degrees,
                vertices,
            }
        }
        "representation" => {
            let mut dims = Vec::new();
            let mut actions = Vec::new();
            while !cur.at_end() {
                let (word, _, _) = cur.ident()?;
                match word.as_str() {
                    "dim" => {
                        let v = vertex_of(&mut cur)?;
                        let d = cur.small_int()? as i32;
                        let n = cur.small_int()?;
                        if n < 0 {
                            return cur.error("negative dimension");
                        }
                        dims.push((v, d, n as usize));
                    }
                    "act" => {
                        let (label, line, col) = cur.ident()?;
                        let a = quiver
                            .arrow_index(&label)
                            .ok_or(ParseError::UnknownGenerator { line, col, label })?;
                        let d = cur.small_int()? as i32;
                        let m = parse_matrix(&mut cur, |c| scalar_literal(c, field))?;
                        actions.push((a, d, m));
                    }
                    other => return cur.error(format!("unexpected `{other}`")),
                }
            }
            dims.sort();
            actions.sort_by_key(|a| (a.0, a.1));
            let dim_of = |v: usize, d: i32| dims.iter().find(|x| x.0 == v && x.1 == d).map_or(0, |x| x.2);
            for (a, d, m) in &actions {
                let arrow = &quiver.arrows[*a];
                let rows = dim_of(arrow.target, d + 1);
                let cols = dim_of(arrow.source, *d);
                if m.len() != rows || m.iter().any(|r| r.len() != cols) {
                    return Err(ParseError::ShapeMismatch(format!(
                        "action of `{}` in degree {} must be {}x{}",
                        arrow.label, d, rows, cols
                    )));
                }
            }
            ModulePresentation::Representation { dims, actions }
        }
        other => return cur.error(format!("unknown module kind `{other}`")),
    };
    if !cur.at_end() {
        return cur.error("trailing tokens");
    }
    Ok(result)
}

fn infer_row_vertices(matrix: &[Vec<AlgElem>], quiver: &QuiverSpec) -> Result<Vec<usize>, ParseError> {
    if quiver.vertices.len() == 1 {
        return Ok(vec![0; matrix.len()]);
    }
    matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut sources = row
                .iter()
                .flat_map(|e| e.terms.iter().filter(|(m, _)| m.length() > 0).map(|(m, _)| m.source(quiver)));
            let first = sources.next().ok_or_else(|| {
                ParseError::ShapeMismatch(format!("cannot infer the vertex of generator {}; add `vertices [...]`", i + 1))
            })?;
            if sources.any(|s| s != first) {
                return Err(ParseError::ShapeMismatch(format!(
                    "entries of row {} start at different vertices",
                    i + 1
                )));
            }
            Ok(first)
        })
        .collect()
}

/// Keeps only the part `e_v · entry` of each row entry, `v` the row's vertex.
fn restrict_rows(matrix: Vec<Vec<AlgElem>>, vertices: &[usize], quiver: &QuiverSpec) -> Vec<Vec<AlgElem>> {
    matrix
        .into_iter()
        .zip(vertices)
        .map(|(row, &v)| {
            row.into_iter()
                .map(|e| {
                    AlgElem::from_terms(e.terms.into_iter().filter(|(m, _)| m.source(quiver) == v).collect())
                })
                .collect()
        })
        .collect()
}

impl AlgebraPresentation {
    /// Renders a normalized source text; `parse_algebra` of the output yields `self`.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "field {}", self.field.field);
        for (name, value) in &self.field.named_scalars {
            let _ = writeln!(out, "unit {name} = {value}");
        }
        let _ = writeln!(out, "vertex {}", self.quiver.vertices.join(" "));
        for a in &self.quiver.arrows {
            let _ = writeln!(
                out,
                "arrow {}: {} -> {}",
                a.label, self.quiver.vertices[a.source], self.quiver.vertices[a.target]
            );
        }
        for r in &self.relations {
            let _ = writeln!(out, "relation {}", r.render(&self.quiver));
        }
        if let Some(d) = self.truncation {
            let _ = writeln!(out, "truncate {d}");
        }
        out
    }

    pub fn field(&self) -> Field {
        self.field.field
    }

    /// Copy with a named unit replaced; relations are re-derived from `source`.
    pub fn with_unit(source: &str, name: &str, value: &str) -> Result<AlgebraPresentation, ParseError> {
        let mut out = String::new();
        let mut replaced = false;
        for line in source.lines() {
            let toks: Vec<&str> = strip_comment(line).split_whitespace().collect();
            if toks.len() >= 2 && toks[0] == "unit" && toks[1].trim_end_matches('=') == name {
                let _ = writeln!(out, "unit {name} = {value}");
                replaced = true;
            } else {
                let _ = writeln!(out, "{line}");
            }
        }
        if !replaced {
            return Err(ParseError::Missing("unit to override"));
        }
        parse_algebra(&out)
    }
}

impl ModulePresentation {
    pub fn to_source(&self, algebra: &AlgebraPresentation) -> String {
        let q = &algebra.quiver;
        match self {
            ModulePresentation::Simple { vertex } => format!("module simple {}\n", q.vertices[*vertex]),
            ModulePresentation::Regular => "module regular\n".into(),
            ModulePresentation::RegularBimodule => "module bimodule-regular\n".into(),
            ModulePresentation::Cokernel {
                matrix,
                degrees,
                vertices,
            } => {
                let rows: Vec<String> = matrix
                    .iter()
                    .map(|r| format!("[{}]", r.iter().map(|e| e.render(q)).collect::<Vec<_>>().join(", ")))
                    .collect();
                let degs: Vec<String> = degrees.iter().map(|d| d.to_string()).collect();
                let verts: Vec<String> = vertices.iter().map(|v| q.vertices[*v].clone()).collect();
                format!(
                    "module cokernel [{}] degrees [{}] vertices [{}]\n",
                    rows.join(", "),
                    degs.join(", "),
                    verts.join(", ")
                )
            }
            ModulePresentation::Representation { dims, actions } => {
                let mut out = String::from("module representation\n");
                for (v, d, n) in dims {
                    let _ = writeln!(out, "dim {} {} {}", q.vertices[*v], d, n);
                }
                for (a, d, m) in actions {
                    let rows: Vec<String> = m
                        .iter()
                        .map(|r| format!("[{}]", r.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")))
                        .collect();
                    let _ = writeln!(out, "act {} {} [{}]", q.arrows[*a].label, d, rows.join(", "));
                }
                out
            }
        }
    }
}

/// Map from arrow label to index, for callers assembling elements by hand.
pub fn arrow_lookup(quiver: &QuiverSpec) -> HashMap<String, usize> {
    quiver.arrows.iter().enumerate().map(|(i, a)| (a.label.clone(), i)).collect()
}

/// Parses a standalone algebra element such as `x + 2*y`.
pub fn parse_element(text: &str, algebra: &AlgebraPresentation) -> Result<AlgElem, ParseError> {
    let toks = tokenize(text, 1, 0)?;
    let mut cur = Cursor::new(&toks, 1);
    let ctx = ExprContext {
        field: &algebra.field,
        quiver: &algebra.quiver,
    };
    let e = ctx.expr(&mut cur)?;
    if !cur.at_end() {
        return cur.error("trailing tokens");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const QUANTUM_GF5: &str = "\
field GF(5)
unit q = 2
vertex 1
arrow x: 1 -> 1
arrow y: 1 -> 1
relation x*y - q*y*x
relation x*x
relation y*y
";

    #[test]
    fn quantum_plane_has_three_relations() {
        let p = parse_algebra(QUANTUM_GF5).unwrap();
        assert_eq!(p.relations.len(), 3);
        assert_eq!(p.field.field, Field::Prime(5));
        // x*y - 2*y*x normalizes with -2 = 3 in GF(5)
        assert_eq!(p.relations[0].render(&p.quiver), "x*y + 3*y*x");
    }

    #[test]
    fn free_loop_is_accepted() {
        let p = parse_algebra("field Q\nvertex a\narrow x: a -> a\ntruncate 4\n").unwrap();
        assert!(p.relations.is_empty());
        assert_eq!(p.truncation, Some(4));
    }

    #[test]
    fn cubic_relation_is_rejected() {
        let err = parse_algebra("field Q\nvertex a\narrow x: a -> a\nrelation x*y*x\n");
        // `y` is unknown, so use a valid cubic
        assert!(err.is_err());
        let err = parse_algebra("field Q\nvertex a\narrow x: a -> a\nrelation x*x*x\n").unwrap_err();
        assert_eq!(err, ParseError::NonQuadraticRelation { line: 4 });
    }

    #[test]
    fn grammar_errors() {
        assert_eq!(
            parse_algebra("field GF(6)\nvertex a\n").unwrap_err(),
            ParseError::NonPrimeModulus(6)
        );
        assert!(matches!(
            parse_algebra("field Q\nvertex a\narrow x: a -> b\n").unwrap_err(),
            ParseError::UnknownVertex { line: 3, .. }
        ));
        assert!(matches!(
            parse_algebra("field Q\nvertex a\narrow x: a -> a\nrelation x*x $\n").unwrap_err(),
            ParseError::SyntaxError { line: 4, col: 14, .. }
        ));
    }

    #[test]
    fn cokernel_modules() {
        let p = parse_algebra(QUANTUM_GF5).unwrap();
        let m = parse_module("module cokernel [[-y, 0], [x, q*y]]", &p).unwrap();
        match &m {
            ModulePresentation::Cokernel { matrix, degrees, vertices } => {
                assert_eq!(matrix.len(), 2);
                assert_eq!(degrees, &vec![0, 0]);
                assert_eq!(vertices, &vec![0, 0]);
            }
            _ => panic!("expected cokernel"),
        }
        let c = parse_module("module cokernel [[x+y]]", &p).unwrap();
        assert!(matches!(c, ModulePresentation::Cokernel { ref matrix, .. } if matrix.len() == 1));
        assert_eq!(parse_module("module simple 1", &p).unwrap(), ModulePresentation::Simple { vertex: 0 });
        assert!(matches!(
            parse_module("module simple 7", &p).unwrap_err(),
            ParseError::UnknownGenerator { .. }
        ));
        assert!(matches!(
            parse_module("module cokernel [[z]]", &p).unwrap_err(),
            ParseError::EntryNotInAlgebra { .. }
        ));
        assert!(matches!(
            parse_module("module cokernel [[x, y], [x]]", &p).unwrap_err(),
            ParseError::ShapeMismatch(_)
        ));
    }

    #[test]
    fn pretty_print_round_trip() {
        let p = parse_algebra(QUANTUM_GF5).unwrap();
        assert_eq!(parse_algebra(&p.to_source()).unwrap(), p);
        let m = parse_module("module cokernel [[-y, 0],\n [x, q*y]] degrees [0, 0]", &p).unwrap();
        assert_eq!(parse_module(&m.to_source(&p), &p).unwrap(), m);
        let r = parse_module(
            "module representation\ndim 1 0 1\ndim 1 1 1\nact x 0 [[1]]\nact y 0 [[0]]",
            &p,
        )
        .unwrap();
        assert_eq!(parse_module(&r.to_source(&p), &p).unwrap(), r);
    }

    #[test]
    fn unit_override() {
        let p = AlgebraPresentation::with_unit(QUANTUM_GF5, "q", "4").unwrap();
        assert_eq!(p.field.lookup("q"), Some(&Field::Prime(5).from_i64(4)));
    }
}
