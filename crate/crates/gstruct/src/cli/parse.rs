//! The line-oriented `.gs` input format.
//!
//! ```text
//! dim 7
//! frame e1 e2 e3 e4 e5 e6 e7
//! d e1 = e2^e3
//! structure g2 phi = e1^e4^e7 + e2^e5^e7 - e3^e6^e7 + e1^e2^e3 + e1^e5^e6 - e2^e4^e6 - e3^e4^e5
//! df = 0
//! ```
//!
//! Expressions are sums of products of rationals, `sqrtN` atoms and frame labels.
//! `*`, `/` and `^` share one precedence level and associate to the left; `^`
//! and `*` both wedge, so scalars and forms multiply freely. A literal `0`
//! stands for the zero form of whatever degree the directive expects.

use crate::exterior::{default_labels, KForm, VectorField};
use crate::g_structures::{GStructure, Kind, StructureError};
use crate::lie_frame::{LieAlgebraFrame, LieError};
use crate::linalg::Mat;
use crate::scalar::{Exact, Scalar};
use crate::space::Space;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// malformed text
    Syntax,
    /// well-formed text describing invalid geometry
    Structural,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub class: ErrorClass,
    pub code: String,
    pub message: String,
}

impl ParseError {
    fn syntax(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError { line, col, class: ErrorClass::Syntax, code: "parse::syntax".into(), message: message.into() }
    }
    fn structural(line: usize, code: &str, message: impl Into<String>) -> Self {
        ParseError { line, col: 1, class: ErrorClass::Structural, code: code.into(), message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

/// New coframe η^a = Σ_i rows[a][i] e^i.
#[derive(Clone, Debug, PartialEq)]
pub struct Coframe {
    pub labels: Vec<String>,
    pub rows: Mat<Exact>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureBlock {
    pub kind: Kind,
    pub forms: Vec<(String, KForm<Exact>)>,
}

#[derive(Clone, Debug, Default)]
struct Spans {
    d: Vec<usize>,
    coframe: usize,
    metric: usize,
    orientation: usize,
    structure: usize,
}

/// A parsed input file. Forms in the structure, vector and flux blocks are
/// written in the final coframe (after `coframe`, if present).
#[derive(Clone, Debug)]
pub struct Document {
    pub dim: usize,
    pub field: Vec<u64>,
    pub labels: Vec<String>,
    pub d: Vec<KForm<Exact>>,
    pub coframe: Option<Coframe>,
    pub metric: Option<Mat<Exact>>,
    pub orientation: Option<Vec<usize>>,
    pub structure: Option<StructureBlock>,
    pub vector: Option<VectorField<Exact>>,
    pub df: Option<KForm<Exact>>,
    pub flux: Option<KForm<Exact>>,
    spans: Spans,
}

impl PartialEq for Document {
    fn eq(&self, o: &Self) -> bool {
        self.dim == o.dim
            && self.field == o.field
            && self.labels == o.labels
            && self.d == o.d
            && self.coframe == o.coframe
            && self.metric == o.metric
            && self.orientation == o.orientation
            && self.structure == o.structure
            && self.vector == o.vector
            && self.df == o.df
            && self.flux == o.flux
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn lex(line: &str, lno: usize, offset: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = offset + i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Num(decimal(&text).ok_or_else(|| ParseError::syntax(lno, col, format!("malformed number '{text}'")))?), col });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), col });
        } else if "+-*/^()=,;".contains(c) {
            out.push(Token { tok: Tok::Op(c), col });
            i += 1;
        } else {
            return Err(ParseError::syntax(lno, col, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

fn decimal(text: &str) -> Option<BigRational> {
    let (int, frac) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if frac.contains('.') || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().ok()?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(n, d))
}

// ---------------------------------------------------------------------------
// Expressions

struct Ctx<'a> {
    labels: &'a [String],
    field: &'a [u64],
    line: usize,
}

struct ExprParser<'a> {
    toks: &'a [Token],
    pos: usize,
    ctx: &'a Ctx<'a>,
    end_col: usize,
}

fn squarefree(mut n: u64) -> u64 {
    let mut out = 1;
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= p;
        }
        p += 1;
    }
    out * n
}

fn primes(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl<'a> ExprParser<'a> {
    fn n(&self) -> usize {
        self.ctx.labels.len()
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.col).unwrap_or(self.end_col)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::syntax(self.ctx.line, self.col(), msg)
    }

    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some(Token { tok: Tok::Op(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<KForm<Exact>, ParseError> {
        let mut acc = self.product()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            let col = self.col();
            self.pos += 1;
            let rhs = self.product()?;
            let rhs = if c == '-' { -rhs } else { rhs };
            acc = add(acc, rhs).map_err(|m| ParseError::syntax(self.ctx.line, col, m))?;
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<KForm<Exact>, ParseError> {
        let mut acc = self.factor()?;
        while let Some(c @ ('*' | '/' | '^')) = self.peek_op() {
            let col = self.col();
            self.pos += 1;
            let rhs = self.factor()?;
            if c == '/' {
                if rhs.degree() != 0 && !rhs.is_zero() {
                    return Err(ParseError::syntax(self.ctx.line, col, "division by a form of positive degree"));
                }
                let inv = rhs.scalar_value().inv().ok_or_else(|| ParseError::syntax(self.ctx.line, col, "division by zero"))?;
                acc = acc.scale(&inv);
            } else {
                acc = if acc.is_zero() || rhs.is_zero() {
                    KForm::zero(self.n(), (acc.degree() + rhs.degree()).min(self.n()))
                } else {
                    acc.wedge(&rhs)
                };
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<KForm<Exact>, ParseError> {
        let n = self.n();
        let Some(t) = self.toks.get(self.pos) else {
            return Err(self.err("expression ended early"));
        };
        self.pos += 1;
        match &t.tok {
            Tok::Op('-') => Ok(-self.factor()?),
            Tok::Op('+') => self.factor(),
            Tok::Op('(') => {
                let v = self.sum()?;
                if self.peek_op() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Tok::Num(r) => Ok(KForm::constant(n, Exact::rational(r.clone()))),
            Tok::Ident(name) => {
                if let Some(d) = name.strip_prefix("sqrt").filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit())) {
                    let d: u64 = d.parse().map_err(|_| ParseError::syntax(self.ctx.line, t.col, format!("malformed scalar '{name}'")))?;
                    let s = squarefree(d);
                    let allowed: Vec<u64> = self.ctx.field.iter().flat_map(|&f| primes(f)).collect();
                    if s != 1 && !primes(s).iter().all(|p| allowed.contains(p)) {
                        return Err(ParseError::syntax(self.ctx.line, t.col, format!("malformed scalar '{name}': √{s} is outside the declared field")));
                    }
                    let v = Exact::sqrt_int(d).expect("square roots of integers are exact");
                    return Ok(KForm::constant(n, v));
                }
                match self.ctx.labels.iter().position(|l| l == name) {
                    Some(i) => Ok(KForm::basis(n, &[i])),
                    None => Err(ParseError::syntax(self.ctx.line, t.col, format!("unknown label '{name}'"))),
                }
            }
            Tok::Op(c) => Err(ParseError::syntax(self.ctx.line, t.col, format!("unexpected '{c}'"))),
        }
    }
}

fn add(a: KForm<Exact>, b: KForm<Exact>) -> Result<KForm<Exact>, String> {
    if a.is_zero() {
        return Ok(b);
    }
    if b.is_zero() {
        return Ok(a);
    }
    if a.degree() != b.degree() {
        return Err(format!("cannot add a {}-form and a {}-form", a.degree(), b.degree()));
    }
    Ok(a + b)
}

fn expr(toks: &[Token], ctx: &Ctx, end_col: usize) -> Result<KForm<Exact>, ParseError> {
    if toks.is_empty() {
        return Err(ParseError::syntax(ctx.line, end_col, "missing expression"));
    }
    let mut p = ExprParser { toks, pos: 0, ctx, end_col };
    let v = p.sum()?;
    if p.pos < toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

fn form_of_degree(toks: &[Token], ctx: &Ctx, end_col: usize, k: usize) -> Result<KForm<Exact>, ParseError> {
    let v = expr(toks, ctx, end_col)?;
    let n = ctx.labels.len();
    if v.is_zero() {
        return Ok(KForm::zero(n, k));
    }
    if v.degree() != k {
        return Err(ParseError::syntax(ctx.line, toks[0].col, format!("expected a {k}-form, found a {}-form", v.degree())));
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Directives

struct Line {
    no: usize,
    toks: Vec<Token>,
    end_col: usize,
}

impl Line {
    fn word(&self, i: usize) -> Option<&str> {
        match self.toks.get(i) {
            Some(Token { tok: Tok::Ident(s), .. }) => Some(s),
            _ => None,
        }
    }
    fn col(&self, i: usize) -> usize {
        self.toks.get(i).map(|t| t.col).unwrap_or(self.end_col)
    }
    fn err(&self, i: usize, msg: impl Into<String>) -> ParseError {
        ParseError::syntax(self.no, self.col(i), msg)
    }
    /// `<head...> = rhs` with the `=` at token `i`.
    fn rhs(&self, i: usize) -> Result<&[Token], ParseError> {
        match self.toks.get(i) {
            Some(Token { tok: Tok::Op('='), .. }) => Ok(&self.toks[i + 1..]),
            _ => Err(self.err(i, "expected '='")),
        }
    }
    fn integer(&self, i: usize) -> Result<u64, ParseError> {
        match self.toks.get(i) {
            Some(Token { tok: Tok::Num(r), .. }) if r.is_integer() && !r.numer().sign().eq(&num_bigint::Sign::Minus) => {
                r.numer().to_string().parse().map_err(|_| self.err(i, "integer out of range"))
            }
            _ => Err(self.err(i, "expected a nonnegative integer")),
        }
    }
    fn expect_end(&self, i: usize) -> Result<(), ParseError> {
        if i < self.toks.len() {
            Err(self.err(i, "unexpected trailing input"))
        } else {
            Ok(())
        }
    }
}

fn split_lines(text: &str) -> Result<Vec<Line>, ParseError> {
    let mut out = vec![];
    for (i, raw) in text.split('\n').enumerate() {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let body = raw.split('#').next().unwrap_or("");
        let toks = lex(body, i + 1, 0)?;
        if !toks.is_empty() {
            out.push(Line { no: i + 1, toks, end_col: body.chars().count() + 1 });
        }
    }
    Ok(out)
}

/// Parse raw bytes, rejecting invalid UTF-8 with the offending position.
pub fn parse_bytes(bytes: &[u8]) -> Result<Document, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(s) => parse(s),
        Err(e) => {
            let good = &bytes[..e.valid_up_to()];
            let line = good.iter().filter(|&&b| b == b'\n').count() + 1;
            let col = good.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
            Err(ParseError::syntax(line, col, "input is not valid UTF-8"))
        }
    }
}

fn check_label(line: &Line, i: usize, seen: &[String]) -> Result<String, ParseError> {
    let l = line.word(i).ok_or_else(|| line.err(i, "expected a label"))?;
    if l.starts_with("sqrt") && l[4..].chars().all(|c| c.is_ascii_digit()) {
        return Err(line.err(i, format!("'{l}' is reserved for scalars")));
    }
    if seen.iter().any(|s| s == l) {
        return Err(line.err(i, format!("duplicate label '{l}'")));
    }
    Ok(l.to_string())
}

/// Parse and validate a document: the frame must satisfy d² = 0 and the
/// structure block must define a structure of the stated kind.
pub fn parse(text: &str) -> Result<Document, ParseError> {
    let lines = split_lines(text)?;

    // pass 1: dimension, field, labels
    let mut dim: Option<(usize, usize)> = None;
    let mut field = vec![];
    let mut frame: Option<(Vec<String>, usize)> = None;
    let mut coframe_labels: Vec<(String, usize)> = vec![];
    for line in &lines {
        match line.word(0) {
            Some("dim") => {
                if dim.is_some() {
                    return Err(line.err(0, "dimension declared twice"));
                }
                let n = line.integer(1)? as usize;
                if !(1..=crate::exterior::MAX_DIM).contains(&n) {
                    return Err(line.err(1, format!("dimension must be between 1 and {}", crate::exterior::MAX_DIM)));
                }
                line.expect_end(2)?;
                dim = Some((n, line.no));
            }
            Some("field") => {
                if line.word(1) != Some("sqrt") {
                    return Err(line.err(1, "expected 'sqrt'"));
                }
                let d = line.integer(2)?;
                line.expect_end(3)?;
                let s = squarefree(d);
                if s == 1 {
                    return Err(line.err(2, format!("√{d} is rational")));
                }
                if !field.contains(&s) {
                    field.push(s);
                }
            }
            Some("frame") => {
                if frame.is_some() {
                    return Err(line.err(0, "frame declared twice"));
                }
                let mut labels = vec![];
                for i in 1..line.toks.len() {
                    let l = check_label(line, i, &labels)?;
                    labels.push(l);
                }
                frame = Some((labels, line.no));
            }
            Some("coframe") => {
                let seen: Vec<String> = coframe_labels.iter().map(|c| c.0.clone()).collect();
                let l = check_label(line, 1, &seen)?;
                line.rhs(2)?;
                coframe_labels.push((l, line.no));
            }
            _ => {}
        }
    }
    let Some((n, _)) = dim else {
        return Err(ParseError::syntax(lines.first().map(|l| l.no).unwrap_or(1), 1, "missing 'dim' directive"));
    };
    let labels = match frame {
        Some((labels, no)) => {
            if labels.len() != n {
                return Err(ParseError::syntax(no, 1, format!("frame lists {} labels for dimension {n}", labels.len())));
            }
            labels
        }
        None => default_labels(n),
    };
    if !coframe_labels.is_empty() && coframe_labels.len() != n {
        let no = coframe_labels.last().unwrap().1;
        return Err(ParseError::syntax(no, 1, format!("coframe defines {} of {n} covectors", coframe_labels.len())));
    }
    let final_labels: Vec<String> =
        if coframe_labels.is_empty() { labels.clone() } else { coframe_labels.iter().map(|c| c.0.clone()).collect() };

    // pass 2: expressions
    let mut doc = Document {
        dim: n,
        field,
        labels: labels.clone(),
        d: vec![KForm::zero(n, 2); n],
        coframe: None,
        metric: None,
        orientation: None,
        structure: None,
        vector: None,
        df: None,
        flux: None,
        spans: Spans { d: vec![0; n], ..Spans::default() },
    };
    let mut coframe_rows: Vec<Vec<Exact>> = vec![];
    for line in &lines {
        let base = Ctx { labels: &labels, field: &doc.field, line: line.no };
        let fin = Ctx { labels: &final_labels, field: &doc.field, line: line.no };
        match line.word(0) {
            Some("dim" | "field" | "frame") => {}
            Some("d") => {
                let l = line.word(1).ok_or_else(|| line.err(1, "expected a label"))?;
                let i = labels.iter().position(|x| x == l).ok_or_else(|| line.err(1, format!("unknown label '{l}'")))?;
                if doc.spans.d[i] != 0 {
                    return Err(line.err(1, format!("d {l} defined twice")));
                }
                doc.d[i] = form_of_degree(line.rhs(2)?, &base, line.end_col, 2)?;
                doc.spans.d[i] = line.no;
            }
            Some("coframe") => {
                let f = form_of_degree(line.rhs(2)?, &base, line.end_col, 1)?;
                coframe_rows.push(f.components());
                doc.spans.coframe = line.no;
            }
            Some("metric") => {
                if doc.spans.metric != 0 {
                    return Err(line.err(0, "metric declared twice"));
                }
                doc.spans.metric = line.no;
                match line.word(1) {
                    Some("identity") => line.expect_end(2)?,
                    Some("rows") => doc.metric = Some(metric_rows(line, &fin)?),
                    _ => return Err(line.err(1, "expected 'identity' or 'rows'")),
                }
            }
            Some("orientation") => {
                let mut perm = vec![];
                for i in 1..line.toks.len() {
                    let l = line.word(i).ok_or_else(|| line.err(i, "expected a label"))?;
                    let j = final_labels.iter().position(|x| x == l).ok_or_else(|| line.err(i, format!("unknown label '{l}'")))?;
                    if perm.contains(&j) {
                        return Err(line.err(i, format!("label '{l}' repeated")));
                    }
                    perm.push(j);
                }
                if perm.len() != n {
                    return Err(line.err(line.toks.len(), format!("orientation must list all {n} labels")));
                }
                doc.orientation = Some(perm);
                doc.spans.orientation = line.no;
            }
            Some("structure") => {
                let kname = line.word(1).ok_or_else(|| line.err(1, "expected a structure kind"))?;
                let kind = Kind::from_name(kname).ok_or_else(|| line.err(1, format!("unknown structure kind '{kname}' (ah, su3, g2, spin7)")))?;
                let name = line.word(2).ok_or_else(|| line.err(2, "expected a form name"))?;
                let degree = match (kind, name) {
                    (Kind::AlmostHermitian | Kind::SU3, "omega") => 2,
                    (Kind::SU3, "omega_plus") => 3,
                    (Kind::G2, "phi") => 3,
                    (Kind::Spin7, "psi") => 4,
                    _ => return Err(line.err(2, format!("'{name}' is not a {kind} form"))),
                };
                let f = form_of_degree(line.rhs(3)?, &fin, line.end_col, degree)?;
                let block = doc.structure.get_or_insert(StructureBlock { kind, forms: vec![] });
                if block.kind != kind {
                    return Err(line.err(1, format!("structure kind changes from {} to {kind}", block.kind)));
                }
                if block.forms.iter().any(|(m, _)| m == name) {
                    return Err(line.err(2, format!("{name} defined twice")));
                }
                block.forms.push((name.to_string(), f));
                if doc.spans.structure == 0 {
                    doc.spans.structure = line.no;
                }
            }
            Some("vector") => match line.word(1) {
                Some("V") => {
                    let f = form_of_degree(line.rhs(2)?, &fin, line.end_col, 1)?;
                    doc.vector = Some(VectorField::new(f.components()));
                }
                Some("df") => doc.df = Some(form_of_degree(line.rhs(2)?, &fin, line.end_col, 1)?),
                _ => return Err(line.err(1, "expected 'V' or 'df'")),
            },
            Some("df") => doc.df = Some(form_of_degree(line.rhs(1)?, &fin, line.end_col, 1)?),
            Some("flux") => {
                if line.word(1) != Some("F") {
                    return Err(line.err(1, "expected 'F'"));
                }
                doc.flux = Some(form_of_degree(line.rhs(2)?, &fin, line.end_col, 2)?);
            }
            Some(w) => return Err(line.err(0, format!("unknown directive '{w}'"))),
            None => return Err(line.err(0, "expected a directive")),
        }
    }
    if !coframe_rows.is_empty() {
        doc.coframe = Some(Coframe { labels: final_labels, rows: Mat::from_rows(coframe_rows) });
    }
    if let Some(s) = &doc.structure {
        let want: &[&str] = match s.kind {
            Kind::SU3 => &["omega", "omega_plus"],
            Kind::AlmostHermitian => &["omega"],
            Kind::G2 => &["phi"],
            Kind::Spin7 => &["psi"],
        };
        for w in want {
            if !s.forms.iter().any(|(m, _)| m == w) {
                return Err(ParseError::syntax(doc.spans.structure, 1, format!("{} structure is missing {w}", s.kind)));
            }
        }
    }
    doc.validate()?;
    Ok(doc)
}

fn metric_rows(line: &Line, ctx: &Ctx) -> Result<Mat<Exact>, ParseError> {
    let n = ctx.labels.len();
    let toks = &line.toks[2..];
    let mut rows = vec![];
    for row in toks.split(|t| t.tok == Tok::Op(';')) {
        let mut r = vec![];
        for entry in row.split(|t| t.tok == Tok::Op(',')) {
            let col = entry.first().map(|t| t.col).unwrap_or(line.end_col);
            let v = expr(entry, ctx, col)?;
            if v.degree() != 0 && !v.is_zero() {
                return Err(ParseError::syntax(line.no, col, "metric entries must be scalars"));
            }
            r.push(if v.is_zero() { Exact::zero() } else { v.scalar_value() });
        }
        if r.len() != n {
            return Err(line.err(2, format!("metric row has {} entries, expected {n}", r.len())));
        }
        rows.push(r);
    }
    if rows.len() != n {
        return Err(line.err(2, format!("metric has {} rows, expected {n}", rows.len())));
    }
    Ok(Mat::from_rows(rows))
}

/// Snake-case name of an enum variant from its Debug form.
pub(crate) fn variant_code<E: fmt::Debug>(module: &str, e: &E) -> String {
    let dbg = format!("{e:?}");
    let mut name: &str = dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("");
    // unwrap transparent wrappers such as Structure(Lie(Jacobi { .. }))
    let mut rest = dbg.as_str();
    let mut module = module.to_string();
    loop {
        let inner = rest.strip_prefix(name).and_then(|r| r.strip_prefix('('));
        let wrapper = match name {
            "Structure" => Some("g_structures"),
            "Lie" => Some("lie_frame"),
            "Exterior" => Some("exterior"),
            "Space" => Some("space"),
            "Soliton" => Some("soliton"),
            _ => None,
        };
        match (inner, wrapper) {
            (Some(r), Some(m)) => {
                rest = r;
                module = m.into();
                name = rest.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("");
            }
            _ => break,
        }
    }
    let mut snake = String::new();
    for (i, c) in name.chars().enumerate() {
        if c.is_uppercase() && i > 0 {
            snake.push('_');
        }
        snake.extend(c.to_lowercase());
    }
    format!("{module}::{snake}")
}

impl Document {
    /// Labels of the coframe the structure, vector and flux blocks use.
    pub fn final_labels(&self) -> &[String] {
        match &self.coframe {
            Some(c) => &c.labels,
            None => &self.labels,
        }
    }

    fn structural_lie(&self, e: LieError, line: usize) -> ParseError {
        let line = match &e {
            LieError::Jacobi { label, .. } => {
                self.labels.iter().position(|l| l == label).map(|i| self.spans.d[i]).filter(|&l| l > 0).unwrap_or(line)
            }
            _ => line,
        };
        ParseError::structural(line, &variant_code("lie_frame", &e), e.to_string())
    }

    /// The Lie frame in the final coframe, with metric and orientation applied.
    pub fn frame(&self) -> Result<LieAlgebraFrame<Exact>, ParseError> {
        let first = self.spans.d.iter().copied().find(|&l| l > 0).unwrap_or(1);
        let mut frame = LieAlgebraFrame::with_identity(self.labels.clone(), self.d.clone()).map_err(|e| self.structural_lie(e, first))?;
        if let Some(c) = &self.coframe {
            frame = frame.change_coframe(&c.rows, c.labels.clone()).map_err(|e| self.structural_lie(e, self.spans.coframe))?.0;
        }
        if self.metric.is_some() || self.orientation.is_some() {
            let metric = self.metric.clone().unwrap_or_else(|| frame.geometry().metric().clone());
            let orient = self.orientation.clone().unwrap_or_else(|| (0..self.dim).collect());
            let line = if self.metric.is_some() { self.spans.metric } else { self.spans.orientation };
            let geom = crate::exterior::FrameGeometry::new(metric, orient)
                .map_err(|e| ParseError::structural(line, &variant_code("exterior", &e), e.to_string()))?;
            frame = frame.with_geometry(geom).map_err(|e| self.structural_lie(e, line))?;
        }
        Ok(frame)
    }

    /// The structure on the full frame, if the document declares one.
    pub fn structure(&self) -> Result<Option<GStructure<Exact>>, ParseError> {
        let Some(block) = &self.structure else { return Ok(None) };
        let space = Space::full(self.frame()?);
        let get = |name: &str| block.forms.iter().find(|(m, _)| m == name).map(|(_, f)| f.clone()).expect("checked at parse time");
        let r: Result<GStructure<Exact>, StructureError> = match block.kind {
            Kind::AlmostHermitian => GStructure::almost_hermitian(space, get("omega")),
            Kind::SU3 => GStructure::su3(space, get("omega"), get("omega_plus")),
            Kind::G2 => GStructure::g2(space, get("phi")),
            Kind::Spin7 => GStructure::spin7(space, get("psi")),
        };
        r.map(Some).map_err(|e| ParseError::structural(self.spans.structure, &variant_code("g_structures", &e), e.to_string()))
    }

    fn validate(&self) -> Result<(), ParseError> {
        self.structure()?;
        if self.structure.is_none() {
            self.frame()?;
        }
        Ok(())
    }

    /// Canonical text; `parse(&doc.serialize())` reproduces `doc`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let base = &self.labels;
        let fin = self.final_labels();
        out.push_str(&format!("dim {}\n", self.dim));
        for d in &self.field {
            out.push_str(&format!("field sqrt {d}\n"));
        }
        out.push_str(&format!("frame {}\n", base.join(" ")));
        for (l, f) in base.iter().zip(&self.d) {
            if !f.is_zero() {
                out.push_str(&format!("d {l} = {}\n", f.render(base)));
            }
        }
        if let Some(c) = &self.coframe {
            for (a, l) in c.labels.iter().enumerate() {
                out.push_str(&format!("coframe {l} = {}\n", KForm::one_form(&c.rows.row(a)).render(base)));
            }
        }
        if let Some(m) = &self.metric {
            let rows: Vec<String> = (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.canonical()).collect::<Vec<_>>().join(", ")).collect();
            out.push_str(&format!("metric rows {}\n", rows.join("; ")));
        }
        if let Some(o) = &self.orientation {
            let ls: Vec<&str> = o.iter().map(|&i| fin[i].as_str()).collect();
            out.push_str(&format!("orientation {}\n", ls.join(" ")));
        }
        if let Some(s) = &self.structure {
            for (name, f) in &s.forms {
                out.push_str(&format!("structure {} {name} = {}\n", s.kind, f.render(fin)));
            }
        }
        if let Some(v) = &self.vector {
            out.push_str(&format!("vector V = {}\n", KForm::one_form(v.comps()).render(fin)));
        }
        if let Some(df) = &self.df {
            out.push_str(&format!("df = {}\n", df.render(fin)));
        }
        if let Some(f) = &self.flux {
            out.push_str(&format!("flux F = {}\n", f.render(fin)));
        }
        out
    }

    /// Parse an expression in the final coframe labels.
    pub fn form(&self, text: &str) -> Result<KForm<Exact>, ParseError> {
        let toks = lex(text, 1, 0)?;
        let ctx = Ctx { labels: self.final_labels(), field: &self.field, line: 1 };
        expr(&toks, &ctx, text.chars().count() + 1)
    }
}

/// Parse a standalone expression against the given labels, allowing any radical.
pub fn parse_expression(text: &str, labels: &[String]) -> Result<KForm<Exact>, ParseError> {
    let toks = lex(text, 1, 0)?;
    let all: Vec<u64> = (2..64).filter(|&p| primes(p) == vec![p]).collect();
    let ctx = Ctx { labels, field: &all, line: 1 };
    let v = expr(&toks, &ctx, text.chars().count() + 1)?;
    Ok(v)
}
