//! Surface syntax: parsing and printing.
//!
//! One lexer serves five little grammars:
//!
//! * formulas — `*` (tensor), `|` (par), `+` (plus), `&` (with), `~x`
//!   (dual variable), `1`, `bot`, `top`, `0`; unary `~` binds tightest,
//!   then `*`/`&`, then `|`/`+`, all binary operators left-associative;
//! * sequents — comma-separated non-empty lists of formulas;
//! * Kleene algebra terms — `+`, `.`, postfix `*`, `1`, `0`; postfix `*`
//!   binds tightest, then `.`, then `+`;
//! * residuated terms — `.`, `\`, `/`, `\/`, `/\`, `1`, `0`, `top`; the
//!   divisions `\` and `/` sit at the loosest level and are
//!   *non-associative* (write parentheses), then `\/`/`/\`, then `.`;
//! * type-environment files — one `x : n -> m` binding per line, with `#`
//!   comments and blank lines.
//!
//! `bot` and `top` are keywords, so they are not available as variable
//! names.  Printing (`Display` on [`Formula`], [`Sequent`], [`KaTerm`],
//! [`RmTerm`]) is precedence-faithful with minimal parentheses, and
//! `parse(format(x)) == x` holds for every value (see the round-trip
//! tests).
//!
//! All parse errors carry a [`SourceSpan`] (1-based line and column) and
//! say what was expected and what was found instead.

use std::fmt;

use thiserror::Error;

use crate::kleene::KaTerm;
use crate::logic::{Formula, RmTerm, Sequent};
use crate::typecheck::{ObjectTerm, TypeEnv};

/// A location in parser input: 1-based line and column, and the length in
/// bytes of the offending slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

/// A parse error: where it happened, what the parser expected to see, and
/// what it found instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expected {expected}, found {found} at {}:{}", span.line, span.column)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

/// An error from [`parse_env`]: either a malformed line or a variable
/// bound twice.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("variable '{name}' bound twice at {}:{}", span.line, span.column)]
    DuplicateBinding { name: String, span: SourceSpan },
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    One,       // 1
    Zero,      // 0
    BotKw,     // bot
    TopKw,     // top
    Star,      // *
    Pipe,      // |
    Plus,      // +
    Amp,       // &
    Tilde,     // ~
    Dot,       // .
    Bslash,    // \
    Slash,     // /
    JoinOp,    // \/
    MeetOp,    // /\
    Turnstile, // |-
    Arrow,     // ->
    Colon,     // :
    Comma,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(x) => format!("identifier '{x}'"),
            Tok::One => "'1'".into(),
            Tok::Zero => "'0'".into(),
            Tok::BotKw => "'bot'".into(),
            Tok::TopKw => "'top'".into(),
            Tok::Star => "'*'".into(),
            Tok::Pipe => "'|'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Tilde => "'~'".into(),
            Tok::Dot => "'.'".into(),
            Tok::Bslash => "'\\'".into(),
            Tok::Slash => "'/'".into(),
            Tok::JoinOp => "'\\/'".into(),
            Tok::MeetOp => "'/\\'".into(),
            Tok::Turnstile => "'|-'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::Colon => "':'".into(),
            Tok::Comma => "','".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, column: 1 }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn span_here(&self, length: u32) -> SourceSpan {
        SourceSpan { line: self.line, column: self.column, length }
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
        let mut out = Vec::new();
        loop {
            // Skip whitespace and '#' line comments.
            while let Some(c) = self.peek() {
                if c.is_ascii_whitespace() {
                    self.bump();
                } else if c == b'#' {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let Some(c) = self.peek() else {
                out.push((Tok::Eof, self.span_here(0)));
                return Ok(out);
            };
            let span = self.span_here(1);
            let tok = match c {
                b'*' => {
                    self.bump();
                    Tok::Star
                }
                b'+' => {
                    self.bump();
                    Tok::Plus
                }
                b'&' => {
                    self.bump();
                    Tok::Amp
                }
                b'~' => {
                    self.bump();
                    Tok::Tilde
                }
                b'.' => {
                    self.bump();
                    Tok::Dot
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b':' => {
                    self.bump();
                    Tok::Colon
                }
                b'|' => {
                    self.bump();
                    if self.peek() == Some(b'-') {
                        self.bump();
                        Tok::Turnstile
                    } else {
                        Tok::Pipe
                    }
                }
                b'\\' => {
                    self.bump();
                    if self.peek() == Some(b'/') {
                        self.bump();
                        Tok::JoinOp
                    } else {
                        Tok::Bslash
                    }
                }
                b'/' => {
                    self.bump();
                    if self.peek() == Some(b'\\') {
                        self.bump();
                        Tok::MeetOp
                    } else {
                        Tok::Slash
                    }
                }
                b'-' => {
                    self.bump();
                    if self.peek() == Some(b'>') {
                        self.bump();
                        Tok::Arrow
                    } else {
                        return Err(ParseError {
                            span,
                            expected: "'->'".into(),
                            found: "'-'".into(),
                        });
                    }
                }
                b'0'..=b'9' => {
                    let start = self.pos;
                    while matches!(self.peek(), Some(b'0'..=b'9')) {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    match text {
                        "1" => Tok::One,
                        "0" => Tok::Zero,
                        _ => {
                            return Err(ParseError {
                                span: SourceSpan { length: text.len() as u32, ..span },
                                expected: "'0' or '1'".into(),
                                found: format!("number '{text}'"),
                            })
                        }
                    }
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = self.pos;
                    while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_')
                    {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    match text {
                        "bot" => Tok::BotKw,
                        "top" => Tok::TopKw,
                        _ => Tok::Ident(text.to_string()),
                    }
                }
                other => {
                    return Err(ParseError {
                        span,
                        expected: "a token".into(),
                        found: if other.is_ascii_graphic() {
                            format!("'{}'", other as char)
                        } else {
                            format!("byte 0x{other:02x}")
                        },
                    })
                }
            };
            out.push((tok, span));
        }
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn new(input: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: Lexer::new(input).tokenize()?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            span: self.span(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(x) => {
                let x = x.clone();
                self.bump();
                Ok(x)
            }
            _ => Err(self.error(what)),
        }
    }

    // -- formulas -----------------------------------------------------------

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.formula_mul()?;
        loop {
            match self.peek() {
                Tok::Pipe => {
                    self.bump();
                    acc = Formula::par(acc, self.formula_mul()?);
                }
                Tok::Plus => {
                    self.bump();
                    acc = Formula::plus(acc, self.formula_mul()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn formula_mul(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.formula_atom()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = Formula::tensor(acc, self.formula_atom()?);
                }
                Tok::Amp => {
                    self.bump();
                    acc = Formula::with(acc, self.formula_atom()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn formula_atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Ident(x) => {
                let f = Formula::Atom(x.clone());
                self.bump();
                Ok(f)
            }
            Tok::Tilde => {
                self.bump();
                Ok(Formula::Dual(self.ident("a variable after '~'")?))
            }
            Tok::One => {
                self.bump();
                Ok(Formula::One)
            }
            Tok::BotKw => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::Zero => {
                self.bump();
                Ok(Formula::Zero)
            }
            Tok::TopKw => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            _ => Err(self.error("a formula")),
        }
    }

    // -- Kleene algebra terms ------------------------------------------------

    fn ka_term(&mut self) -> Result<KaTerm, ParseError> {
        let mut acc = self.ka_dot()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            acc = KaTerm::plus(acc, self.ka_dot()?);
        }
        Ok(acc)
    }

    fn ka_dot(&mut self) -> Result<KaTerm, ParseError> {
        let mut acc = self.ka_star()?;
        while *self.peek() == Tok::Dot {
            self.bump();
            acc = KaTerm::dot(acc, self.ka_star()?);
        }
        Ok(acc)
    }

    fn ka_star(&mut self) -> Result<KaTerm, ParseError> {
        let mut acc = self.ka_atom()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = KaTerm::star(acc);
        }
        Ok(acc)
    }

    fn ka_atom(&mut self) -> Result<KaTerm, ParseError> {
        match self.peek() {
            Tok::Ident(x) => {
                let t = KaTerm::Var(x.clone());
                self.bump();
                Ok(t)
            }
            Tok::One => {
                self.bump();
                Ok(KaTerm::One)
            }
            Tok::Zero => {
                self.bump();
                Ok(KaTerm::Zero)
            }
            Tok::LParen => {
                self.bump();
                let t = self.ka_term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => Err(self.error("a term")),
        }
    }

    // -- residuated terms ----------------------------------------------------

    fn rm_term(&mut self) -> Result<RmTerm, ParseError> {
        let acc = self.rm_sum()?;
        // The divisions are non-associative: at most one at this level.
        match self.peek() {
            Tok::Bslash => {
                self.bump();
                Ok(RmTerm::ldiv(acc, self.rm_sum()?))
            }
            Tok::Slash => {
                self.bump();
                Ok(RmTerm::rdiv(acc, self.rm_sum()?))
            }
            _ => Ok(acc),
        }
    }

    fn rm_sum(&mut self) -> Result<RmTerm, ParseError> {
        let mut acc = self.rm_prod()?;
        loop {
            match self.peek() {
                Tok::JoinOp => {
                    self.bump();
                    acc = RmTerm::join(acc, self.rm_prod()?);
                }
                Tok::MeetOp => {
                    self.bump();
                    acc = RmTerm::meet(acc, self.rm_prod()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn rm_prod(&mut self) -> Result<RmTerm, ParseError> {
        let mut acc = self.rm_atom()?;
        while *self.peek() == Tok::Dot {
            self.bump();
            acc = RmTerm::dot(acc, self.rm_atom()?);
        }
        Ok(acc)
    }

    fn rm_atom(&mut self) -> Result<RmTerm, ParseError> {
        match self.peek() {
            Tok::Ident(x) => {
                let t = RmTerm::Var(x.clone());
                self.bump();
                Ok(t)
            }
            Tok::One => {
                self.bump();
                Ok(RmTerm::Unit)
            }
            Tok::Zero => {
                self.bump();
                Ok(RmTerm::Zero)
            }
            Tok::TopKw => {
                self.bump();
                Ok(RmTerm::Top)
            }
            Tok::LParen => {
                self.bump();
                let t = self.rm_term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => Err(self.error("a term")),
        }
    }
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

/// Parse a single formula.
pub fn parse_formula(input: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(input)?;
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

/// Parse a non-empty, comma-separated sequent.
pub fn parse_sequent(input: &str) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(input)?;
    let mut items = vec![p.formula()?];
    while *p.peek() == Tok::Comma {
        p.bump();
        items.push(p.formula()?);
    }
    p.expect_end()?;
    Ok(Sequent(items))
}

/// Parse a Kleene algebra term.
pub fn parse_ka_term(input: &str) -> Result<KaTerm, ParseError> {
    let mut p = Parser::new(input)?;
    let t = p.ka_term()?;
    p.expect_end()?;
    Ok(t)
}

/// Parse a residuated term.
pub fn parse_rm_term(input: &str) -> Result<RmTerm, ParseError> {
    let mut p = Parser::new(input)?;
    let t = p.rm_term()?;
    p.expect_end()?;
    Ok(t)
}

/// Parse a judgement `t1, ..., tk |- t` (the hypothesis list may be
/// empty: `|- t`).
pub fn parse_rm_judgement(input: &str) -> Result<(Vec<RmTerm>, RmTerm), ParseError> {
    let mut p = Parser::new(input)?;
    let mut hyps = Vec::new();
    if *p.peek() != Tok::Turnstile {
        hyps.push(p.rm_term()?);
        while *p.peek() == Tok::Comma {
            p.bump();
            hyps.push(p.rm_term()?);
        }
    }
    p.expect(Tok::Turnstile, "'|-'")?;
    let goal = p.rm_term()?;
    p.expect_end()?;
    Ok((hyps, goal))
}

/// Parse a type-environment file: one `x : n -> m` binding per line,
/// blank lines and `#` comments allowed.
///
/// Rejects a variable bound twice.
pub fn parse_env(input: &str) -> Result<TypeEnv, EnvError> {
    let mut p = Parser::new(input)?;
    let mut env = TypeEnv::new();
    while *p.peek() != Tok::Eof {
        let span = p.span();
        let name = p.ident("a variable binding or end of file")?;
        p.expect(Tok::Colon, "':'")?;
        let dom = p.ident("an object name")?;
        p.expect(Tok::Arrow, "'->'")?;
        let cod = p.ident("an object name")?;
        if env.get(&name).is_some() {
            return Err(EnvError::DuplicateBinding { name, span });
        }
        env.bind(&name, ObjectTerm::constant(&dom), ObjectTerm::constant(&cod));
    }
    Ok(env)
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

// Formula precedence levels: 1 for | and +, 2 for * and &, 3 for atoms.
fn formula_prec(f: &Formula) -> u8 {
    match f {
        Formula::Par(_, _) | Formula::Plus(_, _) => 1,
        Formula::Tensor(_, _) | Formula::With(_, _) => 2,
        _ => 3,
    }
}

fn fmt_formula(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = formula_prec(f);
    if prec < min {
        write!(out, "(")?;
    }
    match f {
        Formula::Atom(x) => write!(out, "{x}")?,
        Formula::Dual(x) => write!(out, "~{x}")?,
        Formula::One => write!(out, "1")?,
        Formula::Bot => write!(out, "bot")?,
        Formula::Zero => write!(out, "0")?,
        Formula::Top => write!(out, "top")?,
        Formula::Tensor(a, b) | Formula::Par(a, b) | Formula::Plus(a, b)
        | Formula::With(a, b) => {
            let op = match f {
                Formula::Tensor(_, _) => "*",
                Formula::Par(_, _) => "|",
                Formula::Plus(_, _) => "+",
                _ => "&",
            };
            // Left-associative: the left child may sit at the same level,
            // the right child must bind strictly tighter.
            fmt_formula(a, prec, out)?;
            write!(out, " {op} ")?;
            fmt_formula(b, prec + 1, out)?;
        }
    }
    if prec < min {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_formula(self, 0, f)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{item}")?;
        }
        Ok(())
    }
}

// Kleene term precedence: 1 for +, 2 for ., 3 for postfix *, 4 for atoms.
fn ka_prec(t: &KaTerm) -> u8 {
    match t {
        KaTerm::Plus(_, _) => 1,
        KaTerm::Dot(_, _) => 2,
        KaTerm::Star(_) => 3,
        _ => 4,
    }
}

fn fmt_ka(t: &KaTerm, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = ka_prec(t);
    if prec < min {
        write!(out, "(")?;
    }
    match t {
        KaTerm::Var(x) => write!(out, "{x}")?,
        KaTerm::One => write!(out, "1")?,
        KaTerm::Zero => write!(out, "0")?,
        KaTerm::Plus(a, b) => {
            fmt_ka(a, 1, out)?;
            write!(out, " + ")?;
            fmt_ka(b, 2, out)?;
        }
        KaTerm::Dot(a, b) => {
            fmt_ka(a, 2, out)?;
            write!(out, ".")?;
            fmt_ka(b, 3, out)?;
        }
        KaTerm::Star(a) => {
            fmt_ka(a, 3, out)?;
            write!(out, "*")?;
        }
    }
    if prec < min {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for KaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_ka(self, 0, f)
    }
}

// Residuated term precedence: 1 for \ and /, 2 for \/ and /\, 3 for .,
// 4 for atoms.
fn rm_prec(t: &RmTerm) -> u8 {
    match t {
        RmTerm::LDiv(_, _) | RmTerm::RDiv(_, _) => 1,
        RmTerm::Join(_, _) | RmTerm::Meet(_, _) => 2,
        RmTerm::Dot(_, _) => 3,
        _ => 4,
    }
}

fn fmt_rm(t: &RmTerm, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = rm_prec(t);
    if prec < min {
        write!(out, "(")?;
    }
    match t {
        RmTerm::Var(x) => write!(out, "{x}")?,
        RmTerm::Unit => write!(out, "1")?,
        RmTerm::Zero => write!(out, "0")?,
        RmTerm::Top => write!(out, "top")?,
        RmTerm::LDiv(a, b) | RmTerm::RDiv(a, b) => {
            let op = if matches!(t, RmTerm::LDiv(_, _)) { "\\" } else { "/" };
            // Non-associative: both children must bind strictly tighter.
            fmt_rm(a, 2, out)?;
            write!(out, " {op} ")?;
            fmt_rm(b, 2, out)?;
        }
        RmTerm::Join(a, b) | RmTerm::Meet(a, b) => {
            let op = if matches!(t, RmTerm::Join(_, _)) { "\\/" } else { "/\\" };
            fmt_rm(a, 2, out)?;
            write!(out, " {op} ")?;
            fmt_rm(b, 3, out)?;
        }
        RmTerm::Dot(a, b) => {
            fmt_rm(a, 3, out)?;
            write!(out, ".")?;
            fmt_rm(b, 4, out)?;
        }
    }
    if prec < min {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for RmTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rm(self, 0, f)
    }
}
