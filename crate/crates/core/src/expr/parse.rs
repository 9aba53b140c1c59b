//! Lexer and recursive-descent parser for function descriptions.
//!
//! ```text
//! # comment
//! param r = 1
//! f(x, y) = ((x + r*cos(y)) * cos(y), x^2 - 1/y)
//! ```
//!
//! Precedence from loosest to tightest: `+ -`, `* /`, unary minus, `^`.
//! Exponents must be integer literals, optionally negated.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{BinOp, Expr, Func, Literal};

/// What went wrong while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownIdentifier(String),
    Arity {
        func: String,
        expected: usize,
        found: usize,
    },
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "{msg}"),
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier `{name}`"),
            ParseErrorKind::Arity {
                func,
                expected,
                found,
            } => write!(f, "`{func}` takes {expected} argument(s), found {found}"),
        }
    }
}

/// Parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Sym(char),
    Newline,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut depth = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            if depth == 0 {
                out.push(Token {
                    tok: Tok::Newline,
                    line,
                    column: col,
                });
            }
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            Tok::Number(chars[start..i].iter().collect())
        } else if "+-*/^(),=".contains(c) {
            match c {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                _ => {}
            }
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(ParseError {
                line,
                column: col,
                kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
            });
        };
        col += i - start;
        out.push(Token {
            tok,
            line: tl,
            column: tc,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

/// Result of parsing: variable names, output expressions and parameters.
pub(crate) struct Parsed {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<Expr>,
    pub params: Vec<(String, Literal)>,
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    vars: Vec<String>,
    params: BTreeMap<String, Literal>,
}

const RESERVED: &[&str] = &["pi", "param", "atan2"];

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(tok: &Token, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: tok.line,
            column: tok.column,
            kind,
        }
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(Self::err_at(self.here(), ParseErrorKind::Syntax(msg.into())))
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            Ok(())
        } else {
            self.syntax(format!("expected `{c}`, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.next();
                Ok(name)
            }
            other => self.syntax(format!("expected identifier, found {}", describe(&other))),
        }
    }

    fn skip_newlines(&mut self) {
        while *self.peek() == Tok::Newline {
            self.next();
        }
    }

    fn end_of_statement(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Newline | Tok::Eof => Ok(()),
            other => self.syntax(format!("expected end of line, found {}", describe(other))),
        }
    }

    /// `[-] number`
    fn signed_literal(&mut self) -> Result<Literal, ParseError> {
        let negative = if *self.peek() == Tok::Sym('-') {
            self.next();
            true
        } else {
            false
        };
        let tok = self.here().clone();
        match tok.tok.clone() {
            Tok::Number(text) => {
                self.next();
                let text = if negative { format!("-{text}") } else { text };
                Literal::parse(&text).ok_or_else(|| {
                    Self::err_at(&tok, ParseErrorKind::Syntax(format!("malformed number `{text}`")))
                })
            }
            other => self.syntax(format!("expected number, found {}", describe(&other))),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Sym('-') => {
                self.next();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Sym('+') => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.next();
        let tok = self.here().clone();
        let parenthesized = *self.peek() == Tok::Sym('(');
        if parenthesized {
            self.next();
        }
        let lit = self.signed_literal()?;
        if parenthesized {
            self.expect_sym(')')?;
        }
        let n = lit
            .integer()
            .ok_or_else(|| Self::err_at(&tok, ParseErrorKind::Syntax("exponent must be an integer".into())))?;
        if *self.peek() == Tok::Sym('^') {
            return self.syntax("chained exponents need parentheses");
        }
        Ok(Expr::Pow(Box::new(base), n))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let tok = self.here().clone();
        match tok.tok.clone() {
            Tok::Number(_) => Ok(Expr::Num(self.signed_literal()?)),
            Tok::Sym('(') => {
                self.next();
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.next();
                if *self.peek() == Tok::Sym('(') {
                    return self.call(&tok, &name);
                }
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Expr::Var(i));
                }
                if name == "pi" {
                    return Ok(Expr::Pi);
                }
                if let Some(lit) = self.params.get(&name) {
                    return Ok(Expr::Param(name, lit.clone()));
                }
                if Func::from_name(&name).is_some() || name == "atan2" {
                    return Err(Self::err_at(
                        &tok,
                        ParseErrorKind::Syntax(format!("function `{name}` needs an argument list")),
                    ));
                }
                Err(Self::err_at(&tok, ParseErrorKind::UnknownIdentifier(name)))
            }
            other => self.syntax(format!("expected expression, found {}", describe(&other))),
        }
    }

    fn call(&mut self, tok: &Token, name: &str) -> Result<Expr, ParseError> {
        self.expect_sym('(')?;
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Sym(',') {
            self.next();
            args.push(self.expr()?);
        }
        self.expect_sym(')')?;
        let arity = |expected: usize| {
            if args.len() == expected {
                Ok(())
            } else {
                Err(Self::err_at(
                    tok,
                    ParseErrorKind::Arity {
                        func: name.to_string(),
                        expected,
                        found: args.len(),
                    },
                ))
            }
        };
        if name == "atan2" {
            arity(2)?;
            let x = args.pop().expect("two arguments");
            let y = args.pop().expect("two arguments");
            return Ok(Expr::Atan2(Box::new(y), Box::new(x)));
        }
        match Func::from_name(name) {
            Some(f) => {
                arity(1)?;
                Ok(Expr::Call(f, Box::new(args.pop().expect("one argument"))))
            }
            None => Err(Self::err_at(tok, ParseErrorKind::UnknownIdentifier(name.to_string()))),
        }
    }

    fn check_fresh(&self, tok: &Token, name: &str) -> Result<(), ParseError> {
        if RESERVED.contains(&name) || Func::from_name(name).is_some() {
            return Err(Self::err_at(
                tok,
                ParseErrorKind::Syntax(format!("`{name}` is reserved")),
            ));
        }
        Ok(())
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number(s) => format!("`{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Newline => "end of line".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses `text`; `overrides` replace or add parameters before the
/// expressions are read.
pub(crate) fn parse(text: &str, overrides: &[(String, Literal)]) -> Result<Parsed, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        vars: Vec::new(),
        params: BTreeMap::new(),
    };

    // First pass: parameters, and the position of the function statement.
    let mut declared = Vec::new();
    let mut function_start = None;
    loop {
        p.skip_newlines();
        if *p.peek() == Tok::Eof {
            break;
        }
        let tok = p.here().clone();
        if tok.tok == Tok::Ident("param".into()) {
            p.next();
            let name_tok = p.here().clone();
            let name = p.ident()?;
            p.check_fresh(&name_tok, &name)?;
            p.expect_sym('=')?;
            let lit = p.signed_literal()?;
            p.end_of_statement()?;
            if p.params.insert(name.clone(), lit).is_some() {
                return Err(Parser::err_at(
                    &name_tok,
                    ParseErrorKind::Syntax(format!("parameter `{name}` declared twice")),
                ));
            }
            declared.push(name);
        } else {
            if function_start.is_some() {
                return Err(Parser::err_at(
                    &tok,
                    ParseErrorKind::Syntax("only one function definition is allowed".into()),
                ));
            }
            function_start = Some(p.pos);
            while !matches!(p.peek(), Tok::Newline | Tok::Eof) {
                p.next();
            }
        }
    }
    for (name, lit) in overrides {
        if !p.params.contains_key(name) {
            declared.push(name.clone());
        }
        p.params.insert(name.clone(), lit.clone());
    }
    let Some(start) = function_start else {
        return Err(Parser::err_at(
            p.here(),
            ParseErrorKind::Syntax("missing function definition `f(x, ...) = (...)`".into()),
        ));
    };

    p.pos = start;
    let name = p.ident()?;
    p.expect_sym('(')?;
    loop {
        let tok = p.here().clone();
        let var = p.ident()?;
        p.check_fresh(&tok, &var)?;
        if p.vars.contains(&var) || p.params.contains_key(&var) {
            return Err(Parser::err_at(
                &tok,
                ParseErrorKind::Syntax(format!("`{var}` is declared twice")),
            ));
        }
        p.vars.push(var);
        if *p.peek() == Tok::Sym(',') {
            p.next();
            continue;
        }
        p.expect_sym(')')?;
        break;
    }
    p.expect_sym('=')?;
    p.expect_sym('(')?;
    let mut outputs = vec![p.expr()?];
    while *p.peek() == Tok::Sym(',') {
        p.next();
        outputs.push(p.expr()?);
    }
    p.expect_sym(')')?;
    p.end_of_statement()?;

    let params = declared
        .into_iter()
        .map(|n| {
            let lit = p.params[&n].clone();
            (n, lit)
        })
        .collect();
    Ok(Parsed {
        name,
        inputs: p.vars,
        outputs,
        params,
    })
}
