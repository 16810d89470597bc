//! Recursive-descent parser for the WHILE language.
//!
//! Grammar:
//!
//! ```text
//! program := "qubits" INT ";" stmt
//! stmt    := "skip" | "apply" GATE "(" targets ")" | "meas" "(" QUBIT ")"
//!          | stmt ";" stmt
//!          | "if" cond "then" "{" stmt "}" "else" "{" stmt "}"
//!          | "while" cond "do" "{" stmt "}"
//! cond    := QUBIT "==" ("0" | "1")
//! GATE    := "H" | "X" | "P" | "T" | "CNOT"
//! QUBIT   := "q" INT
//! targets := QUBIT {"," QUBIT}
//! ```
//!
//! Whitespace-insensitive; `;` sequences left-associatively; `#` starts a
//! line comment. Branch and loop bodies require braces.

use super::ast::{Cond, Program, Stmt};
use crate::state::Gate;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("syntax error at {line}:{col}: expected {expected}, found {found}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Int(usize),
    Semi,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    EqEq,
    Eof,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(s) => format!("{s:?}"),
            Token::Int(n) => format!("{n}"),
            Token::Semi => "\";\"".into(),
            Token::Comma => "\",\"".into(),
            Token::LParen => "\"(\"".into(),
            Token::RParen => "\")\"".into(),
            Token::LBrace => "\"{\"".into(),
            Token::RBrace => "\"}\"".into(),
            Token::EqEq => "\"==\"".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let b = *self.src.get(self.pos)?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn error(&self, expected: &str, found: String) -> SyntaxError {
        SyntaxError {
            line: self.line,
            col: self.col,
            expected: expected.into(),
            found,
        }
    }

    fn tokens(mut self) -> Result<Vec<(Token, usize, usize)>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            while let Some(b) = self.peek() {
                if b.is_ascii_whitespace() {
                    self.bump();
                } else if b == b'#' {
                    while let Some(b) = self.peek() {
                        if b == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(b) = self.peek() else {
                out.push((Token::Eof, line, col));
                return Ok(out);
            };
            let token = match b {
                b';' => {
                    self.bump();
                    Token::Semi
                }
                b',' => {
                    self.bump();
                    Token::Comma
                }
                b'(' => {
                    self.bump();
                    Token::LParen
                }
                b')' => {
                    self.bump();
                    Token::RParen
                }
                b'{' => {
                    self.bump();
                    Token::LBrace
                }
                b'}' => {
                    self.bump();
                    Token::RBrace
                }
                b'=' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Token::EqEq
                    } else {
                        return Err(self.error("\"==\"", "\"=\"".into()));
                    }
                }
                b'0'..=b'9' => {
                    let mut value = 0usize;
                    while let Some(d) = self.peek() {
                        if !d.is_ascii_digit() {
                            break;
                        }
                        value = value
                            .saturating_mul(10)
                            .saturating_add((d - b'0') as usize);
                        self.bump();
                    }
                    Token::Int(value)
                }
                b if b.is_ascii_alphabetic() => {
                    let start = self.pos;
                    while let Some(ch) = self.peek() {
                        if ch.is_ascii_alphanumeric() || ch == b'_' {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let word = std::str::from_utf8(&self.src[start..self.pos])
                        .expect("ascii slice")
                        .to_string();
                    Token::Ident(word)
                }
                other => {
                    return Err(self.error("a token", format!("{:?}", other as char)));
                }
            };
            out.push((token, line, col));
        }
    }
}

struct Parser {
    tokens: Vec<(Token, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, line, col) = self.tokens[self.pos];
        (line, col)
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> SyntaxError {
        let (line, col) = self.here();
        SyntaxError {
            line,
            col,
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, token: Token, expected: &str) -> Result<(), SyntaxError> {
        if self.peek() == &token {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<(), SyntaxError> {
        match self.peek() {
            Token::Ident(w) if w == word => {
                self.bump();
                Ok(())
            }
            _ => Err(self.error(&format!("\"{word}\""))),
        }
    }

    fn int(&mut self, expected: &str) -> Result<usize, SyntaxError> {
        match self.peek() {
            Token::Int(n) => {
                let n = *n;
                self.bump();
                Ok(n)
            }
            _ => Err(self.error(expected)),
        }
    }

    fn qubit(&mut self) -> Result<usize, SyntaxError> {
        match self.peek().clone() {
            Token::Ident(w) if w.starts_with('q') && w[1..].chars().all(|c| c.is_ascii_digit()) && w.len() > 1 =>
            {
                self.bump();
                Ok(w[1..].parse().expect("digits"))
            }
            _ => Err(self.error("a qubit like \"q0\"")),
        }
    }

    fn cond(&mut self) -> Result<Cond, SyntaxError> {
        let q = self.qubit()?;
        self.expect(Token::EqEq, "\"==\"")?;
        let v = self.int("\"0\" or \"1\"")?;
        if v > 1 {
            return Err(SyntaxError {
                line: self.tokens[self.pos - 1].1,
                col: self.tokens[self.pos - 1].2,
                expected: "\"0\" or \"1\"".into(),
                found: v.to_string(),
            });
        }
        Ok(Cond::new(q, v as u8))
    }

    fn braced_stmt(&mut self) -> Result<Stmt, SyntaxError> {
        self.expect(Token::LBrace, "\"{\"")?;
        let body = self.stmt()?;
        self.expect(Token::RBrace, "\"}\"")?;
        Ok(body)
    }

    /// Sequence of atomic statements joined by `;`, left-associative.
    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let mut acc = self.atomic_stmt()?;
        while self.peek() == &Token::Semi {
            self.bump();
            let next = self.atomic_stmt()?;
            acc = Stmt::seq(acc, next);
        }
        Ok(acc)
    }

    fn atomic_stmt(&mut self) -> Result<Stmt, SyntaxError> {
        match self.peek().clone() {
            Token::Ident(w) if w == "skip" => {
                self.bump();
                Ok(Stmt::Skip)
            }
            Token::Ident(w) if w == "apply" => {
                self.bump();
                let gate = match self.peek().clone() {
                    Token::Ident(name) => match Gate::from_name(&name) {
                        Some(g) => {
                            self.bump();
                            g
                        }
                        None => return Err(self.error("a gate (H, X, P, T, CNOT)")),
                    },
                    _ => return Err(self.error("a gate (H, X, P, T, CNOT)")),
                };
                self.expect(Token::LParen, "\"(\"")?;
                let mut targets = vec![self.qubit()?];
                while self.peek() == &Token::Comma {
                    self.bump();
                    targets.push(self.qubit()?);
                }
                self.expect(Token::RParen, "\")\"")?;
                Ok(Stmt::Apply(gate, targets))
            }
            Token::Ident(w) if w == "meas" => {
                self.bump();
                self.expect(Token::LParen, "\"(\"")?;
                let q = self.qubit()?;
                self.expect(Token::RParen, "\")\"")?;
                Ok(Stmt::Measure(q))
            }
            Token::Ident(w) if w == "if" => {
                self.bump();
                let cond = self.cond()?;
                self.expect_keyword("then")?;
                let then_branch = self.braced_stmt()?;
                self.expect_keyword("else")?;
                let else_branch = self.braced_stmt()?;
                Ok(Stmt::If(cond, Box::new(then_branch), Box::new(else_branch)))
            }
            Token::Ident(w) if w == "while" => {
                self.bump();
                let cond = self.cond()?;
                self.expect_keyword("do")?;
                let body = self.braced_stmt()?;
                Ok(Stmt::While(cond, Box::new(body)))
            }
            _ => Err(self.error("a statement (skip, apply, meas, if, while)")),
        }
    }

    fn program(&mut self) -> Result<Program, SyntaxError> {
        self.expect_keyword("qubits")?;
        let n = self.int("a qubit count")?;
        if n == 0 || n > 4 {
            return Err(SyntaxError {
                line: self.tokens[self.pos - 1].1,
                col: self.tokens[self.pos - 1].2,
                expected: "a qubit count between 1 and 4".into(),
                found: n.to_string(),
            });
        }
        self.expect(Token::Semi, "\";\"")?;
        let body = self.stmt()?;
        if self.peek() != &Token::Eof {
            return Err(self.error("end of input"));
        }
        if let Some(max) = body.max_qubit() {
            if max >= n {
                return Err(SyntaxError {
                    line: 1,
                    col: 1,
                    expected: format!("qubit indices below {n}"),
                    found: format!("q{max}"),
                });
            }
        }
        Ok(Program::new(n, body))
    }
}

/// Parses a full program: header plus statement.
pub fn parse(src: &str) -> Result<Program, SyntaxError> {
    let tokens = Lexer::new(src).tokens()?;
    Parser { tokens, pos: 0 }.program()
}
