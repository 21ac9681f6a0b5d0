use std::fmt;

use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("empty formula")]
    Empty,
    #[error("unknown token {0:?}")]
    UnknownToken(String),
    #[error("expected {expected}, found {found}")]
    Unexpected {
        expected: &'static str,
        found: String,
    },
    #[error("expected {expected}, found end of input")]
    UnexpectedEnd { expected: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    Always,
    Eventually,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "identifier `{s}`"),
            Token::Bang => write!(f, "`!`"),
            Token::Amp => write!(f, "`&`"),
            Token::Pipe => write!(f, "`|`"),
            Token::Arrow => write!(f, "`->`"),
            Token::LParen => write!(f, "`(`"),
            Token::RParen => write!(f, "`)`"),
            Token::Always => write!(f, "`G`"),
            Token::Eventually => write!(f, "`F`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);

    while let Some(&c) = chars.peek() {
        let (start_line, start_col) = (line, column);
        let push = |out: &mut Vec<Spanned>, token| {
            out.push(Spanned {
                token,
                line: start_line,
                column: start_col,
            })
        };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    ident.push(d);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            let token = match ident.as_str() {
                "G" => Token::Always,
                "F" => Token::Eventually,
                _ => Token::Ident(ident),
            };
            push(&mut out, token);
            continue;
        }
        chars.next();
        column += 1;
        let token = match c {
            '!' => Token::Bang,
            '&' => Token::Amp,
            '|' => Token::Pipe,
            '(' => Token::LParen,
            ')' => Token::RParen,
            '-' if chars.peek() == Some(&'>') => {
                chars.next();
                column += 1;
                Token::Arrow
            }
            other => {
                let mut bad = other.to_string();
                if other == '-' {
                    if let Some(&next) = chars.peek() {
                        bad.push(next);
                    }
                }
                return Err(ParseError {
                    line: start_line,
                    column: start_col,
                    kind: ParseErrorKind::UnknownToken(bad),
                });
            }
        };
        push(&mut out, token);
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|s| &s.token)
    }

    fn error_here(&self, expected: &'static str) -> ParseError {
        match self.tokens.get(self.pos) {
            Some(s) => ParseError {
                line: s.line,
                column: s.column,
                kind: ParseErrorKind::Unexpected {
                    expected,
                    found: s.token.to_string(),
                },
            },
            None => ParseError {
                line: self.end.0,
                column: self.end.1,
                kind: ParseErrorKind::UnexpectedEnd { expected },
            },
        }
    }

    fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == Some(token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Token::Arrow) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Token::Pipe) {
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Token::Amp) {
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let Some(token) = self.peek().cloned() else {
            return Err(self.error_here("a formula"));
        };
        match token {
            Token::Bang => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Token::Always => {
                self.pos += 1;
                Ok(Formula::always(self.unary()?))
            }
            Token::Eventually => {
                self.pos += 1;
                Ok(Formula::eventually(self.unary()?))
            }
            Token::Ident(name) => {
                self.pos += 1;
                Ok(Formula::Atom(name))
            }
            Token::LParen => {
                self.pos += 1;
                let inner = self.implication()?;
                if !self.eat(&Token::RParen) {
                    return Err(self.error_here("`)`"));
                }
                Ok(inner)
            }
            _ => Err(self.error_here("a formula")),
        }
    }
}

/// Parses formula text into its syntax tree.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ParseError {
            line: 1,
            column: 1,
            kind: ParseErrorKind::Empty,
        });
    }
    let end = end_position(text);
    let mut parser = Parser {
        tokens,
        pos: 0,
        end,
    };
    let formula = parser.implication()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error_here("end of input"));
    }
    Ok(formula)
}

fn end_position(text: &str) -> (usize, usize) {
    let line = text.matches('\n').count() + 1;
    let column = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}
