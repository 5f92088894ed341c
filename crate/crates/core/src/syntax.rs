//! Lexer and literal parsers shared by the expression language and the
//! workspace format.
//!
//! Literal forms:
//!
//! ```text
//! signal     init 01 ; 1:11 ; 5/2:10
//! schedule   sched n=2 prefix[1:{1,2}] tail anchor=2 period=1 [0:{1}; 1/2:{2}]
//! function   n=2 m=1 ; x1' = !x2 & u1 ; x2' = x1 | u1
//! ```
//!
//! Times are integers, fractions `p/q` or finite decimals. `#` starts a
//! comment running to the end of the line.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::bits::BitVector;
use crate::error::{Location, ParseError};
use crate::genfn::{Expr, GeneratorFunction, ARITY_CAP};
use crate::rational::Rational;
use crate::schedule::{Event, Schedule};
use crate::signal::Signal;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Colon,
    Comma,
    Eq,
    Prime,
    Bang,
    Amp,
    Pipe,
    Caret,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) | Tok::Num(s) => return write!(f, "`{s}`"),
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Semi => "`;`",
            Tok::Colon => "`:`",
            Tok::Comma => "`,`",
            Tok::Eq => "`=`",
            Tok::Prime => "`'`",
            Tok::Bang => "`!`",
            Tok::Amp => "`&`",
            Tok::Pipe => "`|`",
            Tok::Caret => "`^`",
            Tok::Arrow => "`->`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub at: Location,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let at = Location { line, column };
        let start = i;
        let single = match c {
            '\n' => {
                i += 1;
                line += 1;
                column = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                column += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ';' => Some(Tok::Semi),
            ':' => Some(Tok::Colon),
            ',' => Some(Tok::Comma),
            '=' => Some(Tok::Eq),
            '\'' => Some(Tok::Prime),
            '!' => Some(Tok::Bang),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        let tok = if let Some(tok) = single {
            i += 1;
            tok
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            i += 2;
            Tok::Arrow
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && (chars[i] == '/' || chars[i] == '.') && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            Tok::Num(chars[start..i].iter().collect())
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-') {
                // `-` inside identifiers, but never the start of `->`
                if chars[i] == '-' && chars.get(i + 1) == Some(&'>') {
                    break;
                }
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            return Err(ParseError::Syntax {
                at,
                message: format!("unexpected character `{c}`"),
            });
        };
        column += i - start;
        tokens.push(Token { tok, at });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        at: Location { line, column },
    });
    Ok(tokens)
}

/// Recursive-descent cursor over a token list.
pub struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: tokenize(text)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    pub fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    pub fn location(&self) -> Location {
        self.tokens[self.pos].at
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn bump(&mut self) -> Token {
        let token = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        token
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            at: self.location(),
            message: message.into(),
        }
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        self.error(format!("expected {wanted}, found {}", self.peek()))
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<Location, ParseError> {
        if self.peek() == tok {
            Ok(self.bump().at)
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    pub fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    pub fn expect_keyword(&mut self, word: &str) -> Result<(), ParseError> {
        if self.is_keyword(word) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    pub fn ident(&mut self) -> Result<(String, Location), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().at)),
            _ => Err(self.unexpected("a name")),
        }
    }

    fn number_text(&mut self, wanted: &str) -> Result<(String, Location), ParseError> {
        match self.peek().clone() {
            Tok::Num(s) => Ok((s, self.bump().at)),
            _ => Err(self.unexpected(wanted)),
        }
    }

    pub fn rational(&mut self) -> Result<Rational, ParseError> {
        let (text, at) = self.number_text("a time")?;
        text.parse().map_err(|_| ParseError::Syntax {
            at,
            message: format!("malformed time `{text}`"),
        })
    }

    pub fn bits(&mut self) -> Result<BitVector, ParseError> {
        let (text, at) = self.number_text("a bit vector")?;
        text.parse().map_err(|_| ParseError::Syntax {
            at,
            message: format!("malformed bit vector `{text}`"),
        })
    }

    pub fn natural(&mut self) -> Result<usize, ParseError> {
        let (text, at) = self.number_text("a count")?;
        text.parse().map_err(|_| ParseError::Syntax {
            at,
            message: format!("malformed count `{text}`"),
        })
    }

    /// `key=<natural>`
    pub fn assignment(&mut self, key: &str) -> Result<usize, ParseError> {
        self.expect_keyword(key)?;
        self.expect(&Tok::Eq)?;
        self.natural()
    }

    /// `init <bits> (; <time>:<bits>)*`. A `;` not followed by `<time>:`
    /// ends the literal and is left in place.
    pub fn signal(&mut self) -> Result<Signal, ParseError> {
        let start = self.location();
        self.expect_keyword("init")?;
        let initial = self.bits()?;
        let mut raw = Vec::new();
        while *self.peek() == Tok::Semi
            && matches!(self.peek_at(1), Tok::Num(_))
            && *self.peek_at(2) == Tok::Colon
        {
            self.bump();
            let at = self.location();
            let t = self.rational()?;
            self.expect(&Tok::Colon)?;
            let v = self.bits()?;
            if v.width() != initial.width() {
                return Err(ParseError::Syntax {
                    at,
                    message: format!("switch value {v} has width {}, expected {}", v.width(), initial.width()),
                });
            }
            raw.push((t, v));
        }
        Signal::canonicalize(initial, raw).map_err(|e| ParseError::Syntax {
            at: start,
            message: e.to_string(),
        })
    }

    fn fire_set(&mut self, width: usize) -> Result<BitVector, ParseError> {
        self.expect(&Tok::LBrace)?;
        let mut set = BitVector::zeros(width).map_err(|e| self.error(e.to_string()))?;
        loop {
            let at = self.location();
            let i = self.natural()?;
            if i == 0 || i > width {
                return Err(ParseError::Syntax {
                    at,
                    message: format!("coordinate {i} outside 1..={width}"),
                });
            }
            set = set.with(i, true);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::RBrace)?;
        Ok(set)
    }

    fn event_list(&mut self, width: usize) -> Result<Vec<Event>, ParseError> {
        self.expect(&Tok::LBracket)?;
        let mut events = Vec::new();
        while *self.peek() != Tok::RBracket {
            let t = self.rational()?;
            self.expect(&Tok::Colon)?;
            events.push((t, self.fire_set(width)?));
            if !self.eat(&Tok::Semi) {
                break;
            }
        }
        self.expect(&Tok::RBracket)?;
        Ok(events)
    }

    /// `sched n=<n> prefix[...] tail anchor=<t> period=<p> [...]`
    pub fn schedule(&mut self) -> Result<Schedule, ParseError> {
        let start = self.location();
        self.expect_keyword("sched")?;
        let width = self.assignment("n")?;
        if width == 0 || width > crate::bits::MAX_WIDTH {
            return Err(ParseError::Arity {
                at: start,
                message: format!("schedule width {width} outside 1..=64"),
            });
        }
        self.expect_keyword("prefix")?;
        let prefix = self.event_list(width)?;
        self.expect_keyword("tail")?;
        self.expect_keyword("anchor")?;
        self.expect(&Tok::Eq)?;
        let anchor = self.rational()?;
        self.expect_keyword("period")?;
        self.expect(&Tok::Eq)?;
        let period = self.rational()?;
        let pattern = self.event_list(width)?;
        Schedule::new(width, prefix, anchor, period, pattern).map_err(|e| ParseError::Syntax {
            at: start,
            message: e.to_string(),
        })
    }

    /// `n=<n> m=<m> (; x<i>' = <expr>)*`, up to a closing `}` or the end of
    /// input.
    pub fn genfn(&mut self) -> Result<GeneratorFunction, ParseError> {
        let start = self.location();
        let n = self.assignment("n")?;
        let m = self.assignment("m")?;
        if n == 0 || m == 0 {
            return Err(ParseError::Arity {
                at: start,
                message: "state and input widths must be positive".into(),
            });
        }
        if n + m > ARITY_CAP {
            return Err(ParseError::Arity {
                at: start,
                message: format!("n+m = {} exceeds the cap of {ARITY_CAP}", n + m),
            });
        }
        let mut coords: Vec<Option<Expr>> = alloc::vec![None; n];
        while self.eat(&Tok::Semi) {
            if matches!(self.peek(), Tok::RBrace | Tok::Eof) {
                break;
            }
            let (name, at) = self.ident()?;
            let i = match variable(&name) {
                Some(('x', i)) if (1..=n).contains(&i) => i,
                Some(('x', i)) => {
                    return Err(ParseError::Arity {
                        at,
                        message: format!("coordinate x{i} outside 1..={n}"),
                    })
                }
                _ => return Err(ParseError::Syntax { at, message: format!("expected x<i>', found `{name}`") }),
            };
            self.expect(&Tok::Prime)?;
            self.expect(&Tok::Eq)?;
            let expr = self.expr(n, m)?;
            if coords[i - 1].replace(expr).is_some() {
                return Err(ParseError::Arity {
                    at,
                    message: format!("x{i}' defined twice"),
                });
            }
        }
        let mut exprs = Vec::with_capacity(n);
        for (k, e) in coords.into_iter().enumerate() {
            match e {
                Some(e) => exprs.push(e),
                None => {
                    return Err(ParseError::Arity {
                        at: self.location(),
                        message: format!("x{}' is not defined", k + 1),
                    })
                }
            }
        }
        GeneratorFunction::from_exprs(n, m, exprs).map_err(|e| ParseError::Arity {
            at: start,
            message: e.to_string(),
        })
    }

    pub fn expr(&mut self, n: usize, m: usize) -> Result<Expr, ParseError> {
        let mut lhs = self.xor_expr(n, m)?;
        while self.eat(&Tok::Pipe) {
            lhs = Expr::Or(Box::new(lhs), Box::new(self.xor_expr(n, m)?));
        }
        Ok(lhs)
    }

    fn xor_expr(&mut self, n: usize, m: usize) -> Result<Expr, ParseError> {
        let mut lhs = self.and_expr(n, m)?;
        while self.eat(&Tok::Caret) {
            lhs = Expr::Xor(Box::new(lhs), Box::new(self.and_expr(n, m)?));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self, n: usize, m: usize) -> Result<Expr, ParseError> {
        let mut lhs = self.unary(n, m)?;
        while self.eat(&Tok::Amp) {
            lhs = Expr::And(Box::new(lhs), Box::new(self.unary(n, m)?));
        }
        Ok(lhs)
    }

    fn unary(&mut self, n: usize, m: usize) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Bang) {
            return Ok(Expr::Not(Box::new(self.unary(n, m)?)));
        }
        let at = self.location();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.expr(n, m)?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Num(s) if s == "0" || s == "1" => {
                self.bump();
                Ok(Expr::Const(s == "1"))
            }
            Tok::Ident(name) => {
                self.bump();
                match variable(&name) {
                    Some(('x', i)) if (1..=n).contains(&i) => Ok(Expr::State(i)),
                    Some(('u', i)) if (1..=m).contains(&i) => Ok(Expr::Input(i)),
                    _ => Err(ParseError::UnknownVariable { at, name }),
                }
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

/// Splits `x12` into `('x', 12)`.
fn variable(name: &str) -> Option<(char, usize)> {
    let mut chars = name.chars();
    let kind = chars.next()?;
    let rest = chars.as_str();
    if !(kind == 'x' || kind == 'u') || rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().map(|i| (kind, i))
}

fn whole<T>(text: &str, f: impl FnOnce(&mut Parser) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut p = Parser::new(text)?;
    let value = f(&mut p)?;
    if !p.at_eof() {
        return Err(p.unexpected("end of input"));
    }
    Ok(value)
}

pub fn parse_signal(text: &str) -> Result<Signal, ParseError> {
    whole(text, Parser::signal)
}

pub fn parse_schedule(text: &str) -> Result<Schedule, ParseError> {
    whole(text, Parser::schedule)
}

pub fn parse_genfn(text: &str) -> Result<GeneratorFunction, ParseError> {
    whole(text, Parser::genfn)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_arrows_numbers_and_comments() {
        let toks: Vec<Tok> = tokenize("a -> -1/2 # note\n x1' 3.5")
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .collect();
        assert_eq!(
            toks,
            alloc::vec![
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Num("-1/2".into()),
                Tok::Ident("x1".into()),
                Tok::Prime,
                Tok::Num("3.5".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn reports_locations() {
        let err = parse_signal("init 0 ;\n 1:1 ; 2:11").unwrap_err();
        assert_eq!(err.location(), Some(Location { line: 2, column: 8 }));
        let err = tokenize("init $").unwrap_err();
        assert_eq!(err.location(), Some(Location { line: 1, column: 6 }));
    }

    #[test]
    fn signal_literal_with_decimal_times() {
        let s = parse_signal("init 0 ; 0.5:1 ; 3/2:0").unwrap();
        assert_eq!(s.switches().len(), 2);
        assert_eq!(s.switches()[0].0, Rational::new(1, 2));
        assert!(parse_signal("init 0 ; 2:1 ; 1:0").is_err());
        assert!(parse_signal("init 0 ; 2:1 extra").is_err());
    }

    #[test]
    fn genfn_errors() {
        assert!(matches!(
            parse_genfn("n=1 m=1 ; x1' = u7"),
            Err(ParseError::UnknownVariable { .. })
        ));
        assert!(matches!(
            parse_genfn("n=2 m=1 ; x1' = u1"),
            Err(ParseError::Arity { .. })
        ));
        assert!(matches!(
            parse_genfn("n=1 m=1 ; x1' = u1 ; x1' = 0"),
            Err(ParseError::Arity { .. })
        ));
        assert!(matches!(
            parse_genfn("n=1 m=1 ; x2' = u1"),
            Err(ParseError::Arity { .. })
        ));
        assert!(matches!(
            parse_genfn("n=15 m=6 ; x1' = u1"),
            Err(ParseError::Arity { .. })
        ));
        assert!(matches!(
            parse_genfn("n=1 m=1 ; x1' = (u1"),
            Err(ParseError::Syntax { .. })
        ));
    }
}
