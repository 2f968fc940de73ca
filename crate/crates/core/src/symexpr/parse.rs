//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' natural)?
//! base   := rational | identifier | '(' expr ')' | '-' factor
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use super::{CoordinatePatch, ScalarExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at column {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier `{name}` at column {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("non-rational function `{name}` at column {pos}: only rational expressions are supported")]
    NonRational { name: String, pos: usize },
    #[error("division by zero at column {pos}")]
    DivisionByZero { pos: usize },
}

impl ParseError {
    /// One-based column of the offending token.
    pub fn column(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownIdentifier { pos, .. }
            | ParseError::NonRational { pos, .. }
            | ParseError::DivisionByZero { pos } => *pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse::<BigInt>().expect("digits");
            out.push((Tok::Int(n), col));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        let t = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(ParseError::Syntax {
                    pos: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((t, col));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    patch: &'a CoordinatePatch,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        self.at += 1;
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc + self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc * self.factor()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let pos = self.pos();
                    let d = self.factor()?;
                    acc = acc.checked_div(&d).ok_or(ParseError::DivisionByZero { pos })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ScalarExpr, ParseError> {
        let base = self.base()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            match self.bump() {
                Some(Tok::Int(n)) => {
                    let e: u32 = n.try_into().or_else(|_| self.syntax::<u32>("exponent too large"))?;
                    return Ok(base.pow(e));
                }
                _ => {
                    self.at -= 1;
                    return self.syntax("expected a natural-number exponent after `^`");
                }
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<ScalarExpr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(ScalarExpr::constant(BigRational::from_integer(n))),
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    return Err(ParseError::NonRational { name, pos });
                }
                match self.patch.index_of(&name) {
                    Some(i) => Ok(ScalarExpr::var(i)),
                    None => Err(ParseError::UnknownIdentifier { name, pos }),
                }
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => {
                        self.at -= 1;
                        self.syntax("expected `)`")
                    }
                }
            }
            Some(Tok::Minus) => Ok(-self.factor()?),
            Some(_) => {
                self.at -= 1;
                self.syntax("expected a number, coordinate, `(` or `-`")
            }
            None => self.syntax("unexpected end of expression"),
        }
    }
}

/// Parse `text` over the coordinates of `patch` into canonical form.
pub fn parse_expr(text: &str, patch: &CoordinatePatch) -> Result<ScalarExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.chars().count() + 1,
        patch,
    };
    let e = p.expr()?;
    if p.at < p.toks.len() {
        return p.syntax("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> CoordinatePatch {
        CoordinatePatch::standard(2)
    }

    #[test]
    fn precedence() {
        let a = parse_expr("1 + 2*x1^2", &p()).unwrap();
        let b = parse_expr("(2*(x1^2)) + 1", &p()).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            parse_expr("-x1^2", &p()).unwrap(),
            parse_expr("-(x1*x1)", &p()).unwrap()
        );
        assert_eq!(parse_expr("3/4", &p()).unwrap(), ScalarExpr::rational(3, 4));
        assert_eq!(parse_expr("1/2*x1", &p()).unwrap(), parse_expr("x1/2", &p()).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_expr("x1 + y", &p()),
            Err(ParseError::UnknownIdentifier {
                name: "y".into(),
                pos: 6
            })
        );
        assert!(matches!(
            parse_expr("sin(x1)", &p()),
            Err(ParseError::NonRational { pos: 1, .. })
        ));
        assert!(matches!(
            parse_expr("x1 / (x2 - x2)", &p()),
            Err(ParseError::DivisionByZero { pos: 6 })
        ));
        assert!(matches!(
            parse_expr("x1 +", &p()),
            Err(ParseError::Syntax { pos: 5, .. })
        ));
        assert!(matches!(
            parse_expr("x1 x2", &p()),
            Err(ParseError::Syntax { pos: 4, .. })
        ));
        assert!(matches!(
            parse_expr("x1^x2", &p()),
            Err(ParseError::Syntax { pos: 4, .. })
        ));
        assert!(matches!(parse_expr("(x1", &p()), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse_expr("x1 $ 2", &p()),
            Err(ParseError::Syntax { pos: 4, .. })
        ));
    }

    #[test]
    fn whitespace_insignificant() {
        assert_eq!(
            parse_expr("  x1*  x2 ", &p()).unwrap(),
            parse_expr("x1*x2", &p()).unwrap()
        );
    }
}
