//! Reader for the textual polynomial grammar.
//!
//! ```text
//! poly   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*'? factor)*
//! factor := INT ['/' INT] | VAR ['^' INT]
//! ```
//!
//! A coefficient may be followed directly by a variable (`2x`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{ExactPoly, ExponentVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at column {pos}")]
    UnknownVariable { pos: usize, name: String },
    #[error("negative exponent at column {pos}")]
    NegativeExponent { pos: usize },
}

impl ParseError {
    /// 1-based column of the offending character.
    pub fn column(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownVariable { pos, .. }
            | ParseError::NegativeExponent { pos } => *pos,
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.column(),
            msg: msg.into(),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digits parse as integer"))
    }

    fn identifier(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier")
    }
}

/// Parses `text` as an exact polynomial over the ordered variable list `vars`.
pub fn parse_polynomial<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<ExactPoly, ParseError> {
    let arity = vars.len();
    let mut lx = Lexer {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        let sign = match lx.peek() {
            Some(b'+') => {
                lx.pos += 1;
                1
            }
            Some(b'-') => {
                lx.pos += 1;
                -1
            }
            None if first => return Err(lx.error("empty polynomial")),
            None => break,
            Some(_) if first => 1,
            Some(c) => return Err(lx.error(format!("expected `+` or `-`, found `{}`", c as char))),
        };
        first = false;
        let (coef, exps) = parse_term(&mut lx, vars)?;
        let coef = if sign < 0 { -coef } else { coef };
        terms.push((ExponentVector::new(exps), coef));
        if lx.peek().is_none() {
            break;
        }
    }
    Ok(ExactPoly::from_terms(arity, terms))
}

fn parse_term<S: AsRef<str>>(
    lx: &mut Lexer<'_>,
    vars: &[S],
) -> Result<(BigRational, Vec<u32>), ParseError> {
    let mut coef = BigRational::one();
    let mut exps = vec![0u32; vars.len()];
    let mut factors = 0;
    loop {
        match lx.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = lx.integer()?;
                let value = if lx.peek() == Some(b'/') {
                    lx.pos += 1;
                    let den = lx.integer()?;
                    if den.is_zero() {
                        return Err(lx.error("zero denominator"));
                    }
                    BigRational::new(num, den)
                } else {
                    BigRational::from_integer(num)
                };
                coef *= value;
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let col = lx.column();
                let name = lx.identifier();
                let idx = vars.iter().position(|v| v.as_ref() == name).ok_or_else(|| {
                    ParseError::UnknownVariable {
                        pos: col,
                        name: name.to_string(),
                    }
                })?;
                let mut power = 1u32;
                if lx.peek() == Some(b'^') {
                    lx.pos += 1;
                    match lx.peek() {
                        Some(b'-') => return Err(ParseError::NegativeExponent { pos: lx.column() }),
                        Some(b'+') => lx.pos += 1,
                        _ => {}
                    }
                    let p = lx.integer()?;
                    power = u32::try_from(p).map_err(|_| lx.error("exponent too large"))?;
                }
                exps[idx] += power;
            }
            Some(c) if factors == 0 => {
                return Err(lx.error(format!("expected a term, found `{}`", c as char)))
            }
            None if factors == 0 => return Err(lx.error("expected a term")),
            _ => return Err(lx.error("expected a factor")),
        }
        factors += 1;
        match lx.peek() {
            Some(b'*') => {
                lx.pos += 1;
            }
            Some(c) if c.is_ascii_alphanumeric() || c == b'_' => {}
            _ => break,
        }
    }
    Ok((coef, exps))
}
