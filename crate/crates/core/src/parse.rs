//! Recursive-descent parser for polynomial expressions over a [`Chart`].
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-'? atom ('^' uint)?
//! atom   := rational | variable | '(' expr ')'
//! ```
//!
//! Rational literals are integers, `int/positive-int`, or decimals
//! (`0.25` is read as exactly `1/4`). Variables are canonical chart names
//! (`x2_1`, `q1`) or chart aliases. Implicit multiplication is rejected.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::chart::Chart;
use crate::poly::{PolyError, Polynomial, MAX_DEGREE};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    Lexical(char),
    #[error("non-ASCII input")]
    NonAscii,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("negative exponent")]
    NegativeExponent,
    #[error("exponent {0} exceeds the per-variable degree cap")]
    ExponentTooLarge(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed number")]
    MalformedNumber,
    #[error("unbalanced parentheses")]
    UnbalancedParens,
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error("{0}")]
    Poly(PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(_) => "number".into(),
            Token::Ident(s) => format!("`{s}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Caret => "`^`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    if let Some(offset) = text.bytes().position(|b| !b.is_ascii()) {
        return Err(ParseError {
            kind: ParseErrorKind::NonAscii,
            offset,
        });
    }
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        let start = pos;
        let simple = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                pos += 1;
                continue;
            }
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((tok, start));
            pos += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let (value, end) = lex_number(bytes, pos)?;
            out.push((Token::Number(value), start));
            pos = end;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            out.push((Token::Ident(text[start..pos].to_string()), start));
        } else {
            return Err(ParseError {
                kind: ParseErrorKind::Lexical(c as char),
                offset: start,
            });
        }
    }
    out.push((Token::End, bytes.len()));
    Ok(out)
}

fn digits_end(bytes: &[u8], mut pos: usize) -> usize {
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        pos += 1;
    }
    pos
}

fn lex_number(bytes: &[u8], start: usize) -> Result<(Rational, usize), ParseError> {
    let malformed = |offset| ParseError {
        kind: ParseErrorKind::MalformedNumber,
        offset,
    };
    let int_end = digits_end(bytes, start);
    let int_part = std::str::from_utf8(&bytes[start..int_end]).expect("ascii");
    if bytes.get(int_end) == Some(&b'.') {
        let frac_end = digits_end(bytes, int_end + 1);
        let frac = std::str::from_utf8(&bytes[int_end + 1..frac_end]).expect("ascii");
        if int_part.is_empty() && frac.is_empty() {
            return Err(malformed(start));
        }
        let digits = format!("{int_part}{frac}");
        let numer: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| malformed(start))?
        };
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        return Ok((Rational::new(numer, denom), frac_end));
    }
    let numer: BigInt = int_part.parse().map_err(|_| malformed(start))?;
    // `a/b` is only a literal when a digit follows the slash.
    if bytes.get(int_end) == Some(&b'/') {
        let den_end = digits_end(bytes, int_end + 1);
        if den_end == int_end + 1 {
            return Err(malformed(int_end));
        }
        let denom: BigInt = std::str::from_utf8(&bytes[int_end + 1..den_end])
            .expect("ascii")
            .parse()
            .map_err(|_| malformed(int_end + 1))?;
        if denom.is_zero() {
            return Err(ParseError {
                kind: ParseErrorKind::ZeroDenominator,
                offset: int_end + 1,
            });
        }
        return Ok((Rational::new(numer, denom), den_end));
    }
    Ok((Rational::from_integer(numer), int_end))
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    chart: &'a Chart,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Token, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            offset: self.offset(),
        }
    }

    fn poly_err(&self, offset: usize, e: PolyError) -> ParseError {
        let kind = match e {
            PolyError::DegreeOverflow { degree, .. } => ParseErrorKind::ExponentTooLarge(degree.to_string()),
            other => ParseErrorKind::Poly(other),
        };
        ParseError { kind, offset }
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            let negate = match self.peek() {
                Token::Plus => false,
                Token::Minus => true,
                _ => return Ok(acc),
            };
            self.bump();
            let rhs = self.term()?;
            acc = if negate { &acc - &rhs } else { &acc + &rhs };
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while *self.peek() == Token::Star {
            self.bump();
            let offset = self.offset();
            let rhs = self.factor()?;
            acc = acc.checked_mul(&rhs).map_err(|e| self.poly_err(offset, e))?;
        }
        match self.peek() {
            Token::Number(_) | Token::Ident(_) | Token::LParen => Err(self.err(ParseErrorKind::Unexpected {
                expected: "operator (implicit multiplication is not allowed)",
                found: self.peek().describe(),
            })),
            _ => Ok(acc),
        }
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        let negate = if *self.peek() == Token::Minus {
            self.bump();
            true
        } else {
            false
        };
        let start = self.offset();
        let base = self.atom()?;
        let value = if *self.peek() == Token::Caret {
            self.bump();
            let exp_offset = self.offset();
            let exponent = match self.bump().0 {
                Token::Number(r) if r.is_integer() && r >= Rational::zero() => r,
                Token::Minus => {
                    return Err(ParseError {
                        kind: ParseErrorKind::NegativeExponent,
                        offset: exp_offset,
                    })
                }
                other => {
                    return Err(ParseError {
                        kind: ParseErrorKind::Unexpected {
                            expected: "non-negative integer exponent",
                            found: other.describe(),
                        },
                        offset: exp_offset,
                    })
                }
            };
            let exponent = exponent.to_integer();
            let cap = BigInt::from(MAX_DEGREE);
            if exponent > cap {
                return Err(ParseError {
                    kind: ParseErrorKind::ExponentTooLarge(exponent.to_string()),
                    offset: exp_offset,
                });
            }
            let e: u32 = exponent.try_into().expect("bounded by cap");
            base.checked_pow(e).map_err(|err| self.poly_err(start, err))?
        } else {
            base
        };
        Ok(if negate { -value } else { value })
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let dim = self.chart.dim();
        let (tok, offset) = self.bump();
        match tok {
            Token::Number(r) => Ok(Polynomial::constant(dim, r)),
            Token::Ident(name) => match self.chart.resolve(&name) {
                Some(idx) => Ok(self.chart.var(idx)),
                None => Err(ParseError {
                    kind: ParseErrorKind::UnknownVariable(name),
                    offset,
                }),
            },
            Token::LParen => {
                let inner = self.expr()?;
                if *self.peek() != Token::RParen {
                    return Err(self.err(ParseErrorKind::UnbalancedParens));
                }
                self.bump();
                Ok(inner)
            }
            Token::RParen => Err(ParseError {
                kind: ParseErrorKind::UnbalancedParens,
                offset,
            }),
            other => Err(ParseError {
                kind: ParseErrorKind::Unexpected {
                    expected: "number, variable or `(`",
                    found: other.describe(),
                },
                offset,
            }),
        }
    }
}

/// Parses `text` into a polynomial over `chart`.
pub fn parse_poly(text: &str, chart: &Chart) -> Result<Polynomial, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0, chart };
    let p = parser.expr()?;
    match parser.peek() {
        Token::End => Ok(p),
        Token::RParen => Err(parser.err(ParseErrorKind::UnbalancedParens)),
        other => Err(parser.err(ParseErrorKind::Unexpected {
            expected: "operator or end of input",
            found: other.describe(),
        })),
    }
}

/// Canonical text for a polynomial over `chart`, re-parseable by
/// [`parse_poly`].
pub fn print_poly(p: &Polynomial, chart: &Chart) -> String {
    chart.format(p)
}
