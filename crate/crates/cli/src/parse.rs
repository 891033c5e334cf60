//! Text grammar for continued fraction expressions:
//!
//! ```text
//! expr    := ["reg:"] "[" intlist [";" "(" intlist ")"] "]" | builtin
//! intlist := int { "," int }
//! builtin := "@example1" | "@example2" | "@example3" | "@example4"
//! ```
//!
//! `[a0,...,ak]` is a finite fraction, `[a0,...,ak;(p0,...,pm)]` repeats the
//! parenthesized block forever, and the `reg:` prefix reads the list in the
//! regular (plus-sign) convention and converts it. ASCII whitespace between
//! tokens is ignored; positions in errors are byte offsets into the input.

use std::fmt;
use std::str::FromStr;

use num::BigInt;

use cfconv_core::{neg_from_regular, CoefficientStream};

use crate::builtins;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    Negative,
    Regular,
}

/// A parsed expression: the text it came from, the convention it used, and
/// the resulting stream (always stored in the negative convention).
#[derive(Clone, Debug)]
pub struct CfExpression {
    source: String,
    convention: Convention,
    stream: CoefficientStream,
}

impl CfExpression {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn stream(&self) -> &CoefficientStream {
        &self.stream
    }

    /// Canonical text form: re-parsing it yields an equal stream. Builtins
    /// print as their name; everything else prints in the negative
    /// convention with a canonical prefix/period split.
    pub fn canonical_text(&self) -> String {
        match &self.stream.clone().canonicalize() {
            CoefficientStream::Generator(_) => self.source.trim().to_string(),
            CoefficientStream::Finite(coeffs) => format!("[{}]", join(coeffs)),
            CoefficientStream::EventuallyPeriodic { prefix, period } => {
                if prefix.is_empty() {
                    // The grammar wants at least one element before the
                    // period, so unroll one: [(q0,...,qk)] = [q0;(q1,...,qk,q0)].
                    let mut rotated = period[1..].to_vec();
                    rotated.push(period[0].clone());
                    format!("[{};({})]", period[0], join(&rotated))
                } else {
                    format!("[{};({})]", join(prefix), join(period))
                }
            }
        }
    }
}

impl fmt::Display for CfExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

fn join(coeffs: &[BigInt]) -> String {
    coeffs.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub position: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { text, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn eat(&mut self, token: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(token) {
            self.pos += token.len_utf8();
            Ok(())
        } else {
            Err(self.error(format!("expected '{token}'")))
        }
    }

    fn eat_literal(&mut self, literal: &str) -> bool {
        if self.rest().starts_with(literal) {
            self.pos += literal.len();
            true
        } else {
            false
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            message: message.into(),
            position: self.pos,
        }
    }

    fn int(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let rest = self.rest();
        let mut len = 0;
        let bytes = rest.as_bytes();
        if matches!(bytes.first(), Some(b'-') | Some(b'+')) {
            len = 1;
        }
        while bytes.get(len).is_some_and(u8::is_ascii_digit) {
            len += 1;
        }
        let token = &rest[..len];
        match BigInt::from_str(token) {
            Ok(n) => {
                self.pos += len;
                Ok(n)
            }
            Err(_) => Err(self.error("expected an integer")),
        }
    }

    fn intlist(&mut self) -> Result<Vec<BigInt>, ParseError> {
        let mut list = vec![self.int()?];
        loop {
            self.skip_ws();
            if self.peek() == Some(',') {
                self.pos += 1;
                list.push(self.int()?);
            } else {
                return Ok(list);
            }
        }
    }

    fn end(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.rest().is_empty() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}

pub fn parse_cf(text: &str) -> Result<CfExpression, ParseError> {
    let mut cursor = Cursor::new(text);
    cursor.skip_ws();

    if cursor.peek() == Some('@') {
        let start = cursor.pos;
        let name: String = cursor
            .rest()
            .chars()
            .take_while(|c| !c.is_whitespace())
            .collect();
        let Some(stream) = builtins::by_name(&name) else {
            return Err(ParseError {
                message: format!("unknown builtin '{name}'"),
                position: start,
            });
        };
        cursor.pos += name.len();
        cursor.end()?;
        return Ok(CfExpression {
            source: text.to_string(),
            convention: Convention::Negative,
            stream,
        });
    }

    let convention = if cursor.eat_literal("reg:") {
        Convention::Regular
    } else {
        Convention::Negative
    };

    cursor.eat('[')?;
    let head = cursor.intlist()?;
    cursor.skip_ws();
    let period = if cursor.peek() == Some(';') {
        cursor.pos += 1;
        cursor.eat('(')?;
        cursor.skip_ws();
        if cursor.peek() == Some(')') {
            return Err(cursor.error("empty period"));
        }
        let period = cursor.intlist()?;
        cursor.eat(')')?;
        Some(period)
    } else {
        None
    };
    cursor.eat(']')?;
    cursor.end()?;

    let stream = match period {
        Some(period) => CoefficientStream::eventually_periodic(head, period)
            .expect("the grammar rejects empty periods"),
        None => CoefficientStream::Finite(head),
    };
    let stream = match convention {
        Convention::Negative => stream,
        Convention::Regular => neg_from_regular(&stream),
    };
    Ok(CfExpression {
        source: text.to_string(),
        convention,
        stream,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&n| BigInt::from(n)).collect()
    }

    #[test]
    fn finite_lists_parse() {
        let expr = parse_cf("[3,0,-3]").unwrap();
        assert_eq!(expr.convention(), Convention::Negative);
        assert_eq!(expr.stream(), &CoefficientStream::Finite(ints(&[3, 0, -3])));
        assert_eq!(expr.canonical_text(), "[3,0,-3]");
    }

    #[test]
    fn periodic_lists_parse() {
        let expr = parse_cf("[3,0,-3;(3,-3)]").unwrap();
        let expected =
            CoefficientStream::eventually_periodic(ints(&[3, 0, -3]), ints(&[3, -3])).unwrap();
        assert_eq!(expr.stream(), &expected);
    }

    #[test]
    fn whitespace_is_cosmetic() {
        let spaced = parse_cf(" [ 1 , 2 ; ( 3 , 4 ) ] ").unwrap();
        let tight = parse_cf("[1,2;(3,4)]").unwrap();
        assert_eq!(spaced.stream(), tight.stream());
    }

    #[test]
    fn regular_prefix_converts() {
        // (1,-1,1,-1,...) in the regular convention is [1,(1)].
        let expr = parse_cf("reg:[1;(-1,1)]").unwrap();
        assert_eq!(expr.convention(), Convention::Regular);
        let expected =
            CoefficientStream::eventually_periodic(ints(&[1]), ints(&[1])).unwrap();
        assert_eq!(expr.stream(), &expected);
        assert_eq!(expr.canonical_text(), "[1;(1)]");
    }

    #[test]
    fn builtins_parse_by_name() {
        let expr = parse_cf("@example3").unwrap();
        let head = expr.stream().head(8).unwrap();
        assert_eq!(head, ints(&[1, 0, 2, 0, 3, 0, 4, 0]));
        assert_eq!(expr.canonical_text(), "@example3");
    }

    #[test]
    fn pure_periods_print_inside_the_grammar() {
        let expr = parse_cf("[3;(-3,3)]").unwrap();
        let text = expr.canonical_text();
        let reparsed = parse_cf(&text).unwrap();
        assert_eq!(reparsed.stream(), expr.stream());
    }

    #[test]
    fn errors_carry_byte_positions() {
        let err = parse_cf("[1,,2]").unwrap_err();
        assert_eq!(err.position, 3);
        assert!(err.message.contains("integer"));

        let err = parse_cf("[1;()]").unwrap_err();
        assert_eq!(err.message, "empty period");

        let err = parse_cf("[1,2] trailing").unwrap_err();
        assert!(err.message.contains("trailing"));

        let err = parse_cf("@nonsense").unwrap_err();
        assert!(err.message.contains("unknown builtin"));

        let err = parse_cf("1,2,3").unwrap_err();
        assert!(err.message.contains('['));
    }
}
