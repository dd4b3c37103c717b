//! Parser for sum expressions like `P3+P4+6P4` or `3*P4 + P3`.

use crate::error::{Error, Result};
use crate::sums::{PolygonalSum, Term};

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn error(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn digits(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected digits"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse {
                position: start,
                message: "number too large".to_string(),
            })
    }

    fn term(&mut self) -> Result<Term> {
        let mut coeff = 1;
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                coeff = self.digits()?;
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                }
            }
            _ => {}
        }
        match self.peek() {
            Some(b'P') | Some(b'p') => self.pos += 1,
            _ => return Err(self.error("expected `P`")),
        }
        let start = self.pos;
        let order = self.digits()?;
        let order = u32::try_from(order).map_err(|_| Error::Parse {
            position: start,
            message: "order too large".to_string(),
        })?;
        if coeff == 0 {
            return Err(Error::Parse {
                position: start,
                message: "coefficient must be positive".to_string(),
            });
        }
        if order < 3 {
            return Err(Error::Parse {
                position: start,
                message: format!("polygonal order {order} is below 3"),
            });
        }
        Term::new(coeff, order)
    }
}

/// Parses `sum := term ('+' term)*` with `term := [digits ['*']] 'P' digits`;
/// whitespace is ignored, and the result is in canonical order. `0` parses
/// as the empty sum.
pub fn parse_sum(text: &str) -> Result<PolygonalSum> {
    let mut s = Scanner::new(text);
    if s.peek() == Some(b'0') && {
        let save = s.pos;
        s.pos += 1;
        let end = s.peek().is_none();
        s.pos = save;
        end
    } {
        return Ok(PolygonalSum::empty());
    }
    let mut terms = vec![s.term()?];
    loop {
        match s.peek() {
            None => break,
            Some(b'+') => {
                s.pos += 1;
                terms.push(s.term()?);
            }
            Some(_) => return Err(s.error("expected `+` or end of input")),
        }
    }
    Ok(PolygonalSum::new(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(text: &str) -> Vec<(u64, u32)> {
        parse_sum(text)
            .unwrap()
            .terms()
            .iter()
            .map(|t| (t.coeff, t.order))
            .collect()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(pairs("P3+P4+6P4"), vec![(1, 3), (1, 4), (6, 4)]);
        assert_eq!(pairs("3*P4 + P3"), vec![(1, 3), (3, 4)]);
        assert_eq!(pairs(" 2 P3 "), vec![(2, 3)]);
        assert_eq!(pairs("0"), vec![]);
        assert_eq!(pairs("P5"), vec![(1, 5)]);
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_sum("P2").unwrap_err() {
            Error::Parse { position, message } => {
                assert_eq!(position, 1);
                assert!(message.contains("below 3"));
            }
            other => panic!("{other:?}"),
        }
        match parse_sum("0*P3").unwrap_err() {
            Error::Parse { message, .. } => assert!(message.contains("positive")),
            other => panic!("{other:?}"),
        }
        assert!(parse_sum("P3 Q4").is_err());
        assert!(parse_sum("").is_err());
        assert!(parse_sum("P3+").is_err());
    }

    #[test]
    fn display_round_trip() {
        for text in ["P3+P4+6P4", "P4+2P4+5P3+8P4", "3P3+3P3", "0"] {
            let sum = parse_sum(text).unwrap();
            assert_eq!(parse_sum(&sum.to_string()).unwrap(), sum);
        }
    }
}
