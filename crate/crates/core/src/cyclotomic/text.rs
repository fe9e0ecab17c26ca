//! Textual forms of cyclotomic numbers.
//!
//! Expression syntax: sums of rational multiples of `zeta(h,k)` powers,
//! e.g. `1/3*zeta(1,4)^2 - 2`. Canonical syntax: `{N, ["c0", "c1", ...]}`.

use rug::{Integer, Rational};
use thiserror::Error;

use super::{reduce_fraction, CycNum};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse cyclotomic value at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        msg: msg.into(),
    })
}

/// Render a value in expression syntax at its stored conductor.
pub(super) fn format_value(v: &CycNum) -> String {
    let n = v.conductor();
    let mut out = String::new();
    for (j, c) in v.coeffs().iter().enumerate() {
        if *c == 0 {
            continue;
        }
        let neg = *c < 0;
        let mag = Rational::from(c.abs_ref());
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if j == 0 {
            out.push_str(&mag.to_string());
            continue;
        }
        if mag != 1 {
            out.push_str(&format!("{mag}*"));
        }
        let r = reduce_fraction(j as i64, n as u64);
        out.push_str(&format!("zeta({},{})", r.h(), r.k()));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            err(self.pos, format!("expected '{}'", c as char))
        }
    }

    fn integer(&mut self) -> Result<Integer, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.src.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse::<Integer>()
            .or_else(|_| err(start, "expected integer"))
    }

    fn small_int(&mut self) -> Result<i64, ParseError> {
        let pos = self.pos;
        self.integer()?
            .to_i64()
            .map_or_else(|| err(pos, "integer out of range"), Ok)
    }

    fn expr(&mut self) -> Result<CycNum, ParseError> {
        let mut acc = if self.eat(b'-') {
            -self.term()?
        } else {
            self.eat(b'+');
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<CycNum, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.factor()?;
            } else if self.eat(b'/') {
                let pos = self.pos;
                let d = self.factor()?;
                acc = acc.div(&d).or_else(|_| err(pos, "division by zero"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<CycNum, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let pos = self.pos;
            let e = self.small_int()?;
            return base.pow(e).or_else(|_| err(pos, "zero to a negative power"));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<CycNum, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.atom()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(CycNum::from_rational(&Rational::from(v), 1))
            }
            Some(b'z') if self.src[self.pos..].starts_with(b"zeta") => {
                self.pos += 4;
                self.expect(b'(')?;
                let h = self.small_int()?;
                self.expect(b',')?;
                let kpos = self.pos;
                let k = self.small_int()?;
                self.expect(b')')?;
                if k <= 0 || k > u32::MAX as i64 {
                    return err(kpos, "root order must be a positive 32-bit integer");
                }
                Ok(CycNum::from_root(&reduce_fraction(h, k as u64)))
            }
            _ => err(self.pos, "expected number, zeta(h,k) or '('"),
        }
    }
}

pub(super) fn parse_expr(s: &str) -> Result<CycNum, ParseError> {
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
    };
    let v = p.expr()?;
    if p.peek().is_some() {
        return err(p.pos, "trailing input");
    }
    Ok(v)
}

pub(super) fn parse_canonical(s: &str) -> Result<CycNum, ParseError> {
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
    };
    p.expect(b'{')?;
    let npos = p.pos;
    let n = p.small_int()?;
    if n <= 0 || n > u32::MAX as i64 {
        return err(npos, "conductor must be a positive 32-bit integer");
    }
    let n = n as u32;
    p.expect(b',')?;
    p.expect(b'[')?;
    let mut coeffs = Vec::new();
    if !p.eat(b']') {
        loop {
            let quoted = p.eat(b'"');
            let cpos = p.pos;
            let num = p.integer()?;
            let den = if p.eat(b'/') {
                p.integer()?
            } else {
                Integer::from(1)
            };
            if den == 0 {
                return err(cpos, "zero denominator");
            }
            coeffs.push(Rational::from((num, den)));
            if quoted {
                p.expect(b'"')?;
            }
            if p.eat(b']') {
                break;
            }
            p.expect(b',')?;
        }
    }
    p.expect(b'}')?;
    if p.peek().is_some() {
        return err(p.pos, "trailing input");
    }
    let phi = super::euler_phi(n as u64) as usize;
    if coeffs.len() != phi {
        return err(
            npos,
            format!("conductor {n} needs {phi} coordinates, got {}", coeffs.len()),
        );
    }
    Ok(CycNum::from_rational_coeffs(n, &coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_basic_forms() {
        let v: CycNum = "-zeta(1,4)".parse().unwrap();
        assert_eq!(v, CycNum::zeta(3, 4));
        let w: CycNum = "1/3*zeta(1,4)^2".parse().unwrap();
        assert_eq!(w.to_rational(), Some(Rational::from((-1, 3))));
        let x: CycNum = "zeta(5,10)".parse().unwrap();
        assert_eq!(x.to_rational(), Some(Rational::from(-1)));
        let y: CycNum = " 2 - (1/2)*zeta(1,3) ".parse().unwrap();
        assert_eq!(y, &CycNum::from_int(2, 1) - &CycNum::zeta(1, 3).scale(&Rational::from((1, 2))));
        assert!("1/0".parse::<CycNum>().is_err());
        assert!("zeta(1,0)".parse::<CycNum>().is_err());
        assert!("2 +".parse::<CycNum>().is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["-1/3", "4/3", "0", "zeta(1,4)", "1/2 - 3*zeta(1,8) + zeta(3,8)"] {
            let v: CycNum = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
            assert_eq!(v.to_string().parse::<CycNum>().unwrap(), v);
        }
        // displayed at the minimal conductor
        let v = CycNum::zeta(4, 12);
        assert_eq!(v.to_string(), "zeta(1,3)");
    }
}
