//! Recursive-descent reader for the polynomial text grammar.
//!
//! Accepts the canonical output plus a few conveniences: `-`, parentheses,
//! and `^` on parenthesized groups. Names resolve to variables first, then
//! to parameters; negative exponents are only legal on parameters.

use std::sync::Arc;

use super::{PolyError, SparsePoly, VarUniverse};
use crate::coeff::{CoeffRing, ParamCoeff};

pub fn parse_poly(text: &str, vars: &Arc<VarUniverse>, ring: &Arc<CoeffRing>) -> Result<SparsePoly, PolyError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars,
        ring,
    };
    let out = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a Arc<VarUniverse>,
    ring: &'a Arc<CoeffRing>,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<SparsePoly, PolyError> {
        let mut acc = SparsePoly::zero(self.vars, self.ring);
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.product()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
            match self.peek() {
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn product(&mut self) -> Result<SparsePoly, PolyError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SparsePoly, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let e = self.exponent()?;
                    if e < 0 {
                        return Err(self.err("negative exponent on a group"));
                    }
                    return Ok(inner.pow(e as u32));
                }
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let c = ParamCoeff::constant(self.ring, super::residue_from_big(n, self.ring.modulus()) as i64);
                Ok(SparsePoly::constant(self.vars, self.ring, c))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                let name = self.ident();
                let e = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.exponent()?
                } else {
                    1
                };
                if self.vars.index_of(&name).is_some() {
                    if e < 0 {
                        self.pos = start;
                        return Err(self.err("negative exponent on a variable"));
                    }
                    return SparsePoly::var_pow(self.vars, self.ring, &name, e as u32);
                }
                if self.ring.params().index_of(&name).is_some() {
                    let c = ParamCoeff::param_pow(self.ring, &name, e)?;
                    return Ok(SparsePoly::constant(self.vars, self.ring, c));
                }
                Err(PolyError::UnknownVariable(name))
            }
            _ => Err(self.err("expected a term")),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn integer(&mut self) -> Result<u128, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u128>()
            .map_err(|_| self.err("integer too large"))
    }

    fn exponent(&mut self) -> Result<i32, PolyError> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let n = self.integer()?;
        let n = i32::try_from(n).map_err(|_| self.err("exponent too large"))?;
        Ok(if neg { -n } else { n })
    }
}
