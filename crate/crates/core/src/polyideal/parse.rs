use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;

use super::poly::{MPoly, Ring};
use crate::exactnum::{Field, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && (chars[i] == '.' || chars[i] == 'e' || chars[i] == 'E') {
                return Err(perr(i + 1, "floating-point literals are not accepted; write p/q"));
            }
            let text: String = chars[start..i].iter().collect();
            out.push((Tok::Num(text.parse().unwrap()), start + 1));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start + 1));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i + 1));
            i += 1;
        } else {
            return Err(perr(i + 1, &format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

fn perr(col: usize, msg: &str) -> Error {
    Error::Parse {
        line: 1,
        col,
        msg: msg.to_string(),
    }
}

struct Parser<'a, F: Field> {
    ring: &'a Arc<Ring<F>>,
    consts: &'a HashMap<String, F>,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl<F: Field> Parser<'_, F> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MPoly<F>> {
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MPoly<F>> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.peek() == Some(&Tok::Op('/')) {
                let col = self.col();
                self.pos += 1;
                let d = self.unary()?;
                if !d.is_constant() || d.is_zero() {
                    return Err(perr(col, "division only by nonzero constants"));
                }
                acc = acc.scale(&d.terms()[0].1.inv());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MPoly<F>> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<MPoly<F>> {
        let base = self.atom()?;
        if self.eat('^') {
            let col = self.col();
            match self.toks.get(self.pos).map(|t| t.0.clone()) {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e = u32::try_from(&n).map_err(|_| perr(col, "exponent too large"))?;
                    Ok(base.pow(e))
                }
                _ => Err(perr(col, "expected a non-negative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MPoly<F>> {
        let col = self.col();
        let tok = self.toks.get(self.pos).map(|t| t.0.clone());
        match tok {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(MPoly::from_rational(self.ring, &Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(i) = self.ring.var_index(&name) {
                    Ok(MPoly::var(self.ring, i))
                } else if let Some(c) = self.consts.get(&name) {
                    Ok(MPoly::constant(self.ring, c.clone()))
                } else if name == "theta" {
                    match F::generator(&self.ring.ctx) {
                        Some(t) => Ok(MPoly::constant(self.ring, t)),
                        None => Err(perr(col, "theta used but the coefficient field is Q")),
                    }
                } else {
                    Err(perr(col, &format!("unknown identifier '{name}'")))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(perr(self.col(), "expected ')'"));
                }
                Ok(e)
            }
            Some(t) => Err(perr(col, &format!("unexpected token {t:?}"))),
            None => Err(perr(col, "unexpected end of input")),
        }
    }
}

/// Parse a polynomial over `ring`.
pub fn parse_poly<F: Field>(ring: &Arc<Ring<F>>, s: &str) -> Result<MPoly<F>> {
    parse_poly_with(ring, s, &HashMap::new())
}

/// Parse a polynomial, resolving identifiers that are not variables through
/// `consts`.
pub fn parse_poly_with<F: Field>(ring: &Arc<Ring<F>>, s: &str, consts: &HashMap<String, F>) -> Result<MPoly<F>> {
    let toks = lex(s)?;
    let mut p = Parser {
        ring,
        consts,
        toks,
        pos: 0,
        end_col: s.chars().count() + 1,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(perr(p.col(), "trailing input"));
    }
    Ok(e)
}
