//! Text syntax for polynomials, maps and ideals.
//!
//! Terms look like `z1^2*z2 - 3/2*z2^3`; whitespace is insignificant,
//! parentheses and unary minus are allowed. Maps are `"f1; f2"` and ideals
//! comma-separated generator lists.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Ideal, Poly, PolyMap};
use crate::error::{Error, Result};

pub fn parse_poly(input: &str) -> Result<Poly> {
    let mut p = Parser::new(input)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

/// Parses `"f1; f2"` into a map, checking dominance.
pub fn parse_map(input: &str) -> Result<PolyMap> {
    let parts: Vec<&str> = input.split(';').collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!(
            "a map needs exactly two components separated by ';', got {}",
            parts.len()
        )));
    }
    let f1 = parse_poly(parts[0])?;
    let f2 = parse_poly(parts[1])?;
    let map = PolyMap::new(f1, f2);
    if !map.is_dominant() {
        return Err(Error::Precondition(
            "map is not dominant (Jacobian vanishes identically)".into(),
        ));
    }
    Ok(map)
}

/// Parses a comma-separated generator list.
pub fn parse_ideal(input: &str) -> Result<Ideal> {
    let gens = input
        .split(',')
        .map(parse_poly)
        .collect::<Result<Vec<_>>>()?;
    Ideal::new(gens)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Z1,
    Z2,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn new(s: &str) -> Result<Self> {
        let mut toks = Vec::new();
        let bytes: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => {
                    toks.push(Tok::Plus);
                    i += 1;
                }
                '-' | '−' => {
                    toks.push(Tok::Minus);
                    i += 1;
                }
                '*' => {
                    toks.push(Tok::Star);
                    i += 1;
                }
                '/' => {
                    toks.push(Tok::Slash);
                    i += 1;
                }
                '^' => {
                    toks.push(Tok::Caret);
                    i += 1;
                }
                '(' => {
                    toks.push(Tok::LParen);
                    i += 1;
                }
                ')' => {
                    toks.push(Tok::RParen);
                    i += 1;
                }
                'z' => {
                    if i + 1 < bytes.len() && bytes[i + 1] == '1' {
                        toks.push(Tok::Z1);
                        i += 2;
                    } else if i + 1 < bytes.len() && bytes[i + 1] == '2' {
                        toks.push(Tok::Z2);
                        i += 2;
                    } else {
                        return Err(Error::Parse("variables are z1 and z2".into()));
                    }
                }
                d if d.is_ascii_digit() => {
                    let mut j = i;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    let lit: String = bytes[i..j].iter().collect();
                    let n: BigInt = lit
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad integer literal {lit}")))?;
                    toks.push(Tok::Num(n));
                    i = j;
                }
                other => {
                    return Err(Error::Parse(format!("unexpected character '{other}'")));
                }
            }
        }
        Ok(Parser { toks, pos: 0 })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_end(&self) -> Result<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(Error::Parse("trailing input".into()))
        }
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.next();
                let t = self.term()?;
                -&t
            }
            Some(Tok::Plus) => {
                self.next();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(Tok::Minus) => {
                    self.next();
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.next();
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.next();
            match self.next() {
                Some(Tok::Num(n)) => {
                    let e: u64 = n
                        .try_into()
                        .map_err(|_| Error::Parse("exponent out of range".into()))?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::Parse("'^' needs an integer exponent".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.next() {
            Some(Tok::Z1) => Ok(Poly::var1()),
            Some(Tok::Z2) => Ok(Poly::var2()),
            Some(Tok::Num(n)) => {
                // optional /m forming an exact rational coefficient
                if let Some(Tok::Slash) = self.peek() {
                    self.next();
                    match self.next() {
                        Some(Tok::Num(d)) => {
                            if d == BigInt::from(0) {
                                return Err(Error::Parse("zero denominator".into()));
                            }
                            Ok(Poly::constant(BigRational::new(n, d)))
                        }
                        _ => Err(Error::Parse("'/' needs an integer denominator".into())),
                    }
                } else {
                    Ok(Poly::constant(BigRational::from_integer(n)))
                }
            }
            Some(Tok::Minus) => {
                let a = self.factor()?;
                Ok(-&a)
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(Error::Parse("missing ')'".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_whitespace_insensitive_terms() {
        let a = parse_poly("z1^2*z2 - 3/2*z2^3").unwrap();
        let b = parse_poly("  z1^2 * z2-3/2 * z2 ^ 3 ").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.coeff(2, 1), BigRational::from_integer(BigInt::from(1)));
        assert_eq!(a.coeff(0, 3), BigRational::new(BigInt::from(-3), BigInt::from(2)));
    }

    #[test]
    fn parses_parenthesized_expressions() {
        let a = parse_poly("(z1 + z2)^2 - (z1 - z2)^2").unwrap();
        assert_eq!(a, parse_poly("4*z1*z2").unwrap());
    }

    #[test]
    fn parses_maps_and_rejects_degenerate_ones() {
        let f = parse_map("z2; z1*z2").unwrap();
        assert_eq!(f.degree(), 2);
        assert!(parse_map("z1; z1").is_err());
        assert!(parse_map("z1").is_err());
    }

    #[test]
    fn parses_ideals() {
        let i = parse_ideal("z2^2 - z1^3, z1^2*z2").unwrap();
        assert_eq!(i.gens.len(), 2);
        assert!(parse_ideal("z1, 0").is_err());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_poly("z3").is_err());
        assert!(parse_poly("z1 +").is_err());
        assert!(parse_poly("(z1").is_err());
        assert!(parse_poly("1/0").is_err());
    }
}
