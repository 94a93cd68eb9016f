//! A small expression language for series.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := '-' unary | power
//! power := atom ('^' INT)?
//! atom  := INT ('/' INT)? | 'q' | 'zeta' | A | B | C | D | R1..R5 | S | T
//!        | poch(a, b [, k])          -- (ζ^k q^a; q^b)_∞
//!        | quot([expr, ...], [expr, ...])
//!        | '(' expr ')'
//! ```

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::fps::{Fps, Series};
use crate::qseries::{named_series, pochhammer, r_series, s_series, t_series, Garvan, PochSpec};
use crate::ring::{Coeff, CycloElem, Gf2, Rational, RingTag};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(Rational),
    Q,
    Zeta,
    Named(Garvan),
    R(usize),
    S,
    T,
    Poch { a: usize, b: usize, k: i64 },
    Quot(Vec<Expr>, Vec<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            out.push((pos, Tok::Int(text.parse().expect("digits parse"))));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().map(|&(_, c)| c).collect())));
        } else if "+-*^/(),[]".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Parse {
                position: pos,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        let negative = self.eat('-');
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = v.clone();
                self.at += 1;
                Ok(if negative { -v } else { v })
            }
            _ => self.err("expected an integer"),
        }
    }

    fn small<T: TryFrom<BigInt>>(&mut self, what: &str) -> Result<T> {
        let pos = self.pos();
        let v = self.int()?;
        T::try_from(v).map_err(|_| Error::Parse {
            position: pos,
            message: format!("{what} out of range"),
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let k: u32 = self.small("exponent")?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn list(&mut self) -> Result<Vec<Expr>> {
        self.expect('[')?;
        let mut items = Vec::new();
        if self.eat(']') {
            return Ok(items);
        }
        loop {
            items.push(self.expr()?);
            if self.eat(']') {
                return Ok(items);
            }
            self.expect(',')?;
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of input");
        };
        self.at += 1;
        match tok {
            Tok::Int(n) => {
                if self.eat('/') {
                    let d = self.int()?;
                    if d == BigInt::from(0) {
                        return Err(Error::Parse {
                            position: pos,
                            message: "zero denominator".into(),
                        });
                    }
                    Ok(Expr::Number(Rational::new(n, d)))
                } else {
                    Ok(Expr::Number(Rational::from_integer(n)))
                }
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "q" => Ok(Expr::Q),
                "zeta" => Ok(Expr::Zeta),
                "A" => Ok(Expr::Named(Garvan::A)),
                "B" => Ok(Expr::Named(Garvan::B)),
                "C" => Ok(Expr::Named(Garvan::C)),
                "D" => Ok(Expr::Named(Garvan::D)),
                "S" => Ok(Expr::S),
                "T" => Ok(Expr::T),
                "R1" | "R2" | "R3" | "R4" | "R5" => Ok(Expr::R(name[1..].parse().expect("digit"))),
                "poch" => {
                    self.expect('(')?;
                    let a: usize = self.small("poch exponent")?;
                    self.expect(',')?;
                    let b: usize = self.small("poch base")?;
                    let k = if self.eat(',') { self.small("ζ power")? } else { 0 };
                    self.expect(')')?;
                    Ok(Expr::Poch { a, b, k })
                }
                "quot" => {
                    self.expect('(')?;
                    let num = self.list()?;
                    self.expect(',')?;
                    let den = self.list()?;
                    self.expect(')')?;
                    Ok(Expr::Quot(num, den))
                }
                _ => Err(Error::Parse {
                    position: pos,
                    message: format!("unknown name `{name}`"),
                }),
            },
            Tok::Sym(c) => Err(Error::Parse {
                position: pos,
                message: format!("unexpected `{c}`"),
            }),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: tokenize(src)?,
        at: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

impl Expr {
    pub fn eval<C: Coeff>(&self, ring: RingTag, order: usize) -> Result<Fps<C>> {
        Ok(match self {
            Expr::Number(r) => {
                let c = C::from_rational(r).ok_or_else(|| {
                    Error::InvalidArgument(format!("{r} has no image in the {ring} ring"))
                })?;
                Fps::constant(c, order)
            }
            Expr::Q => Fps::monomial(C::one(), 1, order),
            Expr::Zeta => Fps::constant(
                C::zeta_pow(1).ok_or(Error::RingMismatch {
                    left: ring,
                    right: RingTag::Cyclo,
                })?,
                order,
            ),
            Expr::Named(g) => named_series(*g, order),
            Expr::R(i) => r_series(*i, order),
            Expr::S => s_series(order),
            Expr::T => t_series(order)?,
            Expr::Poch { a, b, k } => {
                if k.rem_euclid(5) != 0 && C::zeta_pow(1).is_none() {
                    return Err(Error::RingMismatch {
                        left: ring,
                        right: RingTag::Cyclo,
                    });
                }
                pochhammer(&PochSpec::new().with_zeta(*k, *a, *b, 1), order)?
            }
            Expr::Quot(num, den) => {
                let mut acc = Fps::one(order);
                for e in num {
                    acc = acc.mul(&e.eval(ring, order)?);
                }
                for e in den {
                    acc = acc.mul(&e.eval::<C>(ring, order)?.invert()?);
                }
                acc
            }
            Expr::Neg(e) => e.eval::<C>(ring, order)?.neg(),
            Expr::Add(a, b) => a.eval::<C>(ring, order)?.add(&b.eval(ring, order)?),
            Expr::Sub(a, b) => a.eval::<C>(ring, order)?.sub(&b.eval(ring, order)?),
            Expr::Mul(a, b) => a.eval::<C>(ring, order)?.mul(&b.eval(ring, order)?),
            Expr::Pow(e, k) => e.eval::<C>(ring, order)?.pow(*k),
        })
    }
}

/// Parses and expands `src` to `order` over `ring`.
pub fn expand(src: &str, order: usize, ring: RingTag) -> Result<Series> {
    let e = parse(src)?;
    Ok(match ring {
        RingTag::Rational => Series::Rational(e.eval::<Rational>(ring, order)?),
        RingTag::Cyclo => Series::Cyclo(e.eval::<CycloElem>(ring, order)?),
        RingTag::Gf2 => Series::Gf2(e.eval::<Gf2>(ring, order)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(src: &str, order: usize) -> Vec<String> {
        expand(src, order, RingTag::Rational).unwrap().coeff_strings()
    }

    #[test]
    fn eta_quotient() {
        assert_eq!(coeffs("quot([poch(5,5)^4],[poch(1,1)])", 4), ["1", "1", "2", "3", "5"]);
    }

    #[test]
    fn named_and_lambert() {
        assert_eq!(coeffs("A", 0), ["1"]);
        assert_eq!(coeffs("R1", 3), ["0", "1", "1", "1"]);
        assert_eq!(coeffs("T*5 - q*quot([], [1 - q, poch(1,1)])", 6), ["0"; 7]);
    }

    #[test]
    fn arithmetic_precedence() {
        assert_eq!(coeffs("1 + 2*q^2 - -q", 3), ["1", "1", "2", "0"]);
        assert_eq!(coeffs("(1+q)^2", 3), ["1", "2", "1", "0"]);
        assert_eq!(coeffs("1/5 * (1 + q)", 1), ["1/5", "1/5"]);
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert!(matches!(parse("1 + ?"), Err(Error::Parse { position: 4, .. })));
        assert!(matches!(parse("poch(1,"), Err(Error::Parse { position: 7, .. })));
        assert!(matches!(parse("R9"), Err(Error::Parse { position: 0, .. })));
        assert!(matches!(parse("q q"), Err(Error::Parse { position: 2, .. })));
    }

    #[test]
    fn ring_errors() {
        assert!(matches!(
            expand("zeta", 2, RingTag::Rational),
            Err(Error::RingMismatch { .. })
        ));
        assert!(matches!(
            expand("poch(1,1,2)", 2, RingTag::Gf2),
            Err(Error::RingMismatch { .. })
        ));
        assert!(expand("1/2", 2, RingTag::Gf2).is_err());
        assert!(matches!(
            expand("quot([1],[q])", 2, RingTag::Rational),
            Err(Error::NonUnitConstantTerm(_))
        ));
    }

    #[test]
    fn cyclotomic_expansion() {
        let s = expand("poch(1,1,1)*poch(1,1,4)*quot([poch(1,1)],[poch(1,1,1), poch(1,1,4)])", 5, RingTag::Cyclo)
            .unwrap();
        assert_eq!(s, expand("poch(1,1)", 5, RingTag::Cyclo).unwrap());
        let parity = expand("quot([],[poch(1,1)])", 6, RingTag::Gf2).unwrap();
        assert_eq!(parity.coeff_strings(), ["1", "1", "0", "1", "1", "1", "1"]);
    }
}
