//! Text form of torus and sphere polynomials.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := power ('*' power)*
//! power  := atom ['^' ['-'] int]
//! atom   := number | number 'i' | 'i' | name | '(' expr ')'
//! ```
//!
//! Torus names are `U1`, `U2` and their adjoints `U1*`, `U2*`; negative
//! powers are adjoint powers. Sphere names are `a`, `ad`, `b`, `bd`, `x`
//! (`ad` and `bd` standing for the adjoints); negative powers are rejected.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{PhaseMode, SphereElement, TorusElement, TorusError};
use crate::numerics::{c64, C64};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("unexpected character `{found}` at byte {at}")]
    UnexpectedChar { found: char, at: usize },
    #[error("expected {expected} at byte {at}")]
    Expected { expected: &'static str, at: usize },
    #[error("unknown name `{name}` at byte {at}")]
    UnknownName { name: String, at: usize },
    #[error("bad number `{text}` at byte {at}")]
    BadNumber { text: String, at: usize },
    #[error("exponent {exp} at byte {at} is not allowed here")]
    BadExponent { exp: i64, at: usize },
    #[error("trailing input at byte {at}")]
    Trailing { at: usize },
    #[error(transparent)]
    Algebra(#[from] TorusError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Name(String),
    Int(i64),
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        let start = i;
        match ch {
            c if c.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            '+' => out.push((Tok::Plus, i)),
            '-' => out.push((Tok::Minus, i)),
            '^' => out.push((Tok::Caret, i)),
            '(' => out.push((Tok::Open, i)),
            ')' => out.push((Tok::Close, i)),
            '*' => out.push((Tok::Star, i)),
            c if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let save = i;
                    i += 1;
                    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                        i += 1;
                    }
                    if i < bytes.len() && bytes[i].is_ascii_digit() {
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    } else {
                        i = save;
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError::BadNumber {
                    text: text.to_string(),
                    at: start,
                })?;
                let integral = text.bytes().all(|b| b.is_ascii_digit());
                if i < bytes.len() && bytes[i] == b'i' && !is_name_byte(bytes.get(i + 1)) {
                    i += 1;
                    out.push((Tok::Imag(value), start));
                } else if integral {
                    let n = text.parse().map_err(|_| ParseError::BadNumber {
                        text: text.to_string(),
                        at: start,
                    })?;
                    out.push((Tok::Int(n), start));
                } else {
                    out.push((Tok::Num(value), start));
                }
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let mut name = src[start..i].to_string();
                // `U1*` unless the star starts a product
                if i < bytes.len() && bytes[i] == b'*' && name.starts_with('U') {
                    let next = src[i + 1..].trim_start().chars().next();
                    let continues = matches!(next, Some(c) if c.is_ascii_alphanumeric() || c == '(' || c == '.');
                    if !continues {
                        name.push('*');
                        i += 1;
                    }
                }
                if name == "i" {
                    out.push((Tok::Imag(1.0), start));
                } else {
                    out.push((Tok::Name(name), start));
                }
                continue;
            }
            other => {
                return Err(ParseError::UnexpectedChar {
                    found: other,
                    at: i,
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

fn is_name_byte(b: Option<&u8>) -> bool {
    matches!(b, Some(b) if b.is_ascii_alphanumeric() || *b == b'_')
}

/// What the parser needs from an algebra.
trait Target: Sized {
    fn scalar(mode: PhaseMode, c: C64) -> Self;
    fn generator(mode: PhaseMode, name: &str) -> Option<Self>;
    fn add(&self, other: &Self) -> Result<Self, TorusError>;
    fn sub(&self, other: &Self) -> Result<Self, TorusError>;
    fn mul(&self, other: &Self) -> Result<Self, TorusError>;
    fn power(&self, k: i64) -> Result<Self, TorusError>;
}

impl Target for TorusElement {
    fn scalar(mode: PhaseMode, c: C64) -> Self {
        TorusElement::scalar(mode, c)
    }
    fn generator(mode: PhaseMode, name: &str) -> Option<Self> {
        Some(match name {
            "U1" => TorusElement::u1(mode),
            "U2" => TorusElement::u2(mode),
            "U1*" => TorusElement::u1(mode).adjoint(),
            "U2*" => TorusElement::u2(mode).adjoint(),
            _ => return None,
        })
    }
    fn add(&self, o: &Self) -> Result<Self, TorusError> {
        TorusElement::add(self, o)
    }
    fn sub(&self, o: &Self) -> Result<Self, TorusError> {
        TorusElement::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Result<Self, TorusError> {
        TorusElement::mul(self, o)
    }
    fn power(&self, k: i64) -> Result<Self, TorusError> {
        // only monomials are invertible here; their inverse is the adjoint
        if k >= 0 {
            return self.pow(k as u32);
        }
        let unitary = self.terms().count() == 1
            && self.terms().all(|(_, c)| {
                c.terms().count() == 1 && c.terms().all(|(_, z)| (z.norm() - 1.0).abs() < 1e-12)
            });
        if !unitary {
            return Err(TorusError::NegativePower);
        }
        self.adjoint().pow((-k) as u32)
    }
}

impl Target for SphereElement {
    fn scalar(mode: PhaseMode, c: C64) -> Self {
        SphereElement::scalar(mode, c)
    }
    fn generator(mode: PhaseMode, name: &str) -> Option<Self> {
        Some(match name {
            "a" => SphereElement::alpha(mode),
            "ad" => SphereElement::alpha_star(mode),
            "b" => SphereElement::beta(mode),
            "bd" => SphereElement::beta_star(mode),
            "x" => SphereElement::x(mode),
            _ => return None,
        })
    }
    fn add(&self, o: &Self) -> Result<Self, TorusError> {
        SphereElement::add(self, o)
    }
    fn sub(&self, o: &Self) -> Result<Self, TorusError> {
        SphereElement::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Result<Self, TorusError> {
        SphereElement::mul(self, o)
    }
    fn power(&self, k: i64) -> Result<Self, TorusError> {
        if k < 0 {
            return Err(TorusError::NegativePower);
        }
        let mut out = SphereElement::one(self.mode());
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    end: usize,
    mode: PhaseMode,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, a)| *a)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr<T: Target>(&mut self) -> Result<T, ParseError> {
        let negate = self.eat(&Tok::Minus);
        let mut acc: T = self.term()?;
        if negate {
            acc = T::scalar(self.mode, c64(0.0, 0.0)).sub(&acc)?;
        }
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc.add(&self.term()?)?;
            } else if self.eat(&Tok::Minus) {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<T: Target>(&mut self) -> Result<T, ParseError> {
        let mut acc: T = self.power()?;
        while self.eat(&Tok::Star) {
            acc = acc.mul(&self.power()?)?;
        }
        Ok(acc)
    }

    fn power<T: Target>(&mut self) -> Result<T, ParseError> {
        let base: T = self.atom()?;
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let at = self.at();
        let negative = self.eat(&Tok::Minus);
        match self.peek() {
            Some(&Tok::Int(k)) => {
                self.pos += 1;
                let k = if negative { -k } else { k };
                base.power(k).map_err(|e| match e {
                    TorusError::NegativePower => ParseError::BadExponent { exp: k, at },
                    other => other.into(),
                })
            }
            _ => Err(ParseError::Expected {
                expected: "integer exponent",
                at,
            }),
        }
    }

    fn atom<T: Target>(&mut self) -> Result<T, ParseError> {
        let at = self.at();
        let tok = self.peek().cloned().ok_or(ParseError::Expected {
            expected: "a term",
            at,
        })?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(T::scalar(self.mode, c64(v, 0.0))),
            Tok::Int(v) => Ok(T::scalar(self.mode, c64(v as f64, 0.0))),
            Tok::Imag(v) => Ok(T::scalar(self.mode, c64(0.0, v))),
            Tok::Name(name) => {
                T::generator(self.mode, &name).ok_or(ParseError::UnknownName { name, at })
            }
            Tok::Open => {
                let inner = self.expr()?;
                if !self.eat(&Tok::Close) {
                    return Err(ParseError::Expected {
                        expected: "`)`",
                        at: self.at(),
                    });
                }
                Ok(inner)
            }
            _ => Err(ParseError::Expected {
                expected: "a term",
                at,
            }),
        }
    }
}

fn parse<T: Target>(src: &str, mode: PhaseMode) -> Result<T, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: src.len(),
        mode,
    };
    let out = p.expr()?;
    if p.pos != toks.len() {
        return Err(ParseError::Trailing { at: p.at() });
    }
    Ok(out)
}

/// Parses e.g. `U1^2*U2^-1 + (0.5+0.5i)*1`.
pub fn parse_torus(src: &str, mode: PhaseMode) -> Result<TorusElement, ParseError> {
    parse(src, mode)
}

/// Parses e.g. `a*ad + b*bd - 1`.
pub fn parse_sphere(src: &str, mode: PhaseMode) -> Result<SphereElement, ParseError> {
    parse(src, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym() -> PhaseMode {
        PhaseMode::Symbolic
    }

    #[test]
    fn torus_example() {
        let e = parse_torus("U1^2*U2^-1 + (0.5+0.5i)*1", sym()).unwrap();
        let u1 = TorusElement::u1(sym());
        let u2 = TorusElement::u2(sym());
        let expected = u1
            .pow(2)
            .unwrap()
            .mul(&u2.adjoint())
            .unwrap()
            .add(&TorusElement::scalar(sym(), c64(0.5, 0.5)))
            .unwrap();
        assert!(e.sub(&expected).unwrap().is_zero());
    }

    #[test]
    fn torus_adjoint_names_and_products() {
        let a = parse_torus("U1* * U2", sym()).unwrap();
        let b = parse_torus("U1^-1*U2", sym()).unwrap();
        assert_eq!(a, b);
        let c = parse_torus("U1*U2", sym()).unwrap();
        assert_eq!(
            c,
            TorusElement::u1(sym())
                .mul(&TorusElement::u2(sym()))
                .unwrap()
        );
        let d = parse_torus("U2*U1 - U1*U2", PhaseMode::rational(1, 2).unwrap()).unwrap();
        // U2 U1 = -U1 U2 at p/q = 1/2
        assert_eq!(d.support(), alloc::vec![(1, 1)]);
    }

    #[test]
    fn sphere_relation_is_zero() {
        let m = PhaseMode::rational(1, 3).unwrap();
        let e = parse_sphere("a*ad + b*bd - 1", m).unwrap();
        let expected = SphereElement::alpha(m)
            .mul(&SphereElement::alpha_star(m))
            .unwrap()
            .add(
                &SphereElement::beta(m)
                    .mul(&SphereElement::beta_star(m))
                    .unwrap(),
            )
            .unwrap()
            .sub(&SphereElement::one(m))
            .unwrap();
        assert!(e.sub(&expected).unwrap().is_zero());
    }

    #[test]
    fn numbers() {
        let e = parse_sphere("-2.5e-1*x + 3i - i*(1)", sym()).unwrap();
        let expected = SphereElement::x(sym())
            .scale(c64(-0.25, 0.0))
            .add(&SphereElement::scalar(sym(), c64(0.0, 2.0)))
            .unwrap();
        assert!(e.sub(&expected).unwrap().is_zero());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_sphere("a^-1", sym()),
            Err(ParseError::BadExponent { exp: -1, .. })
        ));
        assert!(matches!(
            parse_torus("(U1+U2)^-1", sym()),
            Err(ParseError::BadExponent { .. })
        ));
        assert!(matches!(
            parse_sphere("U1", sym()),
            Err(ParseError::UnknownName { .. })
        ));
        assert!(matches!(
            parse_torus("a", sym()),
            Err(ParseError::UnknownName { .. })
        ));
        assert!(matches!(
            parse_torus("U1 +", sym()),
            Err(ParseError::Expected { .. })
        ));
        assert!(matches!(
            parse_torus("(U1", sym()),
            Err(ParseError::Expected { .. })
        ));
        assert!(matches!(
            parse_torus("U1 U2", sym()),
            Err(ParseError::Trailing { .. })
        ));
        assert!(matches!(
            parse_torus("U1 # 2", sym()),
            Err(ParseError::UnexpectedChar { found: '#', .. })
        ));
        assert!(matches!(
            parse_torus("U1^x", sym()),
            Err(ParseError::Expected { .. })
        ));
    }
}
