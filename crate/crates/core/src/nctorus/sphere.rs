//! Polynomials in the toric sphere generators `alpha`, `beta` (and the
//! central `x` of the four-sphere).
//!
//! Words are kept in the normal order `alpha^a alpha*^a' beta^b beta*^b' x^c`.
//! Moving a beta-letter of charge `s` past an alpha-letter of charge `r`
//! costs `t^{rs}`; `alpha` commutes with `alpha*`, `beta` with `beta*`, and
//! `x` is central. The sphere relation itself is not a rewrite rule.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use super::{PhaseMode, PhaseScalar, TorusError};
use crate::numerics::{c64, identity, CMatrix, C64};

/// Exponents of `alpha^a alpha*^ad beta^b beta*^bd x^x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SphereMonomial {
    pub a: u32,
    pub ad: u32,
    pub b: u32,
    pub bd: u32,
    pub x: u32,
}

impl SphereMonomial {
    pub const ONE: SphereMonomial = SphereMonomial {
        a: 0,
        ad: 0,
        b: 0,
        bd: 0,
        x: 0,
    };

    /// Charge under the first torus factor: `#alpha - #alpha*`.
    pub fn alpha_charge(&self) -> i64 {
        self.a as i64 - self.ad as i64
    }

    pub fn beta_charge(&self) -> i64 {
        self.b as i64 - self.bd as i64
    }

    /// Weighted degree: one per alpha/beta letter, two per `x`.
    pub fn weight(&self) -> u32 {
        self.a + self.ad + self.b + self.bd + 2 * self.x
    }
}

impl fmt::Display for SphereMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [
            ("a", self.a),
            ("ad", self.ad),
            ("b", self.b),
            ("bd", self.bd),
            ("x", self.x),
        ] {
            match e {
                0 => {}
                1 => parts.push(alloc::string::String::from(name)),
                _ => parts.push(alloc::format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereElement {
    mode: PhaseMode,
    terms: BTreeMap<SphereMonomial, PhaseScalar>,
}

impl SphereElement {
    pub fn zero(mode: PhaseMode) -> Self {
        Self {
            mode,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(mode: PhaseMode) -> Self {
        Self::monomial(mode, SphereMonomial::ONE)
    }

    pub fn scalar(mode: PhaseMode, c: C64) -> Self {
        Self::term(mode, SphereMonomial::ONE, PhaseScalar::constant(mode, c))
    }

    pub fn monomial(mode: PhaseMode, m: SphereMonomial) -> Self {
        Self::term(mode, m, PhaseScalar::one(mode))
    }

    pub fn term(mode: PhaseMode, m: SphereMonomial, coeff: PhaseScalar) -> Self {
        let mut out = Self::zero(mode);
        out.accumulate(m, &coeff);
        out
    }

    pub fn alpha(mode: PhaseMode) -> Self {
        Self::monomial(
            mode,
            SphereMonomial {
                a: 1,
                ..SphereMonomial::ONE
            },
        )
    }

    pub fn alpha_star(mode: PhaseMode) -> Self {
        Self::monomial(
            mode,
            SphereMonomial {
                ad: 1,
                ..SphereMonomial::ONE
            },
        )
    }

    pub fn beta(mode: PhaseMode) -> Self {
        Self::monomial(
            mode,
            SphereMonomial {
                b: 1,
                ..SphereMonomial::ONE
            },
        )
    }

    pub fn beta_star(mode: PhaseMode) -> Self {
        Self::monomial(
            mode,
            SphereMonomial {
                bd: 1,
                ..SphereMonomial::ONE
            },
        )
    }

    pub fn x(mode: PhaseMode) -> Self {
        Self::monomial(
            mode,
            SphereMonomial {
                x: 1,
                ..SphereMonomial::ONE
            },
        )
    }

    pub fn mode(&self) -> PhaseMode {
        self.mode
    }

    pub fn terms(&self) -> impl Iterator<Item = (SphereMonomial, &PhaseScalar)> + '_ {
        self.terms.iter().map(|(&k, v)| (k, v))
    }

    pub fn support(&self) -> Vec<SphereMonomial> {
        self.terms.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    /// Whether any monomial uses the central generator `x`.
    pub fn uses_x(&self) -> bool {
        self.terms.keys().any(|m| m.x > 0)
    }

    fn accumulate(&mut self, key: SphereMonomial, coeff: &PhaseScalar) {
        let entry = self
            .terms
            .entry(key)
            .or_insert_with(|| PhaseScalar::zero(coeff.mode()));
        *entry = entry.add_same(coeff);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, TorusError> {
        self.mode.ensure_same(other.mode)?;
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.accumulate(k, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TorusError> {
        self.add(&other.scale(c64(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero(self.mode);
        for (k, v) in self.terms() {
            out.accumulate(k, &v.scale(c));
        }
        out
    }

    pub fn scale_phase(&self, s: &PhaseScalar) -> Result<Self, TorusError> {
        self.mode.ensure_same(s.mode())?;
        let mut out = Self::zero(self.mode);
        for (k, v) in self.terms() {
            out.accumulate(k, &v.mul_same(s));
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, TorusError> {
        self.mode.ensure_same(other.mode)?;
        let mut out = Self::zero(self.mode);
        for (m, x) in self.terms() {
            for (n, y) in other.terms() {
                // the left beta-block passes the right alpha-block
                let swap = m.beta_charge() * n.alpha_charge();
                let key = SphereMonomial {
                    a: m.a + n.a,
                    ad: m.ad + n.ad,
                    b: m.b + n.b,
                    bd: m.bd + n.bd,
                    x: m.x + n.x,
                };
                out.accumulate(key, &x.mul_same(y).shift(swap));
            }
        }
        Ok(out)
    }

    /// Reverses each word and stars each letter, then re-normal-orders.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.mode);
        for (m, c) in self.terms() {
            let key = SphereMonomial {
                a: m.ad,
                ad: m.a,
                b: m.bd,
                bd: m.b,
                x: m.x,
            };
            // reversed word has its alpha-block (charge -r) after its beta-block (charge -s)
            let swap = m.beta_charge() * m.alpha_charge();
            out.accumulate(key, &c.conj().shift(swap));
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, TorusError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Image under the torus action `alpha -> e^{i t1} alpha`, `beta -> e^{i t2} beta`.
    pub fn torus_action(&self, t1: f64, t2: f64) -> Self {
        let mut out = Self::zero(self.mode);
        for (m, c) in self.terms() {
            let angle = t1 * m.alpha_charge() as f64 + t2 * m.beta_charge() as f64;
            out.accumulate(m, &c.scale(c64(angle.cos(), angle.sin())));
        }
        out
    }

    /// Evaluates with `alpha -> a`, `beta -> b`, `x -> x` at rational phase.
    /// Each monomial is computed as the literal matrix word.
    pub fn evaluate(&self, a: &CMatrix, b: &CMatrix, x: &CMatrix) -> Result<CMatrix, TorusError> {
        let n = a.nrows();
        let a_star = a.adjoint();
        let b_star = b.adjoint();
        let mut out = CMatrix::zeros(n, n);
        for (m, c) in self.terms() {
            let mut word = identity(n);
            for (mat, e) in [
                (a, m.a),
                (&a_star, m.ad),
                (b, m.b),
                (&b_star, m.bd),
                (x, m.x),
            ] {
                for _ in 0..e {
                    word = &word * mat;
                }
            }
            out += word * c.value()?;
        }
        Ok(out)
    }
}

impl fmt::Display for SphereElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{c}]*{m}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nctorus::{clock_shift, root_of_unity};
    use crate::numerics::{distance, seeded_rng};
    use rand::Rng;

    fn random_sphere(mode: PhaseMode, seed: u64, terms: usize, with_x: bool) -> SphereElement {
        let mut rng = seeded_rng(seed);
        let mut out = SphereElement::zero(mode);
        for _ in 0..terms {
            let m = SphereMonomial {
                a: rng.random_range(0..3),
                ad: rng.random_range(0..3),
                b: rng.random_range(0..3),
                bd: rng.random_range(0..3),
                x: if with_x { rng.random_range(0..2) } else { 0 },
            };
            let c = c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            out = out
                .add(&SphereElement::term(
                    mode,
                    m,
                    PhaseScalar::constant(mode, c),
                ))
                .unwrap();
        }
        out
    }

    fn generators(q: i64, p: i64, seed: u64) -> (CMatrix, CMatrix, CMatrix) {
        let (r1, r2) = clock_shift(q, p).unwrap();
        let mut rng = seeded_rng(seed);
        let chi: f64 = rng.random_range(0.1..1.4);
        let psi: f64 = rng.random_range(-1.4..1.4);
        let z1 = root_of_unity(rng.random_range(0..97), 97);
        let z2 = root_of_unity(rng.random_range(0..97), 97);
        let a = r1 * (z1 * (chi.cos() * psi.cos()));
        let b = r2 * (z2 * (chi.sin() * psi.cos()));
        let x = identity(q as usize) * c64(psi.sin(), 0.0);
        (a, b, x)
    }

    #[test]
    fn relations_rewrite_exactly() {
        let s = PhaseMode::Symbolic;
        let t = PhaseScalar::t_power(s, 1);
        let ba = SphereElement::beta(s)
            .mul(&SphereElement::alpha(s))
            .unwrap();
        let ab = SphereElement::alpha(s)
            .mul(&SphereElement::beta(s))
            .unwrap();
        assert_eq!(ba, ab.scale_phase(&t).unwrap());
        let a = SphereElement::alpha(s);
        let ad = SphereElement::alpha_star(s);
        assert!(a.commutator(&ad).unwrap().is_zero());
        let b = SphereElement::beta(s);
        let bd = SphereElement::beta_star(s);
        assert!(b.commutator(&bd).unwrap().is_zero());
        let x = SphereElement::x(s);
        for g in [&a, &ad, &b, &bd] {
            assert!(x.commutator(g).unwrap().is_zero());
        }
        // beta alpha* = t^{-1} alpha* beta
        let lhs = b.mul(&ad).unwrap();
        let rhs = ad
            .mul(&b)
            .unwrap()
            .scale_phase(&PhaseScalar::t_power(s, -1))
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn rewriting_is_associative_and_adjoint_is_involutive() {
        let s = PhaseMode::Symbolic;
        for seed in 0..6 {
            let e = random_sphere(s, seed, 4, true);
            let f = random_sphere(s, seed + 10, 4, true);
            let g = random_sphere(s, seed + 20, 4, true);
            let left = e.mul(&f).unwrap().mul(&g).unwrap();
            let right = e.mul(&f.mul(&g).unwrap()).unwrap();
            assert!(left.sub(&right).unwrap().max_abs() < 1e-12);
            assert!(e.adjoint().adjoint().sub(&e).unwrap().max_abs() < 1e-14);
            let ef_star = e.mul(&f).unwrap().adjoint();
            let f_star_e_star = f.adjoint().mul(&e.adjoint()).unwrap();
            assert!(ef_star.sub(&f_star_e_star).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn evaluation_is_a_star_homomorphism() {
        for (p, q) in [(1, 2), (1, 3), (2, 5)] {
            let mode = PhaseMode::rational(p, q).unwrap();
            for seed in 0..4 {
                let (a, b, x) = generators(q, p, seed);
                let e = random_sphere(mode, seed, 4, true);
                let f = random_sphere(mode, seed + 40, 4, true);
                let ee = e.evaluate(&a, &b, &x).unwrap();
                let ff = f.evaluate(&a, &b, &x).unwrap();
                let ef = e.mul(&f).unwrap().evaluate(&a, &b, &x).unwrap();
                assert!(distance(&ef, &(&ee * &ff)) < 1e-10);
                let e_star = e.adjoint().evaluate(&a, &b, &x).unwrap();
                assert!(distance(&e_star, &ee.adjoint()) < 1e-10);
            }
        }
    }

    #[test]
    fn torus_action_fixes_balanced_monomials() {
        let s = PhaseMode::Symbolic;
        let m = SphereMonomial {
            a: 2,
            ad: 2,
            b: 1,
            bd: 1,
            x: 1,
        };
        let e = SphereElement::monomial(s, m);
        assert!(e.torus_action(0.3, -1.1).sub(&e).unwrap().max_abs() < 1e-15);
        let a = SphereElement::alpha(s);
        assert!(a.torus_action(0.3, 0.0).sub(&a).unwrap().max_abs() > 0.1);
    }
}
