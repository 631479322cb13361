//! Laurent polynomials in the deformation phase `t = e^{2 pi i theta}`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use num_integer::Integer;

use crate::numerics::{c64, C64};

use super::TorusError;

/// Coefficients below this magnitude are dropped.
pub const PRUNE: f64 = 1e-14;

/// How the phase `t` is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseMode {
    /// `t` is a formal variable; exponents range over all integers.
    Symbolic,
    /// `t = e^{2 pi i p / q}` with `gcd(p, q) = 1`; exponents live mod `q`.
    Rational { p: i64, q: i64 },
}

impl PhaseMode {
    pub fn rational(p: i64, q: i64) -> Result<Self, TorusError> {
        if q < 1 || p.gcd(&q) != 1 {
            return Err(TorusError::BadParameters { p, q });
        }
        Ok(PhaseMode::Rational {
            p: p.rem_euclid(q),
            q,
        })
    }

    pub(crate) fn reduce(self, k: i64) -> i64 {
        match self {
            PhaseMode::Symbolic => k,
            PhaseMode::Rational { q, .. } => k.rem_euclid(q),
        }
    }

    /// `e^{2 pi i p / q}` in rational mode.
    pub fn zeta(self) -> Option<C64> {
        match self {
            PhaseMode::Symbolic => None,
            PhaseMode::Rational { p, q } => Some(root_of_unity(p, q)),
        }
    }

    pub(crate) fn ensure_same(self, other: PhaseMode) -> Result<(), TorusError> {
        if self != other {
            return Err(TorusError::ModeMismatch);
        }
        Ok(())
    }
}

/// `e^{2 pi i k / q}`, with the angle reduced first so large `k` stays exact.
pub fn root_of_unity(k: i64, q: i64) -> C64 {
    let r = k.rem_euclid(q);
    let angle = 2.0 * PI * (r as f64) / (q as f64);
    c64(angle.cos(), angle.sin())
}

/// Finitely supported `sum_k c_k t^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseScalar {
    mode: PhaseMode,
    terms: BTreeMap<i64, C64>,
}

impl PhaseScalar {
    pub fn zero(mode: PhaseMode) -> Self {
        Self {
            mode,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(mode: PhaseMode, c: C64) -> Self {
        Self::monomial(mode, 0, c)
    }

    pub fn one(mode: PhaseMode) -> Self {
        Self::constant(mode, c64(1.0, 0.0))
    }

    /// `c t^k`.
    pub fn monomial(mode: PhaseMode, k: i64, c: C64) -> Self {
        let mut s = Self::zero(mode);
        s.accumulate(k, c);
        s.prune();
        s
    }

    /// `t^k`.
    pub fn t_power(mode: PhaseMode, k: i64) -> Self {
        Self::monomial(mode, k, c64(1.0, 0.0))
    }

    pub fn mode(&self) -> PhaseMode {
        self.mode
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn coefficient(&self, k: i64) -> C64 {
        self.terms
            .get(&self.mode.reduce(k))
            .copied()
            .unwrap_or(c64(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient magnitude; the size used by approximate equality.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn accumulate(&mut self, k: i64, c: C64) {
        let k = self.mode.reduce(k);
        *self.terms.entry(k).or_insert(c64(0.0, 0.0)) += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE);
    }

    pub fn add(&self, other: &Self) -> Result<Self, TorusError> {
        self.mode.ensure_same(other.mode)?;
        Ok(self.add_same(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TorusError> {
        self.mode.ensure_same(other.mode)?;
        Ok(self.add_same(&other.scale(c64(-1.0, 0.0))))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, TorusError> {
        self.mode.ensure_same(other.mode)?;
        Ok(self.mul_same(other))
    }

    pub(crate) fn add_same(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.accumulate(k, c);
        }
        out.prune();
        out
    }

    pub(crate) fn mul_same(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.mode);
        for (j, a) in self.terms() {
            for (k, b) in other.terms() {
                out.accumulate(j + k, a * b);
            }
        }
        out.prune();
        out
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        if k == 0 {
            return self.clone();
        }
        let mut out = Self::zero(self.mode);
        for (j, c) in self.terms() {
            out.accumulate(j + k, c);
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out.prune();
        out
    }

    /// `c_k t^k -> conj(c_k) t^{-k}`.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.mode);
        for (k, c) in self.terms() {
            out.accumulate(-k, c.conj());
        }
        out
    }

    /// Numeric value with `t = e^{2 pi i theta}`.
    pub fn evaluate(&self, theta: f64) -> C64 {
        self.terms()
            .map(|(k, c)| {
                let angle = 2.0 * PI * theta * (k as f64);
                c * c64(angle.cos(), angle.sin())
            })
            .sum()
    }

    /// Numeric value in rational mode.
    pub fn value(&self) -> Result<C64, TorusError> {
        match self.mode {
            PhaseMode::Symbolic => Err(TorusError::ModeMismatch),
            PhaseMode::Rational { p, q } => {
                Ok(self.terms().map(|(k, c)| c * root_of_unity(p * k, q)).sum())
            }
        }
    }

    pub fn exponents(&self) -> Vec<i64> {
        self.terms.keys().copied().collect()
    }
}

impl fmt::Display for PhaseScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            if k != 0 {
                write!(f, "*t^{k}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_mode_validation() {
        assert!(PhaseMode::rational(1, 3).is_ok());
        assert!(PhaseMode::rational(2, 4).is_err());
        assert!(PhaseMode::rational(1, 0).is_err());
        assert_eq!(
            PhaseMode::rational(0, 1).unwrap(),
            PhaseMode::Rational { p: 0, q: 1 }
        );
        assert_eq!(
            PhaseMode::rational(-1, 3).unwrap(),
            PhaseMode::Rational { p: 2, q: 3 }
        );
    }

    #[test]
    fn rational_exponents_reduce() {
        let mode = PhaseMode::rational(1, 3).unwrap();
        let s = PhaseScalar::t_power(mode, 7);
        assert_eq!(s.exponents(), alloc::vec![1]);
        let inv = PhaseScalar::t_power(mode, -1);
        assert_eq!(inv.exponents(), alloc::vec![2]);
        let prod = s.mul(&inv).unwrap();
        assert_eq!(prod, PhaseScalar::one(mode));
    }

    #[test]
    fn conjugation_inverts_exponents() {
        let s = PhaseScalar::monomial(PhaseMode::Symbolic, 3, c64(1.0, 2.0));
        let c = s.conj();
        assert_eq!(c.exponents(), alloc::vec![-3]);
        assert_eq!(c.coefficient(-3), c64(1.0, -2.0));
        assert_eq!(c.conj(), s);
    }

    #[test]
    fn evaluation_matches_rational_value() {
        let mode = PhaseMode::rational(2, 5).unwrap();
        let s = PhaseScalar::monomial(mode, 1, c64(0.5, 0.0))
            .add(&PhaseScalar::monomial(mode, 3, c64(0.0, 1.0)))
            .unwrap();
        let v = s.value().unwrap();
        let direct = PhaseScalar::monomial(PhaseMode::Symbolic, 1, c64(0.5, 0.0))
            .add(&PhaseScalar::monomial(
                PhaseMode::Symbolic,
                3,
                c64(0.0, 1.0),
            ))
            .unwrap()
            .evaluate(0.4);
        assert!((v - direct).norm() < 1e-12);
    }

    #[test]
    fn mode_mismatch_is_an_error() {
        let a = PhaseScalar::one(PhaseMode::Symbolic);
        let b = PhaseScalar::one(PhaseMode::rational(1, 2).unwrap());
        assert_eq!(a.mul(&b), Err(TorusError::ModeMismatch));
    }
}
