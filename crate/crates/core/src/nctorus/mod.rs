//! The noncommutative 2-torus as an exact Fourier-polynomial algebra.
//!
//! Elements are finitely supported sums `sum a_{mn} U1^m U2^n` in the
//! normal-ordered basis, with `U2 U1 = t U1 U2`. The phase `t` is either a
//! formal variable or an exact root of unity, see [`PhaseMode`]. At rational
//! phase `p/q` the clock and shift matrices give the `q x q` fiber
//! representations.

mod parse;
mod phase;
pub mod sphere;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

pub use parse::{parse_sphere, parse_torus, ParseError};
pub use phase::{root_of_unity, PhaseMode, PhaseScalar, PRUNE};
pub use sphere::{SphereElement, SphereMonomial};

use crate::numerics::{c64, distance, identity, CMatrix, C64};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TorusError {
    #[error("operands use different phase modes")]
    ModeMismatch,
    #[error("invalid rational phase p/q = {p}/{q}: need q >= 1 and gcd(p, q) = 1")]
    BadParameters { p: i64, q: i64 },
    #[error("point is not on the unit torus (|z| = {modulus})")]
    NotOnTorus { modulus: f64 },
    #[error("tracial state vanishes (|tau(u)| = {modulus:e}); phase map undefined")]
    VanishingTrace { modulus: f64 },
    #[error("generator `{0}` does not belong to this algebra")]
    ForeignGenerator(&'static str),
    #[error("negative power of a non-invertible generator")]
    NegativePower,
}

/// Element of the noncommutative torus in normal-ordered form.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusElement {
    mode: PhaseMode,
    terms: BTreeMap<(i64, i64), PhaseScalar>,
}

impl TorusElement {
    pub fn zero(mode: PhaseMode) -> Self {
        Self {
            mode,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(mode: PhaseMode) -> Self {
        Self::monomial(mode, 0, 0)
    }

    pub fn scalar(mode: PhaseMode, c: C64) -> Self {
        Self::term(mode, 0, 0, PhaseScalar::constant(mode, c))
    }

    /// `U1^m U2^n`.
    pub fn monomial(mode: PhaseMode, m: i64, n: i64) -> Self {
        Self::term(mode, m, n, PhaseScalar::one(mode))
    }

    /// `coeff * U1^m U2^n`.
    pub fn term(mode: PhaseMode, m: i64, n: i64, coeff: PhaseScalar) -> Self {
        let mut out = Self::zero(mode);
        out.accumulate((m, n), &coeff);
        out
    }

    pub fn u1(mode: PhaseMode) -> Self {
        Self::monomial(mode, 1, 0)
    }

    pub fn u2(mode: PhaseMode) -> Self {
        Self::monomial(mode, 0, 1)
    }

    pub fn mode(&self) -> PhaseMode {
        self.mode
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), &PhaseScalar)> + '_ {
        self.terms.iter().map(|(&k, v)| (k, v))
    }

    pub fn support(&self) -> Vec<(i64, i64)> {
        self.terms.keys().copied().collect()
    }

    pub fn coefficient(&self, m: i64, n: i64) -> PhaseScalar {
        self.terms
            .get(&(m, n))
            .cloned()
            .unwrap_or_else(|| PhaseScalar::zero(self.mode))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient magnitude over all monomials and phase powers.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    /// Largest absolute exponent in the support.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|&(m, n)| m.abs().max(n.abs()))
            .max()
            .unwrap_or(0)
    }

    fn accumulate(&mut self, key: (i64, i64), coeff: &PhaseScalar) {
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

    /// Product under `(U1^a U2^b)(U1^c U2^d) = t^{bc} U1^{a+c} U2^{b+d}`.
    pub fn mul(&self, other: &Self) -> Result<Self, TorusError> {
        self.mode.ensure_same(other.mode)?;
        let mut out = Self::zero(self.mode);
        for ((a, b), x) in self.terms() {
            for ((c, d), y) in other.terms() {
                let coeff = x.mul_same(y).shift(b * c);
                out.accumulate((a + c, b + d), &coeff);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero(self.mode);
        for (k, v) in self.terms() {
            out.accumulate(k, &v.scale(c));
        }
        out
    }

    /// Multiplies every coefficient by a phase polynomial.
    pub fn scale_phase(&self, s: &PhaseScalar) -> Result<Self, TorusError> {
        self.mode.ensure_same(s.mode())?;
        let mut out = Self::zero(self.mode);
        for (k, v) in self.terms() {
            out.accumulate(k, &v.mul_same(s));
        }
        Ok(out)
    }

    /// `(c U1^m U2^n)* = conj(c) t^{mn} U1^{-m} U2^{-n}`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.mode);
        for ((m, n), c) in self.terms() {
            out.accumulate((-m, -n), &c.conj().shift(m * n));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Result<Self, TorusError> {
        let mut out = Self::one(self.mode);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, TorusError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((m, n), c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{c}]")?;
            if m != 0 {
                write!(f, "*U1^{m}")?;
            }
            if n != 0 {
                write!(f, "*U2^{n}")?;
            }
        }
        Ok(())
    }
}

/// Truncated exponential series `sum_k x^k / k!`, stopped once a term falls
/// below the pruning threshold (or after `max_terms` terms).
pub fn torus_exp(x: &TorusElement, max_terms: u32) -> TorusElement {
    let mut sum = TorusElement::one(x.mode());
    let mut term = TorusElement::one(x.mode());
    for k in 1..=max_terms {
        term = term
            .mul(x)
            .expect("same mode")
            .scale(c64(1.0 / k as f64, 0.0));
        if term.max_abs() < PRUNE {
            break;
        }
        sum = sum.add(&term).expect("same mode");
    }
    sum
}

/// Clock and shift matrices `(R1, R2)` of size `q` with `R2 R1 = zeta R1 R2`.
///
/// Both assignments of clock/shift to `(R1, R2)` are tried and the one
/// satisfying the relation is returned.
pub fn clock_shift(q: i64, p: i64) -> Result<(CMatrix, CMatrix), TorusError> {
    let mode = PhaseMode::rational(p, q)?;
    let zeta = mode.zeta().expect("rational");
    let n = q as usize;
    let clock = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            root_of_unity(mode_p(mode) * i as i64, q)
        } else {
            c64(0.0, 0.0)
        }
    });
    let shift = CMatrix::from_fn(n, n, |i, j| {
        if i == (j + 1) % n {
            c64(1.0, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    let holds = |r1: &CMatrix, r2: &CMatrix| distance(&(r2 * r1), &((r1 * r2) * zeta)) < 1e-12;
    if holds(&shift, &clock) {
        Ok((shift, clock))
    } else if holds(&clock, &shift) {
        Ok((clock, shift))
    } else {
        panic!("neither clock/shift assignment satisfies R2 R1 = zeta R1 R2");
    }
}

fn mode_p(mode: PhaseMode) -> i64 {
    match mode {
        PhaseMode::Rational { p, .. } => p,
        PhaseMode::Symbolic => 0,
    }
}

/// `R^k` for a unitary `R` with `R^q = 1`, using only non-negative powers.
pub(crate) fn unitary_power(r: &CMatrix, k: i64, q: i64) -> CMatrix {
    let e = k.rem_euclid(q);
    let mut out = identity(r.nrows());
    for _ in 0..e {
        out = &out * r;
    }
    out
}

fn check_on_torus(z: C64) -> Result<(), TorusError> {
    let modulus = z.norm();
    if (modulus - 1.0).abs() > 1e-12 {
        return Err(TorusError::NotOnTorus { modulus });
    }
    Ok(())
}

/// Evaluation `U1 -> z1 R1`, `U2 -> z2 R2` into `M_q` at rational phase.
pub fn torus_rep(a: &TorusElement, z1: C64, z2: C64) -> Result<CMatrix, TorusError> {
    let (p, q) = match a.mode() {
        PhaseMode::Symbolic => return Err(TorusError::ModeMismatch),
        PhaseMode::Rational { p, q } => (p, q),
    };
    check_on_torus(z1)?;
    check_on_torus(z2)?;
    let (r1, r2) = clock_shift(q, p)?;
    let n = q as usize;
    let mut out = CMatrix::zeros(n, n);
    for ((m, k), c) in a.terms() {
        let scalar = c.value()? * z1.powi(m as i32) * z2.powi(k as i32);
        out += unitary_power(&r1, m, q) * unitary_power(&r2, k, q) * scalar;
    }
    Ok(out)
}

/// The tracial state: the coefficient of `U1^0 U2^0`.
pub fn trace_state(a: &TorusElement) -> PhaseScalar {
    a.coefficient(0, 0)
}

/// Normalized matrix trace of [`torus_rep`] averaged over the grid of
/// `samples`-th roots of unity in both torus coordinates. Exact for
/// elements whose exponents are smaller than `samples` in absolute value.
pub fn averaged_matrix_trace(a: &TorusElement, samples: i64) -> Result<C64, TorusError> {
    let q = match a.mode() {
        PhaseMode::Symbolic => return Err(TorusError::ModeMismatch),
        PhaseMode::Rational { q, .. } => q,
    };
    let mut total = c64(0.0, 0.0);
    for i in 0..samples {
        for j in 0..samples {
            let m = torus_rep(a, root_of_unity(i, samples), root_of_unity(j, samples))?;
            total += m.trace() / c64(q as f64, 0.0);
        }
    }
    Ok(total / c64((samples * samples) as f64, 0.0))
}

/// Smallest sample count making [`averaged_matrix_trace`] exact for `a`.
pub fn exact_sample_count(a: &TorusElement) -> i64 {
    a.degree() + 1
}

/// Below this `|tau(u)|` the phase map is reported as undefined.
pub const PHASE_FLOOR: f64 = 1e-8;

/// `tau(u) / |tau(u)|` at rational phase.
pub fn phase_map(u: &TorusElement) -> Result<C64, TorusError> {
    normalize_phase(trace_state(u).value()?)
}

/// `tau(u) / |tau(u)|` with the phase variable set to `e^{2 pi i theta}`.
pub fn phase_map_at(u: &TorusElement, theta: f64) -> Result<C64, TorusError> {
    normalize_phase(trace_state(u).evaluate(theta))
}

fn normalize_phase(tau: C64) -> Result<C64, TorusError> {
    let modulus = tau.norm();
    if modulus < PHASE_FLOOR {
        return Err(TorusError::VanishingTrace { modulus });
    }
    Ok(tau / c64(modulus, 0.0))
}

/// Monomials `U1^m U2^n` with `|m|, |n| <= d` commuting with both generators.
///
/// `U1^m U2^n` commutes with `U1` iff `t^n = 1` and with `U2` iff `t^m = 1`;
/// with a formal `t` that leaves only `(0, 0)`, at phase `p/q` the
/// exponents divisible by `q`.
pub fn center_scan(mode: PhaseMode, d: i64) -> Vec<(i64, i64)> {
    let trivial = |k: i64| match mode {
        PhaseMode::Symbolic => k == 0,
        PhaseMode::Rational { q, .. } => k.rem_euclid(q) == 0,
    };
    let mut out = Vec::new();
    for m in -d..=d {
        for n in -d..=d {
            if trivial(m) && trivial(n) {
                out.push((m, n));
            }
        }
    }
    out
}

/// [`center_scan`] with a formal phase.
pub fn symbolic_center(d: i64) -> Vec<(i64, i64)> {
    center_scan(PhaseMode::Symbolic, d)
}
