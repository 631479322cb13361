//! Toric spheres at rational phase: fiber evaluation over base points,
//! fiber-dimension strata, norm profiles and the phase-map slice.
//!
//! Over a base point the sphere generators evaluate to scaled clock/shift
//! matrices (`alpha -> r z1 R1`, `beta -> s z2 R2`, `x -> x I`). Which radii
//! vanish decides the stratum, and with it the fiber: all of `M_q` in the
//! interior, a commutative `C^q` on an edge, `C` at a pole.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use crate::nctorus::{
    averaged_matrix_trace, clock_shift, exact_sample_count, phase_map, root_of_unity, torus_rep,
    trace_state, PhaseMode, SphereElement, SphereMonomial, TorusElement, TorusError,
};
use crate::numerics::{c64, distance, generated_algebra, identity, op_norm, CMatrix, C64};
use crate::report::{Check, Report, Scope, Value};

/// Radii below this count as vanishing.
pub const RADIUS_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ToricError {
    #[error("base point out of range: {0}")]
    OutOfRange(String),
    #[error("grid step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sphere {
    S3,
    S4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StratumLabel {
    /// Both radii positive.
    Interior,
    /// Only `alpha` survives.
    EdgeAlpha,
    /// Only `beta` survives.
    EdgeBeta,
    /// Only `x` survives.
    Pole,
}

impl StratumLabel {
    pub fn expected_dim(self, q: i64) -> usize {
        let q = q as usize;
        match self {
            StratumLabel::Interior => q * q,
            StratumLabel::EdgeAlpha | StratumLabel::EdgeBeta => q,
            StratumLabel::Pole => 1,
        }
    }

    pub fn from_radii(r: f64, s: f64) -> Self {
        match (r.abs() > RADIUS_FLOOR, s.abs() > RADIUS_FLOOR) {
            (true, true) => StratumLabel::Interior,
            (true, false) => StratumLabel::EdgeAlpha,
            (false, true) => StratumLabel::EdgeBeta,
            (false, false) => StratumLabel::Pole,
        }
    }
}

impl fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StratumLabel::Interior => "interior",
            StratumLabel::EdgeAlpha => "edge-alpha",
            StratumLabel::EdgeBeta => "edge-beta",
            StratumLabel::Pole => "pole",
        })
    }
}

fn unit_modulus(z: C64, name: &str) -> Result<(), ToricError> {
    if (z.norm() - 1.0).abs() > 1e-12 {
        return Err(ToricError::OutOfRange(alloc::format!(
            "|{name}| = {}",
            z.norm()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasePoint3 {
    chi: f64,
    z1: C64,
    z2: C64,
}

impl BasePoint3 {
    pub fn new(chi: f64, z1: C64, z2: C64) -> Result<Self, ToricError> {
        if !(0.0..=FRAC_PI_2).contains(&chi) {
            return Err(ToricError::OutOfRange(alloc::format!("chi = {chi}")));
        }
        unit_modulus(z1, "z1")?;
        unit_modulus(z2, "z2")?;
        Ok(Self { chi, z1, z2 })
    }

    pub fn at(chi: f64) -> Result<Self, ToricError> {
        Self::new(chi, c64(1.0, 0.0), c64(1.0, 0.0))
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn radii(&self) -> (f64, f64) {
        (self.chi.cos(), self.chi.sin())
    }

    pub fn stratum(&self) -> StratumLabel {
        let (r, s) = self.radii();
        StratumLabel::from_radii(r, s)
    }
}

/// `r = cos chi cos psi`, `s = sin chi cos psi`, `x = sin psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasePoint4 {
    chi: f64,
    psi: f64,
    z1: C64,
    z2: C64,
}

impl BasePoint4 {
    pub fn new(chi: f64, psi: f64, z1: C64, z2: C64) -> Result<Self, ToricError> {
        if !(0.0..=FRAC_PI_2).contains(&chi) || !(-FRAC_PI_2..=FRAC_PI_2).contains(&psi) {
            return Err(ToricError::OutOfRange(alloc::format!(
                "(chi, psi) = ({chi}, {psi})"
            )));
        }
        unit_modulus(z1, "z1")?;
        unit_modulus(z2, "z2")?;
        Ok(Self { chi, psi, z1, z2 })
    }

    pub fn at(chi: f64, psi: f64) -> Result<Self, ToricError> {
        Self::new(chi, psi, c64(1.0, 0.0), c64(1.0, 0.0))
    }

    /// From `(r, s, x)` with `r, s >= 0`, `r^2 + s^2 + x^2 = 1`.
    pub fn from_rsx(r: f64, s: f64, x: f64, z1: C64, z2: C64) -> Result<Self, ToricError> {
        if r < 0.0 || s < 0.0 || (r * r + s * s + x * x - 1.0).abs() > 1e-12 {
            return Err(ToricError::OutOfRange(alloc::format!(
                "(r, s, x) = ({r}, {s}, {x})"
            )));
        }
        let psi = x.clamp(-1.0, 1.0).asin();
        let chi = if r == 0.0 && s == 0.0 {
            0.0
        } else {
            s.atan2(r)
        };
        Self::new(chi, psi, z1, z2)
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn rsx(&self) -> (f64, f64, f64) {
        let c = self.psi.cos();
        (self.chi.cos() * c, self.chi.sin() * c, self.psi.sin())
    }

    pub fn stratum(&self) -> StratumLabel {
        s4_stratum(self)
    }
}

pub fn s4_stratum(pt: &BasePoint4) -> StratumLabel {
    let (r, s, _) = pt.rsx();
    StratumLabel::from_radii(r, s)
}

fn rational(mode: PhaseMode) -> Result<(i64, i64), TorusError> {
    match mode {
        PhaseMode::Rational { p, q } => Ok((p, q)),
        PhaseMode::Symbolic => Err(TorusError::ModeMismatch),
    }
}

/// Generator images `(alpha, beta, x)` over radii `(r, s, x)`.
fn generator_images(
    r1: &CMatrix,
    r2: &CMatrix,
    (r, s, x): (f64, f64, f64),
    z1: C64,
    z2: C64,
) -> (CMatrix, CMatrix, CMatrix) {
    let snap = |v: f64| if v.abs() <= RADIUS_FLOOR { 0.0 } else { v };
    let n = r1.nrows();
    (
        r1 * (z1 * snap(r)),
        r2 * (z2 * snap(s)),
        identity(n) * c64(snap(x), 0.0),
    )
}

/// `alpha -> cos chi z1 R1`, `beta -> sin chi z2 R2`.
pub fn s3_eval(e: &SphereElement, pt: &BasePoint3) -> Result<CMatrix, ToricError> {
    if e.uses_x() {
        return Err(TorusError::ForeignGenerator("x").into());
    }
    let (p, q) = rational(e.mode())?;
    let (r1, r2) = clock_shift(q, p)?;
    let (r, s) = pt.radii();
    let (a, b, x) = generator_images(&r1, &r2, (r, s, 0.0), pt.z1, pt.z2);
    Ok(e.evaluate(&a, &b, &x)?)
}

/// `alpha -> cos chi cos psi z1 R1`, `beta -> sin chi cos psi z2 R2`,
/// `x -> sin psi`.
pub fn s4_eval(e: &SphereElement, pt: &BasePoint4) -> Result<CMatrix, ToricError> {
    let (p, q) = rational(e.mode())?;
    let (r1, r2) = clock_shift(q, p)?;
    let (a, b, x) = generator_images(&r1, &r2, pt.rsx(), pt.z1, pt.z2);
    Ok(e.evaluate(&a, &b, &x)?)
}

fn fiber_dim_at(r1: &CMatrix, r2: &CMatrix, rsx: (f64, f64, f64), z1: C64, z2: C64) -> usize {
    let (a, b, x) = generator_images(r1, r2, rsx, z1, z2);
    generated_algebra(&[a, b, x], true)
        .expect("square generators of one size")
        .dim()
}

/// Dimension of the unital algebra generated by `cos chi R1`, `sin chi R2`.
pub fn s3_fiber_dimension(chi: f64, p: i64, q: i64) -> Result<usize, ToricError> {
    let (r1, r2) = clock_shift(q, p)?;
    let pt = BasePoint3::at(chi)?;
    let (r, s) = pt.radii();
    Ok(fiber_dim_at(&r1, &r2, (r, s, 0.0), pt.z1, pt.z2))
}

/// As [`s3_fiber_dimension`], over a four-sphere base point.
pub fn s4_fiber_dimension(pt: &BasePoint4, p: i64, q: i64) -> Result<usize, ToricError> {
    let (r1, r2) = clock_shift(q, p)?;
    Ok(fiber_dim_at(&r1, &r2, pt.rsx(), pt.z1, pt.z2))
}

/// Fiber dimensions at one base point over all `q^2` root-of-unity torus
/// coordinates.
pub fn fiber_dims_over_torus(
    sphere: Sphere,
    chi: f64,
    psi: f64,
    p: i64,
    q: i64,
) -> Result<Vec<usize>, ToricError> {
    let (r1, r2) = clock_shift(q, p)?;
    let rsx = match sphere {
        Sphere::S3 => {
            let pt = BasePoint3::at(chi)?;
            let (r, s) = pt.radii();
            (r, s, 0.0)
        }
        Sphere::S4 => BasePoint4::at(chi, psi)?.rsx(),
    };
    let mut out = Vec::with_capacity((q * q) as usize);
    for i in 0..q {
        for j in 0..q {
            out.push(fiber_dim_at(
                &r1,
                &r2,
                rsx,
                root_of_unity(i, q),
                root_of_unity(j, q),
            ));
        }
    }
    Ok(out)
}

/// Torus-invariant monomials of weighted degree at most `2d`, with their
/// exact pairwise commutativity.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSubalgebra {
    pub monomials: Vec<SphereMonomial>,
    pub commutative: bool,
}

/// Monomials with `#alpha = #alpha*` and `#beta = #beta*` (and any power of
/// `x` on the four-sphere); `alpha`, `beta` and their adjoints weigh one,
/// `x` weighs two.
pub fn invariant_subalgebra(d: u32, sphere: Sphere) -> InvariantSubalgebra {
    let mut monomials = Vec::new();
    let max_x = if sphere == Sphere::S4 { d } else { 0 };
    for a in 0..=d {
        for b in 0..=(d - a) {
            for x in 0..=max_x.min(d - a - b) {
                monomials.push(SphereMonomial {
                    a,
                    ad: a,
                    b,
                    bd: b,
                    x,
                });
            }
        }
    }
    monomials.sort();
    let mode = PhaseMode::Symbolic;
    let elements: Vec<SphereElement> = monomials
        .iter()
        .map(|&m| SphereElement::monomial(mode, m))
        .collect();
    let commutative = elements.iter().enumerate().all(|(i, e)| {
        elements[i + 1..]
            .iter()
            .all(|f| e.commutator(f).expect("same mode").is_zero())
    });
    InvariantSubalgebra {
        monomials,
        commutative,
    }
}

/// Drops every monomial containing `beta` or `beta*`.
pub fn alpha_only(e: &SphereElement) -> SphereElement {
    let mut out = SphereElement::zero(e.mode());
    for (m, c) in e.terms() {
        if m.b == 0 && m.bd == 0 {
            out = out
                .add(&SphereElement::term(e.mode(), m, c.clone()))
                .expect("same mode");
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub chi: f64,
    pub psi: Option<f64>,
    pub r: f64,
    pub s: f64,
    pub x: f64,
    pub norm: f64,
    pub stratum: StratumLabel,
    pub fiber_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormProfile {
    pub rows: Vec<ProfileRow>,
    /// Largest norm difference between grid neighbours at step `h`.
    pub jump: f64,
    /// The same at step `h / 2`.
    pub jump_half: f64,
}

impl NormProfile {
    /// `jump(h / 2) / jump(h)`; about `1/2` for Lipschitz profiles.
    pub fn ratio(&self) -> f64 {
        if self.jump == 0.0 {
            0.0
        } else {
            self.jump_half / self.jump
        }
    }
}

struct Evaluator {
    r1: CMatrix,
    r2: CMatrix,
    q: i64,
}

impl Evaluator {
    fn new(e: &SphereElement, sphere: Sphere) -> Result<Self, ToricError> {
        if sphere == Sphere::S3 && e.uses_x() {
            return Err(TorusError::ForeignGenerator("x").into());
        }
        let (p, q) = rational(e.mode())?;
        let (r1, r2) = clock_shift(q, p)?;
        Ok(Self { r1, r2, q })
    }

    /// Maximum of the evaluated norm over the `q^2` canonical torus points.
    fn fiber_norm(&self, e: &SphereElement, rsx: (f64, f64, f64)) -> Result<f64, ToricError> {
        let mut best: f64 = 0.0;
        for i in 0..self.q {
            for j in 0..self.q {
                let z1 = root_of_unity(i, self.q);
                let z2 = root_of_unity(j, self.q);
                let (a, b, x) = generator_images(&self.r1, &self.r2, rsx, z1, z2);
                best = best.max(op_norm(&e.evaluate(&a, &b, &x)?));
            }
        }
        Ok(best)
    }
}

fn steps(span: f64, h: f64) -> usize {
    ((span / h).ceil() as usize).max(1)
}

struct NormGrid {
    points: Vec<(f64, f64)>,
    norms: Vec<f64>,
    jump: f64,
}

/// Norm grid at step at most `h`, with its largest neighbour jump. `chi` runs over `[0, pi/2]` and, on the
/// four-sphere, `psi` over `[-pi/2, pi/2]`.
fn norm_grid(
    ev: &Evaluator,
    e: &SphereElement,
    sphere: Sphere,
    h: f64,
) -> Result<NormGrid, ToricError> {
    let nc = steps(FRAC_PI_2, h);
    let (np, psi0, dpsi) = match sphere {
        Sphere::S3 => (0, 0.0, 0.0),
        Sphere::S4 => {
            let np = steps(PI, h);
            (np, -FRAC_PI_2, PI / np as f64)
        }
    };
    let dchi = FRAC_PI_2 / nc as f64;
    let mut points = Vec::with_capacity((nc + 1) * (np + 1));
    let mut norms = Vec::with_capacity(points.capacity());
    for i in 0..=nc {
        let chi = i as f64 * dchi;
        for j in 0..=np {
            let psi = psi0 + j as f64 * dpsi;
            let pt = BasePoint4::at(chi.min(FRAC_PI_2), psi.clamp(-FRAC_PI_2, FRAC_PI_2))?;
            points.push((pt.chi(), pt.psi()));
            norms.push(ev.fiber_norm(e, pt.rsx())?);
        }
    }
    let width = np + 1;
    let mut jump: f64 = 0.0;
    for i in 0..=nc {
        for j in 0..width {
            let here = norms[i * width + j];
            if i < nc {
                jump = jump.max((norms[(i + 1) * width + j] - here).abs());
            }
            if j + 1 < width {
                jump = jump.max((norms[i * width + j + 1] - here).abs());
            }
        }
    }
    Ok(NormGrid {
        points,
        norms,
        jump,
    })
}

/// Fiber norms of `e` over a base grid of step at most `h`, with the
/// continuity statistic comparing steps `h` and `h / 2`.
pub fn norm_profile(e: &SphereElement, sphere: Sphere, h: f64) -> Result<NormProfile, ToricError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(ToricError::BadStep(h));
    }
    let ev = Evaluator::new(e, sphere)?;
    let grid = norm_grid(&ev, e, sphere, h)?;
    let jump_half = norm_grid(&ev, e, sphere, h / 2.0)?.jump;
    let mut rows = Vec::with_capacity(grid.norms.len());
    for ((chi, psi), norm) in grid.points.into_iter().zip(grid.norms) {
        let pt = BasePoint4::at(chi, psi)?;
        let (r, s, x) = pt.rsx();
        rows.push(ProfileRow {
            chi,
            psi: (sphere == Sphere::S4).then_some(psi),
            r,
            s,
            x,
            norm,
            stratum: pt.stratum(),
            fiber_dim: fiber_dim_at(&ev.r1, &ev.r2, (r, s, x), c64(1.0, 0.0), c64(1.0, 0.0)),
        });
    }
    Ok(NormProfile {
        rows,
        jump: grid.jump,
        jump_half,
    })
}

/// Phase map of a unitary at rational phase and the kernel argument: a
/// scalar unitary with phase `1` is `1`. Reports "inapplicable" when the
/// trace vanishes.
pub fn covering_slice_check(u: &TorusElement) -> Result<Report, ToricError> {
    let (_, q) = rational(u.mode())?;
    let mut report = Report::new(&alloc::format!("phase map of {u}"));
    let samples = exact_sample_count(u).max(q);
    let mut unitarity: f64 = 0.0;
    for i in 0..samples {
        for j in 0..samples {
            let m = torus_rep(u, root_of_unity(i, samples), root_of_unity(j, samples))?;
            unitarity = unitarity.max(distance(&(&m * m.adjoint()), &identity(q as usize)));
        }
    }
    report.push(Check::residual(
        "unitary-on-fibers",
        "u u* = 1 at every sampled fiber",
        unitarity,
        1e-8,
        Scope::RationalShadow,
    ));
    let tau = trace_state(u).value()?;
    let averaged = averaged_matrix_trace(u, samples)?;
    report.push(Check::residual(
        "trace-cross-check",
        "tau(u) equals the averaged normalized matrix trace",
        (tau - averaged).norm(),
        1e-9,
        Scope::RationalShadow,
    ));
    report.quantity("tau_re", Value::Real(tau.re));
    report.quantity("tau_im", Value::Real(tau.im));
    match phase_map(u) {
        Err(TorusError::VanishingTrace { .. }) => {
            report.quantity("phase_map", Value::Text("inapplicable".into()));
            report.note("tau(u) vanishes, so the phase map is undefined here");
        }
        Err(other) => return Err(other.into()),
        Ok(phi) => {
            report.quantity("phase_re", Value::Real(phi.re));
            report.quantity("phase_im", Value::Real(phi.im));
            let scalar_part = TorusElement::scalar(u.mode(), tau);
            let off_scalar = u.sub(&scalar_part)?.max_abs();
            let is_scalar = off_scalar < 1e-8;
            let phase_one = (phi - c64(1.0, 0.0)).norm() < 1e-8;
            report.quantity(
                "scalar",
                Value::Text(if is_scalar { "yes".into() } else { "no".into() }),
            );
            let holds = if is_scalar && phase_one {
                u.sub(&TorusElement::one(u.mode()))?.max_abs() < 1e-7
            } else {
                true
            };
            report.push(Check::flag(
                "kernel-argument",
                "a scalar unitary with phase 1 is the identity",
                holds,
                Scope::RationalShadow,
            ));
        }
    }
    Ok(report)
}

/// Stratum dimensions for one sphere and phase: every sampled base point's
/// closure dimension, at every torus point, matches its stratum.
pub fn strata_report(sphere: Sphere, p: i64, q: i64) -> Result<Report, ToricError> {
    let label = match sphere {
        Sphere::S3 => "S3",
        Sphere::S4 => "S4",
    };
    let mut report = Report::new(&alloc::format!("{label} strata at p/q = {p}/{q}"));
    let chis = [0.0, 0.3, FRAC_PI_2 / 2.0, 1.2, FRAC_PI_2];
    let psis: &[f64] = match sphere {
        Sphere::S3 => &[0.0],
        Sphere::S4 => &[-FRAC_PI_2, -0.7, 0.0, 0.4, FRAC_PI_2],
    };
    let mut seen: Vec<(StratumLabel, usize)> = Vec::new();
    let mut mismatches = 0usize;
    let mut varies = false;
    for &chi in &chis {
        for &psi in psis {
            let stratum = BasePoint4::at(chi, psi)?.stratum();
            let dims = fiber_dims_over_torus(sphere, chi, psi, p, q)?;
            let expected = stratum.expected_dim(q);
            mismatches += dims.iter().filter(|&&d| d != expected).count();
            varies |= dims.iter().any(|&d| d != dims[0]);
            if !seen.iter().any(|(s, _)| *s == stratum) {
                seen.push((stratum, dims[0]));
            }
        }
    }
    report.push(Check::count(
        "stratum-dims",
        "closure dimension is q^2 inside, q on edges, 1 at poles",
        mismatches,
        0,
        Scope::RationalShadow,
    ));
    report.push(Check::flag(
        "torus-independent",
        "fiber dimension does not depend on the torus coordinates",
        !varies,
        Scope::RationalShadow,
    ));
    for (s, d) in seen {
        report.quantity(&alloc::format!("dim_{s}"), Value::Int(d as i64));
    }
    report.note("irrational phase has no finite fibers; these are rational shadows");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nctorus::{torus_exp, PhaseScalar};
    use crate::numerics::{frobenius, seeded_rng};
    use rand::Rng;

    fn mode(p: i64, q: i64) -> PhaseMode {
        PhaseMode::rational(p, q).unwrap()
    }

    fn sphere_relation(m: PhaseMode, with_x: bool) -> SphereElement {
        let a = SphereElement::alpha(m);
        let b = SphereElement::beta(m);
        let mut e = a
            .mul(&a.adjoint())
            .unwrap()
            .add(&b.mul(&b.adjoint()).unwrap())
            .unwrap()
            .sub(&SphereElement::one(m))
            .unwrap();
        if with_x {
            let x = SphereElement::x(m);
            e = e.add(&x.mul(&x).unwrap()).unwrap();
        }
        e
    }

    fn commutation_relation(m: PhaseMode) -> SphereElement {
        let a = SphereElement::alpha(m);
        let b = SphereElement::beta(m);
        // built without the rewriting rule: b*a - t a*b evaluates as words
        let ba = SphereElement::monomial(
            m,
            SphereMonomial {
                a: 1,
                b: 1,
                ..Default::default()
            },
        )
        .scale_phase(&PhaseScalar::t_power(m, 1))
        .unwrap();
        b.mul(&a).unwrap().sub(&ba).unwrap()
    }

    #[test]
    fn s3_relations_vanish() {
        let mut rng = seeded_rng(1);
        for (p, q) in [(1, 2), (1, 3), (2, 5)] {
            let m = mode(p, q);
            for _ in 0..5 {
                let chi = rng.random_range(0.0..FRAC_PI_2);
                let z1 = root_of_unity(rng.random_range(0..50), 50);
                let z2 = root_of_unity(rng.random_range(0..50), 50);
                let pt = BasePoint3::new(chi, z1, z2).unwrap();
                assert!(frobenius(&s3_eval(&sphere_relation(m, false), &pt).unwrap()) < 1e-10);
                assert!(frobenius(&s3_eval(&commutation_relation(m), &pt).unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn s3_commutation_relation_by_hand() {
        // beta alpha - zeta alpha beta with the literal matrix products
        let (r1, r2) = clock_shift(3, 1).unwrap();
        let zeta = root_of_unity(1, 3);
        let a = &r1 * c64(0.6, 0.0);
        let b = &r2 * c64(0.8, 0.0);
        assert!(distance(&(&b * &a), &((&a * &b) * zeta)) < 1e-12);
    }

    #[test]
    fn s3_alpha_at_chi_zero_is_r1() {
        let m = mode(1, 3);
        let pt = BasePoint3::at(0.0).unwrap();
        let (r1, _) = clock_shift(3, 1).unwrap();
        assert!(distance(&s3_eval(&SphereElement::alpha(m), &pt).unwrap(), &r1) < 1e-15);
        assert!(s3_eval(&SphereElement::x(m), &pt).is_err());
        assert!(s3_eval(&SphereElement::alpha(PhaseMode::Symbolic), &pt).is_err());
    }

    #[test]
    fn s3_fiber_dimensions() {
        assert_eq!(s3_fiber_dimension(FRAC_PI_2 / 2.0, 1, 3).unwrap(), 9);
        assert_eq!(s3_fiber_dimension(0.0, 1, 3).unwrap(), 3);
        assert_eq!(s3_fiber_dimension(FRAC_PI_2, 1, 3).unwrap(), 3);
        for chi in [0.0, 0.5, FRAC_PI_2] {
            assert_eq!(s3_fiber_dimension(chi, 0, 1).unwrap(), 1);
        }
    }

    #[test]
    fn s4_examples() {
        let m = mode(1, 2);
        let pole = BasePoint4::at(0.4, FRAC_PI_2).unwrap();
        assert_eq!(pole.stratum(), StratumLabel::Pole);
        assert_eq!(s4_fiber_dimension(&pole, 1, 2).unwrap(), 1);
        let a = s4_eval(&SphereElement::alpha(m), &pole).unwrap();
        assert!(frobenius(&a) < 1e-15);
        let interior = BasePoint4::at(0.4, 0.3).unwrap();
        assert_eq!(s4_fiber_dimension(&interior, 1, 2).unwrap(), 4);
        // the equator is the three-sphere
        let e = SphereElement::alpha(m)
            .mul(&SphereElement::beta_star(m))
            .unwrap()
            .add(&SphereElement::beta(m))
            .unwrap();
        let eq = BasePoint4::new(0.7, 0.0, root_of_unity(1, 7), root_of_unity(3, 7)).unwrap();
        let s3 = BasePoint3::new(0.7, root_of_unity(1, 7), root_of_unity(3, 7)).unwrap();
        assert!(distance(&s4_eval(&e, &eq).unwrap(), &s3_eval(&e, &s3).unwrap()) < 1e-15);
    }

    #[test]
    fn s4_relations_vanish() {
        let mut rng = seeded_rng(2);
        for (p, q) in [(1, 2), (2, 5)] {
            let m = mode(p, q);
            for _ in 0..5 {
                let pt = BasePoint4::at(
                    rng.random_range(0.0..FRAC_PI_2),
                    rng.random_range(-FRAC_PI_2..FRAC_PI_2),
                )
                .unwrap();
                assert!(frobenius(&s4_eval(&sphere_relation(m, true), &pt).unwrap()) < 1e-10);
                assert!(frobenius(&s4_eval(&commutation_relation(m), &pt).unwrap()) < 1e-10);
                let x = SphereElement::x(m);
                let xa = x.commutator(&SphereElement::alpha(m)).unwrap();
                assert!(frobenius(&s4_eval(&xa, &pt).unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn base_point_validation() {
        assert!(BasePoint3::at(-0.1).is_err());
        assert!(BasePoint3::new(0.1, c64(2.0, 0.0), c64(1.0, 0.0)).is_err());
        assert!(BasePoint4::at(0.1, 1.7).is_err());
        let pt = BasePoint4::from_rsx(0.6, 0.0, 0.8, c64(1.0, 0.0), c64(1.0, 0.0)).unwrap();
        assert_eq!(pt.stratum(), StratumLabel::EdgeAlpha);
        let (r, s, x) = pt.rsx();
        assert!((r - 0.6).abs() < 1e-12 && s.abs() < 1e-12 && (x - 0.8).abs() < 1e-12);
        assert!(BasePoint4::from_rsx(0.6, 0.6, 0.6, c64(1.0, 0.0), c64(1.0, 0.0)).is_err());
    }

    #[test]
    fn strata_law() {
        for (p, q) in [(1, 2), (1, 3)] {
            for sphere in [Sphere::S3, Sphere::S4] {
                let r = strata_report(sphere, p, q).unwrap();
                assert!(r.passed(), "{r}");
            }
        }
    }

    #[test]
    fn invariant_monomials() {
        let s3 = invariant_subalgebra(1, Sphere::S3);
        let one = SphereMonomial::ONE;
        let aa = SphereMonomial { a: 1, ad: 1, ..one };
        let bb = SphereMonomial { b: 1, bd: 1, ..one };
        let x = SphereMonomial { x: 1, ..one };
        assert_eq!(s3.monomials, alloc::vec![one, bb, aa]);
        assert!(s3.commutative);
        let s4 = invariant_subalgebra(1, Sphere::S4);
        assert_eq!(s4.monomials.len(), 4);
        assert!(s4.monomials.contains(&x));
        let big = invariant_subalgebra(3, Sphere::S4);
        assert!(big.commutative);
        for m in &big.monomials {
            let e = SphereElement::monomial(PhaseMode::Symbolic, *m);
            assert_eq!(e.torus_action(0.7, -2.1), e);
        }
        assert_eq!(
            invariant_subalgebra(0, Sphere::S3).monomials,
            alloc::vec![one]
        );
    }

    #[test]
    fn profile_examples() {
        let m = mode(1, 3);
        let one = norm_profile(&SphereElement::one(m), Sphere::S3, 0.05).unwrap();
        assert!(one.rows.iter().all(|r| (r.norm - 1.0).abs() < 1e-12));
        assert!(one.jump < 1e-12);

        let h = 0.05;
        let alpha = norm_profile(&SphereElement::alpha(m), Sphere::S3, h).unwrap();
        for r in &alpha.rows {
            assert!((r.norm - r.chi.cos()).abs() < 1e-12);
        }
        assert!(alpha.jump <= h + 1e-12 && alpha.jump > 0.5 * h);

        let ab = SphereElement::alpha(m)
            .mul(&SphereElement::beta(m))
            .unwrap();
        let e = ab.add(&ab.adjoint()).unwrap();
        let prof = norm_profile(&e, Sphere::S3, 1e-2).unwrap();
        assert!((0.3..=0.7).contains(&prof.ratio()), "{}", prof.ratio());
        let first = &prof.rows[0];
        let last = prof.rows.last().unwrap();
        assert_eq!(
            (first.fiber_dim, first.stratum),
            (3, StratumLabel::EdgeAlpha)
        );
        assert_eq!((last.fiber_dim, last.stratum), (3, StratumLabel::EdgeBeta));
        assert_eq!(prof.rows[10].fiber_dim, 9);
        assert!(norm_profile(&e, Sphere::S3, 0.0).is_err());
    }

    #[test]
    fn profile_endpoint_matches_alpha_specialization() {
        let m = mode(1, 3);
        let a = SphereElement::alpha(m);
        let b = SphereElement::beta(m);
        let e = a
            .mul(&a)
            .unwrap()
            .add(&b.mul(&a.adjoint()).unwrap())
            .unwrap()
            .add(&SphereElement::scalar(m, c64(0.3, 0.1)))
            .unwrap();
        let prof = norm_profile(&e, Sphere::S3, 0.1).unwrap();
        let only = norm_profile(&alpha_only(&e), Sphere::S3, 0.1).unwrap();
        assert!((prof.rows[0].norm - only.rows[0].norm).abs() < 1e-12);
    }

    #[test]
    fn s4_profile_has_pole_rows() {
        let m = mode(1, 2);
        let e = SphereElement::alpha(m).add(&SphereElement::x(m)).unwrap();
        let prof = norm_profile(&e, Sphere::S4, 0.2).unwrap();
        let poles: Vec<_> = prof
            .rows
            .iter()
            .filter(|r| r.stratum == StratumLabel::Pole)
            .collect();
        assert!(!poles.is_empty());
        assert!(poles.iter().all(|r| r.fiber_dim == 1));
        for r in &prof.rows {
            assert!((r.r * r.r + r.s * r.s + r.x * r.x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn covering_slice_examples() {
        let m = mode(1, 3);
        let r = covering_slice_check(&TorusElement::one(m)).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.get("phase_re"), Some(&Value::Real(1.0)));

        let phi0: f64 = 0.4;
        let u = TorusElement::scalar(m, c64(phi0.cos(), phi0.sin()));
        let r = covering_slice_check(&u).unwrap();
        assert!(r.passed());
        match r.get("phase_im") {
            Some(Value::Real(v)) => assert!((v - phi0.sin()).abs() < 1e-12),
            other => panic!("{other:?}"),
        }

        let r = covering_slice_check(&TorusElement::u1(m)).unwrap();
        assert_eq!(
            r.get("phase_map"),
            Some(&Value::Text("inapplicable".into()))
        );
        assert!(r.passed());

        let h = TorusElement::u1(m)
            .add(&TorusElement::u1(m).adjoint())
            .unwrap();
        let u = torus_exp(&h.scale(c64(0.0, 0.3)), 60);
        let r = covering_slice_check(&u).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.get("phase_re").is_some());
    }
}
