//! Localization over the finite base space `X = spec(A_J)`.
//!
//! Points are the minimal projections `p_x` of `A_J`. Since they are central
//! in `A`, the ideal of sections vanishing at `x` is `I_x = (1 - p_x) A` and
//! the fiber `A / I_x` is `p_x A`.

use alloc::format;
use alloc::vec::Vec;

use crate::gauge::{gauge_lie_algebra, GaugeError};
use crate::numerics::{commutator, distance, frobenius, op_norm, CMatrix, Subspace, Tolerances};
use crate::report::{Check, Report, Scope, Value};
use crate::spectral::{RealSpectralTriple, SpectralError};
use crate::staralg::{
    minimal_projections, random_unitary, FiniteStarAlgebra, ProjectionFamily, StarAlgError,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LocalizeError {
    #[error(transparent)]
    Algebra(#[from] StarAlgError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
}

#[derive(Debug, Clone)]
pub struct FiberDecomposition {
    /// Points of `X`, as projections in `A`.
    pub base: ProjectionFamily,
    /// `p_x A`, with unit `p_x`.
    pub fibers: Vec<FiniteStarAlgebra>,
    /// `pi(p_x)`.
    pub rep_projections: Vec<CMatrix>,
    pub algebra_dim: usize,
}

impl FiberDecomposition {
    pub fn len(&self) -> usize {
        self.fibers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fibers.is_empty()
    }

    pub fn fiber_dims(&self) -> Vec<usize> {
        self.fibers.iter().map(|f| f.dim()).collect()
    }

    /// `a -> (p_x a)_x`.
    pub fn section(&self, a: &CMatrix) -> Vec<CMatrix> {
        self.base.projections.iter().map(|p| p * a).collect()
    }

    /// Inverse of [`FiberDecomposition::section`]: `sum_x s(x)`.
    pub fn reconstruct(&self, s: &[CMatrix]) -> CMatrix {
        let mut out = CMatrix::zeros(s[0].nrows(), s[0].ncols());
        for m in s {
            out += m;
        }
        out
    }
}

pub fn localize(t: &RealSpectralTriple) -> Result<FiberDecomposition, LocalizeError> {
    let mut dec = localize_algebra(t.algebra(), &t.compute_aj()?)?;
    dec.rep_projections = dec.base.projections.iter().map(|p| t.rep(p)).collect();
    Ok(dec)
}

/// Fibers `p_x A` over the points of a commutative central subalgebra `z`,
/// with `A` in its defining representation.
pub fn localize_algebra(
    a: &FiniteStarAlgebra,
    z: &FiniteStarAlgebra,
) -> Result<FiberDecomposition, LocalizeError> {
    let base = minimal_projections(z)?;
    let mut fibers = Vec::with_capacity(base.len());
    for (p, label) in base.projections.iter().zip(&base.labels) {
        let span: Vec<CMatrix> = a.basis().iter().map(|b| p * b).collect();
        fibers.push(FiniteStarAlgebra::from_span(
            span.iter(),
            a.ambient(),
            &format!("B_{label}"),
        )?);
    }
    let rep_projections = base.projections.clone();
    Ok(FiberDecomposition {
        base,
        fibers,
        rep_projections,
        algebra_dim: a.dim(),
    })
}

/// The section map `A -> sum_x B_x` is a bijective *-homomorphism. Random
/// elements are drawn from `seed`.
pub fn section_map_report(
    dec: &FiberDecomposition,
    t: &RealSpectralTriple,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Report {
    let a = t.algebra();
    let mut report = Report::new(&format!("localization of {}", t.label()));
    report.push(Check::residual(
        "points-partition-unity",
        "the p_x are orthogonal projections summing to 1",
        dec.base.residual(a.unit()),
        tol.derived,
        Scope::Exact,
    ));
    let central = dec
        .base
        .projections
        .iter()
        .flat_map(|p| a.basis().iter().map(move |b| frobenius(&commutator(p, b))))
        .fold(0.0, f64::max);
    report.push(Check::residual(
        "points-central",
        "each p_x is central in A",
        central,
        tol.derived,
        Scope::Exact,
    ));
    let total: usize = dec.fiber_dims().iter().sum();
    report.push(Check::count(
        "fiber-dims-sum",
        "sum of dim B_x = dim A",
        total,
        dec.algebra_dim,
        Scope::Exact,
    ));
    // injective: a is recovered from its sections; with the dimension count
    // this makes the section map bijective
    let recon = a
        .basis()
        .iter()
        .map(|b| distance(&dec.reconstruct(&dec.section(b)), b))
        .fold(0.0, f64::max);
    report.push(Check::residual(
        "section-injective",
        "a = sum_x p_x a",
        recon,
        tol.derived,
        Scope::Exact,
    ));
    let mut mult: f64 = 0.0;
    let mut star: f64 = 0.0;
    let mut norm: f64 = 0.0;
    for i in 0..samples {
        let x = a.random_element(seed.wrapping_add(2 * i as u64));
        let y = a.random_element(seed.wrapping_add(2 * i as u64 + 1));
        let xy = x.clone() * &y;
        for p in &dec.base.projections {
            mult = mult.max(distance(&(p * &xy), &((p * &x) * (p * &y))));
            star = star.max(distance(&(p * x.adjoint()), &(p * &x).adjoint()));
        }
        norm = norm.max(norm_is_sup(dec, t, &x).residual);
    }
    report.push(Check::residual(
        "section-multiplicative",
        "p_x (a b) = (p_x a)(p_x b)",
        mult,
        tol.derived,
        Scope::Exact,
    ));
    report.push(Check::residual(
        "section-star",
        "p_x a* = (p_x a)*",
        star,
        tol.derived,
        Scope::Exact,
    ));
    report.push(Check::residual(
        "norm-is-sup",
        "|a| = max_x |a(x)|",
        norm,
        tol.derived,
        Scope::Exact,
    ));
    report.quantity("points", Value::Int(dec.len() as i64));
    report.note("finite base: upper semi-continuity and enough sections hold trivially");
    report
}

/// `|pi(a)|` against `max_x |pi(p_x a)|`.
pub fn norm_is_sup(dec: &FiberDecomposition, t: &RealSpectralTriple, a: &CMatrix) -> Check {
    let whole = op_norm(&t.rep(a));
    let sup = dec
        .base
        .projections
        .iter()
        .map(|p| op_norm(&t.rep(&(p * a))))
        .fold(0.0, f64::max);
    Check::residual(
        "norm-is-sup",
        "|a| = max_x |a(x)|",
        (whole - sup).abs(),
        Tolerances::default().derived * whole.max(1.0),
        Scope::Exact,
    )
}

/// `max_x |p_x (u a u*) - (p_x u)(p_x a)(p_x u)*|`.
pub fn fiber_gauge_action(dec: &FiberDecomposition, u: &CMatrix, a: &CMatrix) -> f64 {
    let global = u * a * u.adjoint();
    dec.base
        .projections
        .iter()
        .map(|p| {
            let ux = p * u;
            distance(&(p * &global), &(&ux * (p * a) * ux.adjoint()))
        })
        .fold(0.0, f64::max)
}

/// One fiber of the bundle built from `C_D(A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaFiber {
    pub space: Subspace,
    pub even_dim: usize,
    pub odd_dim: usize,
    /// `dim(p_x even ∩ p_x odd)`.
    pub overlap: usize,
}

#[derive(Debug, Clone)]
pub struct OmegaBundle {
    pub fibers: Vec<OmegaFiber>,
    pub cd_dim: usize,
    pub report: Report,
}

fn image(p: &CMatrix, s: &Subspace) -> Subspace {
    let (r, c) = s.shape();
    let products: Vec<CMatrix> = s.basis().iter().map(|b| p * b).collect();
    Subspace::spanned_by(r, c, products.iter())
}

/// Fibers `pi(p_x) C_D(A)`, with localization of one-forms and of the
/// gauge action on them checked over `samples` random unitaries.
pub fn omega_bundle(
    dec: &FiberDecomposition,
    t: &RealSpectralTriple,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> OmegaBundle {
    let cd = t.c_d_algebra();
    let omega = t.one_form_space();
    let mut report = Report::new(&format!("omega bundle of {}", t.label()));
    let mut fibers = Vec::with_capacity(dec.len());
    let mut localizes: f64 = 0.0;
    let mut central: f64 = 0.0;
    for p in &dec.rep_projections {
        let space = image(p, cd.algebra.space());
        let even = image(p, &cd.even);
        let odd = image(p, &cd.odd);
        let overlap = even.dim() + odd.dim() - even.sum_dim(&odd);
        for w in omega.basis() {
            localizes = localizes.max(space.residual(&(p * w)));
        }
        for b in cd.algebra.basis() {
            central = central.max(frobenius(&commutator(p, b)));
        }
        fibers.push(OmegaFiber {
            space,
            even_dim: even.dim(),
            odd_dim: odd.dim(),
            overlap,
        });
    }
    let total: usize = fibers.iter().map(|f| f.space.dim()).sum();
    report.push(Check::count(
        "omega-fiber-dims-sum",
        "sum of dim p_x C_D(A) = dim C_D(A)",
        total,
        cd.algebra.dim(),
        Scope::Exact,
    ));
    report.push(Check::residual(
        "omega-points-central",
        "each p_x is central in C_D(A)",
        central,
        tol.derived,
        Scope::Exact,
    ));
    report.push(Check::residual(
        "one-forms-localize",
        "p_x Omega^1_D lies in the fiber at x",
        localizes,
        tol.derived,
        Scope::Exact,
    ));
    let mut action: f64 = 0.0;
    if omega.dim() > 0 {
        for i in 0..samples {
            let s = seed.wrapping_add(i as u64);
            let u = random_unitary(t.algebra(), s);
            let pu = t.rep(&u);
            let w = random_combination(omega, s);
            let moved = &pu * &w * pu.adjoint();
            for p in &dec.rep_projections {
                let ux = p * &pu;
                let local = &ux * (p * &w) * ux.adjoint();
                action = action.max(distance(&(p * &moved), &local));
            }
        }
    }
    report.push(Check::residual(
        "gauge-action-localizes",
        "(u omega u*)(x) = u(x) omega(x) u(x)*",
        action,
        tol.derived,
        Scope::Exact,
    ));
    let consistent = fibers.iter().all(|f| f.overlap == 0);
    report.quantity("cd_dim", Value::Int(cd.algebra.dim() as i64));
    report.quantity(
        "grading",
        Value::Text(if consistent {
            "consistent".into()
        } else {
            "obstructed".into()
        }),
    );
    OmegaBundle {
        fibers,
        cd_dim: cd.algebra.dim(),
        report,
    }
}

fn random_combination(s: &Subspace, seed: u64) -> CMatrix {
    use rand::Rng;
    let mut rng = crate::numerics::seeded_rng(seed ^ 0x5151);
    let (r, c) = s.shape();
    let mut out = CMatrix::zeros(r, c);
    for b in s.basis() {
        out += b * crate::numerics::c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    out
}

/// Per point, `dim u(B_x)` and the gauge-fiber dimension `dim u(B_x) - 1`.
#[derive(Debug, Clone)]
pub struct GroupBundleDims {
    pub unitary_dims: Vec<usize>,
    pub gauge_dims: Vec<usize>,
    pub report: Report,
}

pub fn group_bundle_dims(
    dec: &FiberDecomposition,
    t: &RealSpectralTriple,
    tol: &Tolerances,
) -> Result<GroupBundleDims, LocalizeError> {
    // dim_R u(B) = dim_C B for a *-algebra B
    let unitary_dims: Vec<usize> = dec.fiber_dims();
    let gauge_dims: Vec<usize> = unitary_dims.iter().map(|d| d - 1).collect();
    let g = gauge_lie_algebra(t, tol)?;
    let mut report = Report::new(&format!("group bundle of {}", t.label()));
    report.push(Check::count(
        "unitary-sections",
        "sum of dim u(B_x) = dim u(A)",
        unitary_dims.iter().sum(),
        g.u_a_dim,
        Scope::Exact,
    ));
    report.push(Check::count(
        "gauge-sections",
        "sum of (dim u(B_x) - 1) = dim g",
        gauge_dims.iter().sum(),
        g.dim(),
        Scope::FiniteShadow,
    ));
    report.note("finite base: the covering-space hypotheses have no content and are not checked");
    Ok(GroupBundleDims {
        unitary_dims,
        gauge_dims,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_commutative, build_finite_ym, build_hs_model, Hopping};
    use crate::numerics::identity;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn localization_examples() {
        let t = build_hs_model(3, 1).unwrap();
        let dec = localize(&t).unwrap();
        assert_eq!(dec.fiber_dims(), alloc::vec![9]);
        assert!(distance(&dec.base.projections[0], &identity(3)) < 1e-9);

        let t = build_finite_ym(3, 2, &Hopping::none(3), 1).unwrap();
        let dec = localize(&t).unwrap();
        assert_eq!(dec.fiber_dims(), alloc::vec![4, 4, 4]);
        let r = section_map_report(&dec, &t, 10, 0, &tol());
        assert!(r.passed(), "{r}");

        let t = build_commutative(4, &Hopping::none(4), 1).unwrap();
        assert_eq!(localize(&t).unwrap().fiber_dims(), alloc::vec![1; 4]);
    }

    #[test]
    fn norm_sup_examples() {
        let t = build_finite_ym(2, 2, &Hopping::none(2), 1).unwrap();
        let dec = localize(&t).unwrap();
        let unit = t.algebra().unit().clone();
        let c = norm_is_sup(&dec, &t, &unit);
        assert!(c.passed && c.residual < 1e-12);
        // supported on one fiber: the norm is that fiber's norm
        let a = &dec.base.projections[1] * t.algebra().random_element(3);
        assert!(norm_is_sup(&dec, &t, &a).passed);
        let fiber = op_norm(&t.rep(&(&dec.base.projections[1] * &a)));
        assert!((op_norm(&t.rep(&a)) - fiber).abs() < 1e-10);
    }

    #[test]
    fn fiberwise_action() {
        let t = build_finite_ym(2, 2, &Hopping::none(2), 1).unwrap();
        let dec = localize(&t).unwrap();
        let a = t.algebra().random_element(4);
        // central u: both sides reduce to p_x a
        let z = &dec.base.projections[0] * crate::numerics::c64(0.0, 1.0)
            + &dec.base.projections[1] * crate::numerics::c64(-1.0, 0.0);
        assert!(fiber_gauge_action(&dec, &z, &a) < 1e-12);
        for s in 0..5 {
            let u = random_unitary(t.algebra(), s);
            assert!(fiber_gauge_action(&dec, &u, &a) < 1e-8);
        }
    }

    #[test]
    fn omega_bundle_examples() {
        let t = build_commutative(2, &Hopping::none(2), 0).unwrap();
        let zero_d = RealSpectralTriple::new(
            t.algebra().clone(),
            t.rep_basis().to_vec(),
            CMatrix::zeros(2, 2),
            t.real_structure().clone(),
            t.epsilon(),
            t.epsilon_prime(),
            "zero",
        )
        .unwrap();
        let dec = localize(&zero_d).unwrap();
        let b = omega_bundle(&dec, &zero_d, 3, 0, &tol());
        let dims: Vec<usize> = b.fibers.iter().map(|f| f.space.dim()).collect();
        assert_eq!(dims, dec.fiber_dims());

        let hop = build_commutative(2, &Hopping::uniform(2, 0.7), 0).unwrap();
        let dec = localize(&hop).unwrap();
        let b = omega_bundle(&dec, &hop, 3, 0, &tol());
        let dims: Vec<usize> = b.fibers.iter().map(|f| f.space.dim()).collect();
        assert_eq!(dims, alloc::vec![2, 2]);
        assert!(b.report.check("omega-fiber-dims-sum").unwrap().passed);
        // with hopping the points are not central in C_D(A)
        assert!(!b.report.check("omega-points-central").unwrap().passed);

        let t = build_finite_ym(2, 2, &Hopping::none(2), 1).unwrap();
        let dec = localize(&t).unwrap();
        let b = omega_bundle(&dec, &t, 5, 0, &tol());
        assert!(b.report.passed(), "{}", b.report);
    }

    #[test]
    fn group_bundle_examples() {
        let t = build_hs_model(2, 1).unwrap();
        let dec = localize(&t).unwrap();
        let g = group_bundle_dims(&dec, &t, &tol()).unwrap();
        assert_eq!(g.gauge_dims, alloc::vec![3]);
        assert!(g.report.passed());
        let t = build_finite_ym(3, 2, &Hopping::none(3), 1).unwrap();
        let dec = localize(&t).unwrap();
        let g = group_bundle_dims(&dec, &t, &tol()).unwrap();
        assert_eq!(g.gauge_dims, alloc::vec![3, 3, 3]);
        assert!(g.report.passed());
        let t = build_commutative(3, &Hopping::none(3), 1).unwrap();
        let dec = localize(&t).unwrap();
        assert_eq!(
            group_bundle_dims(&dec, &t, &tol()).unwrap().gauge_dims,
            alloc::vec![0, 0, 0]
        );
    }

    #[test]
    fn orbifold_localizes_over_its_center() {
        let o = crate::models::build_orbifold_algebra(3, 1, 2).unwrap();
        let z = crate::staralg::center(&o.algebra);
        let dec = localize_algebra(&o.algebra, &z).unwrap();
        assert_eq!(dec.fiber_dims(), alloc::vec![9, 9]);
    }
}
