//! Gauge group, gauge Lie algebra, the perturbation semigroup and inner
//! fluctuations.

use alloc::format;
use alloc::vec::Vec;

use crate::numerics::{
    c64, commutator, distance, frobenius, hermiticity_residual, kron, op_norm, unitarity_residual,
    CMatrix, RealSubspace, Tolerances, ZERO_FLOOR,
};
use crate::report::{Check, Report, Scope, Value};
use crate::spectral::{OneForm, RealSpectralTriple, SpectralError};
use crate::staralg::{random_skew, random_unitary, skew_hermitian_basis, skew_hermitian_space};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GaugeError {
    #[error("element is not a unitary of the algebra (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("perturbation left Pert(A): normalization {normalization:e}, self-adjointness {self_adjointness:e}")]
    MembershipViolated {
        normalization: f64,
        self_adjointness: f64,
    },
    #[error("one-form is not self-adjoint (residual {residual:e})")]
    NotSelfAdjoint { residual: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// `|u u* - 1_A| + |u* u - 1_A| + dist(u, A)`.
fn algebra_unitarity(t: &RealSpectralTriple, u: &CMatrix) -> f64 {
    let a = t.algebra();
    let e = a.unit();
    distance(&(u * u.adjoint()), e) + distance(&(u.adjoint() * u), e) + a.residual(u)
}

fn require_unitary(t: &RealSpectralTriple, u: &CMatrix, tol: f64) -> Result<(), GaugeError> {
    let residual = algebra_unitarity(t, u);
    if residual > tol {
        return Err(GaugeError::NotUnitary { residual });
    }
    Ok(())
}

/// `U = u J u J^{-1}` for a unitary `u` of `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeElement {
    pub source: CMatrix,
    pub matrix: CMatrix,
}

impl GaugeElement {
    pub fn new(t: &RealSpectralTriple, u: &CMatrix) -> Result<Self, GaugeError> {
        require_unitary(t, u, Tolerances::default().structural)?;
        let pu = t.rep(u);
        let matrix = &pu * t.conjugate_by_j(&pu);
        Ok(Self {
            source: u.clone(),
            matrix,
        })
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.matrix)
    }

    /// `|U J U* - J|`, i.e. `|U K U^T - K|`.
    pub fn real_structure_residual(&self, t: &RealSpectralTriple) -> f64 {
        distance(
            &(&self.matrix * t.kernel() * self.matrix.transpose()),
            t.kernel(),
        )
    }
}

/// `|Ad(v u) - Ad(v) Ad(u)|`.
pub fn ad_homomorphism_residual(
    t: &RealSpectralTriple,
    u: &CMatrix,
    v: &CMatrix,
) -> Result<f64, GaugeError> {
    let gu = GaugeElement::new(t, u)?;
    let gv = GaugeElement::new(t, v)?;
    let gvu = GaugeElement::new(t, &(v * u))?;
    Ok(distance(&gvu.matrix, &(&gv.matrix * &gu.matrix)))
}

/// `T = X + J X J^{-1}` for skew-hermitian `X` in `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeLieElement {
    pub source: CMatrix,
    pub matrix: CMatrix,
}

impl GaugeLieElement {
    pub fn new(t: &RealSpectralTriple, x: &CMatrix) -> Self {
        let px = t.rep(x);
        let matrix = &px + t.conjugate_by_j(&px);
        Self {
            source: x.clone(),
            matrix,
        }
    }

    pub fn skew_residual(&self) -> f64 {
        distance(&self.matrix.adjoint(), &(-&self.matrix))
    }
}

/// The gauge Lie algebra as a real span, with the dimension count
/// `dim g = dim u(A) - dim u(A_J)` and bracket closure.
#[derive(Debug, Clone)]
pub struct GaugeLieAlgebra {
    pub span: RealSubspace,
    pub u_a_dim: usize,
    pub u_aj_dim: usize,
    pub report: Report,
}

impl GaugeLieAlgebra {
    pub fn dim(&self) -> usize {
        self.span.dim()
    }
}

pub fn gauge_lie_algebra(
    t: &RealSpectralTriple,
    tol: &Tolerances,
) -> Result<GaugeLieAlgebra, GaugeError> {
    let n = t.hilbert_dim();
    let skew = skew_hermitian_basis(t.algebra());
    let elements: Vec<GaugeLieElement> = skew.iter().map(|x| GaugeLieElement::new(t, x)).collect();
    let span = RealSubspace::spanned_by(n, n, elements.iter().map(|e| &e.matrix));
    let aj = t.compute_aj()?;
    let u_aj_dim = skew_hermitian_space(&aj).dim();
    let u_a_dim = skew.len();

    let mut report = Report::new(&format!("gauge algebra of {}", t.label()));
    let skew_res = elements
        .iter()
        .map(|e| e.skew_residual())
        .fold(0.0, f64::max);
    report.push(Check::residual(
        "gauge-lie-skew",
        "T* = -T",
        skew_res,
        tol.structural,
        Scope::Exact,
    ));
    report.push(Check::count(
        "gauge-lie-dim",
        "dim g = dim u(A) - dim u(A_J)",
        span.dim(),
        u_a_dim.saturating_sub(u_aj_dim),
        Scope::Exact,
    ));
    let mut closure: f64 = 0.0;
    let mut formula: f64 = 0.0;
    for (i, x) in elements.iter().enumerate() {
        for y in &elements[i + 1..] {
            let bracket = commutator(&x.matrix, &y.matrix);
            closure = closure.max(span.residual(&bracket));
            let lifted = GaugeLieElement::new(t, &commutator(&x.source, &y.source));
            formula = formula.max(distance(&bracket, &lifted.matrix));
        }
    }
    report.push(Check::residual(
        "gauge-lie-closed",
        "[T, T'] lies in g",
        closure,
        tol.derived,
        Scope::Exact,
    ));
    report.push(Check::residual(
        "gauge-lie-bracket",
        "[T, T'] = [X, X'] + J [X, X'] J^{-1}",
        formula,
        tol.derived,
        Scope::Exact,
    ));
    report.quantity("gauge_dim", Value::Int(span.dim() as i64));
    report.quantity("u_a_dim", Value::Int(u_a_dim as i64));
    report.quantity("u_aj_dim", Value::Int(u_aj_dim as i64));
    Ok(GaugeLieAlgebra {
        span,
        u_a_dim,
        u_aj_dim,
        report,
    })
}

/// Whether `u J u J^{-1} = 1`, alongside whether `u` lies in `A_J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCheck {
    pub in_kernel: bool,
    pub in_aj: bool,
    pub kernel_residual: f64,
    pub aj_residual: f64,
}

impl KernelCheck {
    /// `ker(Ad) = U(A_J)` as seen by this element.
    pub fn consistent(&self) -> bool {
        self.in_kernel == self.in_aj
    }
}

pub fn ad_kernel_check(
    t: &RealSpectralTriple,
    u: &CMatrix,
    tol: &Tolerances,
) -> Result<KernelCheck, GaugeError> {
    let g = GaugeElement::new(t, u)?;
    let n = t.hilbert_dim();
    let kernel_residual = distance(&g.matrix, &crate::numerics::identity(n));
    let aj_residual = t.aj_space().residual(u);
    Ok(KernelCheck {
        in_kernel: kernel_residual < tol.derived,
        in_aj: aj_residual < tol.derived,
        kernel_residual,
        aj_residual,
    })
}

/// `sum_j a_j (x) b_j^op` in `A (x) A^op`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub terms: Vec<(CMatrix, CMatrix)>,
}

impl Perturbation {
    /// `{(1, 1)}`.
    pub fn identity(t: &RealSpectralTriple) -> Self {
        let e = t.algebra().unit().clone();
        Self {
            terms: alloc::vec![(e.clone(), e)],
        }
    }

    /// `u (x) u*^op`.
    pub fn from_unitary(t: &RealSpectralTriple, u: &CMatrix) -> Result<Self, GaugeError> {
        require_unitary(t, u, Tolerances::default().structural)?;
        Ok(Self {
            terms: alloc::vec![(u.clone(), u.adjoint())],
        })
    }

    /// `u (x) (u*(1/2 + k))^op + ((1/2 - k) u) (x) u*^op` for a random
    /// unitary `u` and skew `k`; normalized and self-adjoint by design.
    pub fn random(t: &RealSpectralTriple, seed: u64) -> Self {
        let a = t.algebra();
        let u = random_unitary(a, seed);
        let k = random_skew(a, seed ^ 0x9e37_79b9_7f4a_7c15);
        let half = a.unit() * c64(0.5, 0.0);
        let ua = u.adjoint();
        Self {
            terms: alloc::vec![(u.clone(), &ua * (&half + &k)), ((&half - &k) * &u, ua),],
        }
    }

    /// `(sum a_i (x) b_i)(sum c_j (x) d_j) = sum a_i c_j (x) d_j b_i`.
    pub fn product(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, b) in &self.terms {
            for (c, d) in &other.terms {
                terms.push((a * c, d * b));
            }
        }
        Self { terms }
    }

    /// The same tensor with at most `dim A` terms, `sum_i e_i (x) b_i` over
    /// an orthonormal basis `e_i` of `A`.
    pub fn compressed(&self, t: &RealSpectralTriple) -> Self {
        let space = t.algebra().space();
        let basis = space.basis();
        let (r, c) = space.shape();
        let mut rights = alloc::vec![CMatrix::zeros(r, c); basis.len()];
        for (a, b) in &self.terms {
            for (right, coord) in rights.iter_mut().zip(space.coordinates(a).iter()) {
                if *coord != c64(0.0, 0.0) {
                    *right += b * *coord;
                }
            }
        }
        let terms = basis
            .iter()
            .zip(rights)
            .filter(|(_, b)| frobenius(b) > ZERO_FLOOR)
            .map(|(e, b)| (e.clone(), b))
            .collect();
        Self { terms }
    }

    /// `sum_j |a_j| |b_j|`, the scale against which rounding in the
    /// certificates should be read.
    pub fn magnitude(&self) -> f64 {
        self.terms
            .iter()
            .map(|(a, b)| op_norm(a) * op_norm(b))
            .sum()
    }

    /// Both certificates divided by `max(1, magnitude)`.
    pub fn relative_certificate(&self, t: &RealSpectralTriple) -> f64 {
        let scale = self.magnitude().max(1.0);
        self.normalization_residual(t)
            .max(self.self_adjointness_residual(t))
            / scale
    }

    /// `|sum a_j b_j - 1|`.
    pub fn normalization_residual(&self, t: &RealSpectralTriple) -> f64 {
        let e = t.algebra().unit();
        let mut sum = CMatrix::zeros(e.nrows(), e.ncols());
        for (a, b) in &self.terms {
            sum += a * b;
        }
        distance(&sum, e)
    }

    /// The left-right operator `x -> sum pi(a_j) x pi(b_j)` on `M_n`, as an
    /// `n^2 x n^2` matrix in row-major coordinates.
    pub fn operator(&self, t: &RealSpectralTriple) -> CMatrix {
        let n = t.hilbert_dim();
        let mut out = CMatrix::zeros(n * n, n * n);
        for (a, b) in &self.terms {
            out += kron(&t.rep(a), &t.rep(b).transpose());
        }
        out
    }

    /// `|sum a_j (x) b_j^op - sum b_j* (x) a_j*^op|` via left-right operators
    /// on all of `M_n`, where the representation is faithful.
    pub fn self_adjointness_residual(&self, t: &RealSpectralTriple) -> f64 {
        let starred = Perturbation {
            terms: self
                .terms
                .iter()
                .map(|(a, b)| (b.adjoint(), a.adjoint()))
                .collect(),
        };
        distance(&self.operator(t), &starred.operator(t))
    }

    pub fn certify(&self, t: &RealSpectralTriple, tol: &Tolerances) -> Result<(), GaugeError> {
        let normalization = self.normalization_residual(t);
        let self_adjointness = self.self_adjointness_residual(t);
        if normalization > tol.structural || self_adjointness > tol.derived {
            return Err(GaugeError::MembershipViolated {
                normalization,
                self_adjointness,
            });
        }
        Ok(())
    }

    /// `pert_product` with the result re-certified.
    pub fn checked_product(
        &self,
        other: &Self,
        t: &RealSpectralTriple,
        tol: &Tolerances,
    ) -> Result<Self, GaugeError> {
        let p = self.product(other);
        p.certify(t, tol)?;
        Ok(p)
    }

    /// `sum_j pi(a_j) D pi(b_j)`.
    pub fn act_on_dirac(&self, t: &RealSpectralTriple) -> CMatrix {
        let n = t.hilbert_dim();
        let mut out = CMatrix::zeros(n, n);
        for (a, b) in &self.terms {
            out += t.rep(a) * t.dirac() * t.rep(b);
        }
        out
    }
}

/// `omega = sum_j a_j [D, b_j]`, required self-adjoint.
pub fn gauge_field(
    t: &RealSpectralTriple,
    p: &Perturbation,
    tol: &Tolerances,
) -> Result<OneForm, GaugeError> {
    let omega = OneForm::new(t, p.terms.clone());
    let residual = omega.self_adjoint_residual();
    if residual > tol.derived {
        return Err(GaugeError::NotSelfAdjoint { residual });
    }
    Ok(omega)
}

/// `D_omega = D + omega + eps' J omega J^{-1}`.
pub fn fluctuate(
    t: &RealSpectralTriple,
    omega: &CMatrix,
    tol: &Tolerances,
) -> Result<CMatrix, GaugeError> {
    let residual = hermiticity_residual(omega);
    if residual > tol.derived {
        return Err(GaugeError::NotSelfAdjoint { residual });
    }
    let eps = c64(t.epsilon_prime().value(), 0.0);
    Ok(t.dirac() + omega + t.conjugate_by_j(omega) * eps)
}

/// `sum_{i,j} pi(a_i) a^_j D pi(b_i) b^_j` with `x^ = J x J^{-1}`.
pub fn doubled_fluctuation(t: &RealSpectralTriple, p: &Perturbation) -> CMatrix {
    let n = t.hilbert_dim();
    let reps: Vec<(CMatrix, CMatrix)> = p.terms.iter().map(|(a, b)| (t.rep(a), t.rep(b))).collect();
    let hats: Vec<(CMatrix, CMatrix)> = reps
        .iter()
        .map(|(a, b)| (t.conjugate_by_j(a), t.conjugate_by_j(b)))
        .collect();
    let mut out = CMatrix::zeros(n, n);
    for (a, b) in &reps {
        for (ah, bh) in &hats {
            out += a * ah * t.dirac() * b * bh;
        }
    }
    out
}

/// `u omega u*` as a one-form, keeping term structure:
/// `u a [D, b] u* = (u a) [D, b u*] - (u a b) [D, u*]`.
pub fn conjugate_one_form(t: &RealSpectralTriple, omega: &OneForm, u: &CMatrix) -> OneForm {
    let ua = u.adjoint();
    let mut terms = Vec::with_capacity(2 * omega.terms.len());
    for (a, b) in &omega.terms {
        terms.push((u * a, b * &ua));
        terms.push((-(u * a * b), ua.clone()));
    }
    OneForm::new(t, terms)
}

/// Transformed background and fluctuation, with the covariance residual
/// `|D_{omega0' + omega'} - U D_{omega0 + omega} U*|`.
#[derive(Debug, Clone)]
pub struct GaugeTransformed {
    pub background: OneForm,
    pub field: OneForm,
    pub covariance_residual: f64,
}

/// `omega0 -> u omega0 u* + u [D, u*]`, `omega -> u omega u*`.
pub fn gauge_transform_field(
    t: &RealSpectralTriple,
    omega: &OneForm,
    background: &OneForm,
    u: &CMatrix,
    tol: &Tolerances,
) -> Result<GaugeTransformed, GaugeError> {
    let g = GaugeElement::new(t, u)?;
    let pure = OneForm::new(t, alloc::vec![(u.clone(), u.adjoint())]);
    let new_background = conjugate_one_form(t, background, u).add(&pure);
    let new_field = conjugate_one_form(t, omega, u);

    let before = fluctuate(t, &(&background.evaluated + &omega.evaluated), tol)?;
    let after = fluctuate(t, &(&new_background.evaluated + &new_field.evaluated), tol)?;
    let expected = &g.matrix * before * g.matrix.adjoint();
    Ok(GaugeTransformed {
        covariance_residual: distance(&after, &expected),
        background: new_background,
        field: new_field,
    })
}

/// Pure-gauge identity `D_{u[D,u*]} = U D U*` and the doubled form, for one
/// unitary.
pub fn pure_gauge_residuals(
    t: &RealSpectralTriple,
    u: &CMatrix,
    tol: &Tolerances,
) -> Result<(f64, f64), GaugeError> {
    let g = GaugeElement::new(t, u)?;
    let p = Perturbation::from_unitary(t, u)?;
    let omega = gauge_field(t, &p, tol)?;
    let d_omega = fluctuate(t, &omega.evaluated, tol)?;
    let conj = &g.matrix * t.dirac() * g.matrix.adjoint();
    let doubled = doubled_fluctuation(t, &p);
    Ok((distance(&d_omega, &conj), distance(&doubled, &d_omega)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_commutative, build_finite_ym, build_hs_model, Hopping};
    use crate::numerics::{identity, seeded_rng};
    use rand::Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn gauge_element_preserves_j() {
        let t = build_hs_model(3, 1).unwrap();
        let u = random_unitary(t.algebra(), 4);
        let g = GaugeElement::new(&t, &u).unwrap();
        assert!(g.unitarity_residual() < 1e-9);
        assert!(g.real_structure_residual(&t) < 1e-8);
        // in the Hilbert-Schmidt picture U x = u x u*
        let expected = crate::models::left_mult(&u) * crate::models::right_mult(&u.adjoint());
        assert!(distance(&g.matrix, &expected) < 1e-10);
    }

    #[test]
    fn non_unitary_is_rejected() {
        let t = build_hs_model(2, 1).unwrap();
        let m = identity(2) * c64(2.0, 0.0);
        assert!(matches!(
            GaugeElement::new(&t, &m),
            Err(GaugeError::NotUnitary { .. })
        ));
        assert!(Perturbation::from_unitary(&t, &m).is_err());
    }

    #[test]
    fn gauge_lie_dimensions() {
        for n in 1..=3 {
            let t = build_hs_model(n, 2).unwrap();
            let g = gauge_lie_algebra(&t, &tol()).unwrap();
            assert_eq!(g.dim(), n * n - 1);
            assert!(g.report.passed(), "{}", g.report);
        }
        let t = build_commutative(3, &Hopping::none(3), 2).unwrap();
        assert_eq!(gauge_lie_algebra(&t, &tol()).unwrap().dim(), 0);
        let t = build_finite_ym(2, 2, &Hopping::none(2), 2).unwrap();
        let g = gauge_lie_algebra(&t, &tol()).unwrap();
        assert_eq!(g.dim(), 6);
        assert!(g.report.passed());
    }

    #[test]
    fn ad_kernel_examples() {
        let t = build_hs_model(2, 1).unwrap();
        let phase = identity(2) * c64(0.6f64.cos(), 0.6f64.sin());
        let k = ad_kernel_check(&t, &phase, &tol()).unwrap();
        assert!(k.in_kernel && k.in_aj);
        let u = random_unitary(t.algebra(), 3);
        let k = ad_kernel_check(&t, &u, &tol()).unwrap();
        assert!(!k.in_kernel && !k.in_aj);

        let c = build_commutative(3, &Hopping::none(3), 1).unwrap();
        let mut rng = seeded_rng(2);
        let mut d = CMatrix::zeros(3, 3);
        for i in 0..3 {
            let a: f64 = rng.random_range(0.0..6.0);
            d[(i, i)] = c64(a.cos(), a.sin());
        }
        let k = ad_kernel_check(&c, &d, &tol()).unwrap();
        assert!(k.in_kernel && k.in_aj);
    }

    #[test]
    fn ad_is_a_homomorphism() {
        let t = build_finite_ym(2, 2, &Hopping::none(2), 1).unwrap();
        for s in 0..5 {
            let u = random_unitary(t.algebra(), s);
            let v = random_unitary(t.algebra(), s + 100);
            assert!(ad_homomorphism_residual(&t, &u, &v).unwrap() < 1e-8);
        }
    }

    #[test]
    fn perturbation_semigroup() {
        let t = build_hs_model(2, 1).unwrap();
        let id = Perturbation::identity(&t);
        let p = Perturbation::random(&t, 7);
        p.certify(&t, &tol()).unwrap();
        assert!(distance(&p.product(&id).operator(&t), &p.operator(&t)) < 1e-10);
        let u = random_unitary(t.algebra(), 1);
        let v = random_unitary(t.algebra(), 2);
        let pu = Perturbation::from_unitary(&t, &u).unwrap();
        let pv = Perturbation::from_unitary(&t, &v).unwrap();
        let puv = Perturbation::from_unitary(&t, &(&u * &v)).unwrap();
        assert!(distance(&pu.product(&pv).operator(&t), &puv.operator(&t)) < 1e-10);
        let q = Perturbation::random(&t, 8);
        p.checked_product(&q, &t, &tol()).unwrap();
    }

    #[test]
    fn compression_keeps_the_tensor() {
        let t = build_finite_ym(2, 2, &Hopping::none(2), 1).unwrap();
        let mut p = Perturbation::identity(&t);
        for s in 0..6 {
            p = p.product(&Perturbation::random(&t, 40 + s));
        }
        let c = p.compressed(&t);
        assert!(c.terms.len() <= t.algebra().dim());
        assert!(p.terms.len() == 64);
        assert!(distance(&c.operator(&t), &p.operator(&t)) < 1e-10);
        c.certify(&t, &tol()).unwrap();
    }

    #[test]
    fn broken_perturbation_is_flagged() {
        let t = build_hs_model(2, 1).unwrap();
        let a = t.algebra().random_element(3);
        let p = Perturbation {
            terms: alloc::vec![(a.clone(), identity(2)), (identity(2), identity(2) - &a)],
        };
        // normalized but generically not self-adjoint
        assert!(p.normalization_residual(&t) < 1e-12);
        assert!(matches!(
            p.certify(&t, &tol()),
            Err(GaugeError::MembershipViolated { .. })
        ));
    }

    #[test]
    fn gauge_field_examples() {
        let t = build_hs_model(2, 1).unwrap();
        let omega = gauge_field(&t, &Perturbation::identity(&t), &tol()).unwrap();
        assert!(frobenius(&omega.evaluated) < 1e-12);
        let u = random_unitary(t.algebra(), 5);
        let omega = gauge_field(&t, &Perturbation::from_unitary(&t, &u).unwrap(), &tol()).unwrap();
        let direct = t.rep(&u) * t.differential(&u.adjoint());
        assert!(distance(&omega.evaluated, &direct) < 1e-12);
        let omega = gauge_field(&t, &Perturbation::random(&t, 3), &tol()).unwrap();
        assert!(omega.self_adjoint_residual() < 1e-8);
        assert!(omega.membership_residual(&t) < 1e-8);
    }

    #[test]
    fn fluctuation_examples() {
        let t = build_finite_ym(2, 2, &Hopping::none(2), 1).unwrap();
        let zero = CMatrix::zeros(8, 8);
        assert!(distance(&fluctuate(&t, &zero, &tol()).unwrap(), t.dirac()) < 1e-15);
        for s in 0..5 {
            let u = random_unitary(t.algebra(), s);
            let (pure, doubled) = pure_gauge_residuals(&t, &u, &tol()).unwrap();
            assert!(pure < 1e-9, "{pure}");
            assert!(doubled < 1e-9, "{doubled}");
            let p = Perturbation::random(&t, s + 50);
            let omega = gauge_field(&t, &p, &tol()).unwrap();
            let d = fluctuate(&t, &omega.evaluated, &tol()).unwrap();
            assert!(hermiticity_residual(&d) < 1e-9);
            assert!(distance(&doubled_fluctuation(&t, &p), &d) < 1e-9);
        }
    }

    #[test]
    fn gauge_transformation_examples() {
        let t = build_hs_model(2, 4).unwrap();
        let zero = OneForm::zero(&t);
        let omega = gauge_field(&t, &Perturbation::random(&t, 1), &tol()).unwrap();
        let e = t.algebra().unit().clone();
        let same = gauge_transform_field(&t, &omega, &zero, &e, &tol()).unwrap();
        assert!(distance(&same.field.evaluated, &omega.evaluated) < 1e-12);
        assert!(crate::numerics::frobenius(&same.background.evaluated) < 1e-12);

        let u = random_unitary(t.algebra(), 9);
        let pure = gauge_transform_field(&t, &zero, &zero, &u, &tol()).unwrap();
        let expected = t.rep(&u) * t.differential(&u.adjoint());
        assert!(distance(&pure.background.evaluated, &expected) < 1e-12);
        assert!(crate::numerics::frobenius(&pure.field.evaluated) < 1e-12);

        let background = gauge_field(&t, &Perturbation::random(&t, 2), &tol()).unwrap();
        let moved = gauge_transform_field(&t, &omega, &background, &u, &tol()).unwrap();
        assert!(moved.covariance_residual < 1e-8);
        let pu = t.rep(&u);
        let conj = &pu * &omega.evaluated * pu.adjoint();
        assert!(distance(&moved.field.evaluated, &conj) < 1e-10);
    }

    #[test]
    fn diagonal_algebra_has_trivial_gauge_algebra() {
        let t = build_commutative(2, &Hopping::none(2), 0).unwrap();
        let g = gauge_lie_algebra(&t, &tol()).unwrap();
        assert_eq!(g.u_a_dim, 2);
        assert_eq!(g.u_aj_dim, 2);
    }
}
