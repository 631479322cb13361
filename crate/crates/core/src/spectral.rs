//! Real spectral triples in finite dimension.
//!
//! The real structure is stored through its kernel, `J v = K conj(v)`. In
//! matrix form:
//!
//! * `J m J^{-1} = K conj(m) K*`;
//! * `b^0 = J b* J^{-1} = eps K pi(b)^T conj(K)`;
//! * `a J = J a*` iff `pi(a) K = K pi(a)^T`;
//! * `J^2 = eps` iff `K conj(K) = eps I`, and `J D = eps' D J` iff
//!   `K conj(D) = eps' D K`;
//! * `U J U* = J'` iff `U K U^T = K'`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::OnceCell;

use crate::numerics::{
    c64, commutator, conj, distance, frobenius, identity, nullspace, stack, unitarity_residual,
    AntiLinearOp, CMatrix, NumericsError, Subspace, Tolerances,
};
use crate::report::{Check, Report, Scope, Value};
use crate::staralg::{center, FiniteStarAlgebra, StarAlgError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("representation has {found} images for an algebra of dimension {expected}")]
    RepresentationCount { expected: usize, found: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Algebra(#[from] StarAlgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Option<Self> {
        if v == 1.0 {
            Some(Sign::Plus)
        } else if v == -1.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

/// `C_D(A)` together with its even and odd spans.
#[derive(Debug, Clone, PartialEq)]
pub struct CdAlgebra {
    pub algebra: FiniteStarAlgebra,
    pub even: Subspace,
    pub odd: Subspace,
    /// `dim(even ∩ odd)`; the grading is consistent iff this is zero.
    pub overlap: usize,
}

impl CdAlgebra {
    pub fn grading_consistent(&self) -> bool {
        self.overlap == 0
    }
}

/// `(A, H, D; J)` with signs `J^2 = eps`, `J D = eps' D J`.
///
/// `A` lives in its own faithful matrix picture; `pi` is recorded by the
/// images of the orthonormal basis of `A` and extended linearly.
#[derive(Debug, Clone)]
pub struct RealSpectralTriple {
    algebra: FiniteStarAlgebra,
    rep: Vec<CMatrix>,
    dirac: CMatrix,
    j: AntiLinearOp,
    epsilon: Sign,
    epsilon_prime: Sign,
    label: String,
    one_forms: OnceCell<Subspace>,
    cd: OnceCell<CdAlgebra>,
}

impl RealSpectralTriple {
    /// Assembles a triple from the images of `algebra.basis()`. Only shapes
    /// are validated here; the axioms are the business of
    /// [`RealSpectralTriple::check_axioms`].
    pub fn new(
        algebra: FiniteStarAlgebra,
        rep: Vec<CMatrix>,
        dirac: CMatrix,
        j: AntiLinearOp,
        epsilon: Sign,
        epsilon_prime: Sign,
        label: &str,
    ) -> Result<Self, SpectralError> {
        if rep.len() != algebra.dim() {
            return Err(SpectralError::RepresentationCount {
                expected: algebra.dim(),
                found: rep.len(),
            });
        }
        let n = dirac.nrows();
        crate::numerics::check_shape(&dirac, (n, n))?;
        crate::numerics::check_shape(j.kernel(), (n, n))?;
        for r in &rep {
            crate::numerics::check_shape(r, (n, n))?;
        }
        Ok(Self {
            algebra,
            rep,
            dirac,
            j,
            epsilon,
            epsilon_prime,
            label: label.into(),
            one_forms: OnceCell::new(),
            cd: OnceCell::new(),
        })
    }

    /// Builds `pi` from a linear map given as a closure.
    pub fn from_map<F>(
        algebra: FiniteStarAlgebra,
        pi: F,
        dirac: CMatrix,
        j: AntiLinearOp,
        epsilon: Sign,
        epsilon_prime: Sign,
        label: &str,
    ) -> Result<Self, SpectralError>
    where
        F: Fn(&CMatrix) -> CMatrix,
    {
        let rep = algebra.basis().iter().map(pi).collect();
        Self::new(algebra, rep, dirac, j, epsilon, epsilon_prime, label)
    }

    pub fn algebra(&self) -> &FiniteStarAlgebra {
        &self.algebra
    }

    pub fn hilbert_dim(&self) -> usize {
        self.dirac.nrows()
    }

    pub fn dirac(&self) -> &CMatrix {
        &self.dirac
    }

    pub fn real_structure(&self) -> &AntiLinearOp {
        &self.j
    }

    pub fn kernel(&self) -> &CMatrix {
        self.j.kernel()
    }

    pub fn epsilon(&self) -> Sign {
        self.epsilon
    }

    pub fn epsilon_prime(&self) -> Sign {
        self.epsilon_prime
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Images of the orthonormal basis of `A`.
    pub fn rep_basis(&self) -> &[CMatrix] {
        &self.rep
    }

    /// `pi(a)` for `a` in `A` (the component of `a` outside `A` is ignored).
    pub fn rep(&self, a: &CMatrix) -> CMatrix {
        let coords = self.algebra.space().coordinates(a);
        let n = self.hilbert_dim();
        let mut out = CMatrix::zeros(n, n);
        for (r, &c) in self.rep.iter().zip(coords.iter()) {
            out += r * c;
        }
        out
    }

    /// `J m J^{-1}` as a matrix.
    pub fn conjugate_by_j(&self, m: &CMatrix) -> CMatrix {
        let k = self.kernel();
        k * conj(m) * k.adjoint()
    }

    /// `J pi(b)* J^{-1} = eps K pi(b)^T conj(K)`, for `pi(b)` already applied.
    pub fn opposite_of(&self, pi_b: &CMatrix) -> CMatrix {
        let k = self.kernel();
        k * pi_b.transpose() * conj(k) * c64(self.epsilon.value(), 0.0)
    }

    /// `b^0` for `b` in `A`.
    pub fn opposite(&self, b: &CMatrix) -> CMatrix {
        self.opposite_of(&self.rep(b))
    }

    /// `[D, pi(a)]`.
    pub fn differential(&self, a: &CMatrix) -> CMatrix {
        commutator(&self.dirac, &self.rep(a))
    }

    /// The same `(H, D, J)` with the algebra cut down to `sub`.
    pub fn restrict(&self, sub: &FiniteStarAlgebra, label: &str) -> Result<Self, SpectralError> {
        let rep = sub.basis().iter().map(|b| self.rep(b)).collect();
        Self::new(
            sub.clone(),
            rep,
            self.dirac.clone(),
            self.j.clone(),
            self.epsilon,
            self.epsilon_prime,
            label,
        )
    }

    /// The triple transported by a unitary `U` on `H`:
    /// `pi' = U pi U*`, `D' = U D U*`, `K' = U K U^T`.
    pub fn conjugate_by(&self, u: &CMatrix, label: &str) -> Result<Self, SpectralError> {
        let n = self.hilbert_dim();
        crate::numerics::check_shape(u, (n, n))?;
        let ua = u.adjoint();
        let rep = self.rep.iter().map(|r| u * r * &ua).collect();
        let dirac = u * &self.dirac * &ua;
        let kernel = u * self.kernel() * u.transpose();
        Self::new(
            self.algebra.clone(),
            rep,
            dirac,
            AntiLinearOp::new_unchecked(kernel),
            self.epsilon,
            self.epsilon_prime,
            label,
        )
    }

    /// Axioms of a real spectral triple, one check each.
    pub fn check_axioms(&self, tol: &Tolerances) -> Report {
        let mut report = Report::new(&format!("axioms of {}", self.label));
        let basis = self.algebra.basis();
        let n = self.hilbert_dim();

        let mut mult: f64 = 0.0;
        let mut star: f64 = 0.0;
        for (x, px) in basis.iter().zip(&self.rep) {
            star = star.max(distance(&self.rep(&x.adjoint()), &px.adjoint()));
            for (y, py) in basis.iter().zip(&self.rep) {
                mult = mult.max(distance(&self.rep(&(x * y)), &(px * py)));
            }
        }
        report.push(Check::residual(
            "rep-multiplicative",
            "pi(ab) = pi(a) pi(b)",
            mult,
            tol.structural,
            Scope::Exact,
        ));
        report.push(Check::residual(
            "rep-star",
            "pi(a*) = pi(a)*",
            star,
            tol.structural,
            Scope::Exact,
        ));
        report.push(Check::residual(
            "rep-unital",
            "pi(1) = 1",
            distance(&self.rep(self.algebra.unit()), &identity(n)),
            tol.structural,
            Scope::Exact,
        ));
        let image = Subspace::spanned_by(n, n, self.rep.iter());
        report.push(Check::count(
            "rep-faithful",
            "pi is injective",
            image.dim(),
            self.algebra.dim(),
            Scope::Exact,
        ));
        report.push(Check::residual(
            "dirac-self-adjoint",
            "D = D*",
            distance(&self.dirac, &self.dirac.adjoint()),
            tol.construction,
            Scope::Exact,
        ));
        report.absorb(self.real_structure_checks(tol));

        let opposites: Vec<CMatrix> = self.rep.iter().map(|r| self.opposite_of(r)).collect();
        let diffs: Vec<CMatrix> = self
            .rep
            .iter()
            .map(|r| commutator(&self.dirac, r))
            .collect();
        let mut comm: f64 = 0.0;
        let mut order_one: f64 = 0.0;
        for b0 in &opposites {
            for (pa, da) in self.rep.iter().zip(&diffs) {
                comm = comm.max(frobenius(&commutator(pa, b0)));
                order_one = order_one.max(frobenius(&commutator(da, b0)));
            }
        }
        report.push(Check::residual(
            "commutant",
            "[a, b^0] = 0",
            comm,
            tol.derived,
            Scope::Exact,
        ));
        report.push(Check::residual(
            "order-one",
            "[[D, a], b^0] = 0",
            order_one,
            tol.derived,
            Scope::Exact,
        ));
        report.note("finite dimension: compact resolvent and bounded commutators are automatic");
        report
    }

    /// `K` unitary, `J^2 = eps`, `J D = eps' D J`.
    pub fn real_structure_checks(&self, tol: &Tolerances) -> Report {
        let mut report = Report::new("real structure");
        let k = self.kernel();
        report.push(Check::residual(
            "j-unitary",
            "J is an anti-linear isometry",
            unitarity_residual(k),
            tol.structural,
            Scope::Exact,
        ));
        report.push(Check::residual(
            "j-square",
            "J^2 = eps",
            self.j.square_residual(self.epsilon.value()),
            tol.structural,
            Scope::Exact,
        ));
        let lhs = k * conj(&self.dirac);
        let rhs = &self.dirac * k * c64(self.epsilon_prime.value(), 0.0);
        report.push(Check::residual(
            "j-dirac",
            "J D = eps' D J",
            distance(&lhs, &rhs),
            tol.structural,
            Scope::Exact,
        ));
        report
    }

    /// `Omega^1_D(A)`: the span of `pi(a) [D, pi(b)]`.
    pub fn one_form_space(&self) -> &Subspace {
        self.one_forms.get_or_init(|| {
            let n = self.hilbert_dim();
            let diffs: Vec<CMatrix> = self
                .rep
                .iter()
                .map(|r| commutator(&self.dirac, r))
                .collect();
            let mut span = Subspace::zero(n, n);
            for d in &diffs {
                for a in &self.rep {
                    if span.dim() == n * n {
                        return span;
                    }
                    span.insert(&(a * d));
                }
            }
            span
        })
    }

    /// The algebra generated by `pi(A)` and `[D, pi(A)]`, graded by the
    /// parity of the number of `[D, .]` letters.
    pub fn c_d_algebra(&self) -> &CdAlgebra {
        self.cd.get_or_init(|| {
            let n = self.hilbert_dim();
            let mut letters: Vec<(CMatrix, bool)> = Vec::new();
            for r in &self.rep {
                letters.push((r.clone(), false));
            }
            let mut odd_letters = Subspace::zero(n, n);
            for r in &self.rep {
                odd_letters.insert(&commutator(&self.dirac, r));
            }
            for d in odd_letters.basis() {
                letters.push((d.clone(), true));
            }

            let mut even = Subspace::zero(n, n);
            let mut odd = Subspace::zero(n, n);
            let mut queue: Vec<(CMatrix, bool)> = Vec::new();
            fn push(
                m: &CMatrix,
                parity: bool,
                even: &mut Subspace,
                odd: &mut Subspace,
                queue: &mut Vec<(CMatrix, bool)>,
            ) {
                let target = if parity { odd } else { even };
                if target.insert(m) {
                    queue.push((target.basis()[target.dim() - 1].clone(), parity));
                }
            }
            push(&identity(n), false, &mut even, &mut odd, &mut queue);
            for (m, parity) in &letters {
                push(m, *parity, &mut even, &mut odd, &mut queue);
            }
            while let Some((w, parity)) = queue.pop() {
                for (g, gp) in &letters {
                    push(&(g * &w), parity ^ gp, &mut even, &mut odd, &mut queue);
                }
            }
            let mut total = even.clone();
            for b in odd.basis() {
                total.insert(b);
            }
            let overlap = even.dim() + odd.dim() - total.dim();
            let algebra = FiniteStarAlgebra::from_subspace(total, &format!("C_D({})", self.label))
                .expect("words in a *-closed alphabet span a *-algebra");
            CdAlgebra {
                algebra,
                even,
                odd,
                overlap,
            }
        })
    }

    /// The kernel of `a -> pi(a) K - K pi(a)^T` inside `A`, in `A`'s own
    /// matrix picture.
    pub fn aj_space(&self) -> Subspace {
        let k = self.kernel();
        nullspace(self.algebra.space(), |a| {
            let pa = self.rep(a);
            stack([&(&pa * k - k * pa.transpose())])
        })
    }

    /// `A_J = { a : a J = J a* }`.
    pub fn compute_aj(&self) -> Result<FiniteStarAlgebra, SpectralError> {
        let label = format!("{}_J", self.algebra.label());
        Ok(FiniteStarAlgebra::from_subspace(self.aj_space(), &label)?)
    }

    /// `A_J` is a commutative unital *-subalgebra of the center of `A`
    /// commuting with every one-form. The hypotheses on `J` are checked
    /// alongside, since the conclusions depend on them.
    pub fn verify_aj_properties(&self, tol: &Tolerances) -> Report {
        let mut report = Report::new(&format!("A_J of {}", self.label));
        let hyp = self.real_structure_checks(tol);
        for c in hyp.checks.into_iter().filter(|c| c.name != "j-dirac") {
            report.push(c);
        }
        let space = self.aj_space();
        report.quantity("aj_dim", Value::Int(space.dim() as i64));
        report.push(Check::residual(
            "aj-unit",
            "1 lies in A_J",
            space.residual(self.algebra.unit()),
            tol.derived,
            Scope::FiniteShadow,
        ));
        let adjoint = space
            .basis()
            .iter()
            .map(|b| space.residual(&b.adjoint()))
            .fold(0.0, f64::max);
        report.push(Check::residual(
            "aj-involutive",
            "A_J is closed under adjoints",
            adjoint,
            tol.derived,
            Scope::FiniteShadow,
        ));
        let mut comm: f64 = 0.0;
        for x in space.basis() {
            for y in space.basis() {
                comm = comm.max(frobenius(&commutator(x, y)));
            }
        }
        report.push(Check::residual(
            "aj-commutative",
            "A_J is commutative",
            comm,
            tol.derived,
            Scope::FiniteShadow,
        ));
        let z = center(&self.algebra);
        let central = space
            .basis()
            .iter()
            .map(|b| z.residual(b))
            .fold(0.0, f64::max);
        report.push(Check::residual(
            "aj-central",
            "A_J lies in the center of A",
            central,
            tol.derived,
            Scope::FiniteShadow,
        ));
        let omega = self.one_form_space();
        let mut with_forms: f64 = 0.0;
        for b in space.basis() {
            let pb = self.rep(b);
            for w in omega.basis() {
                with_forms = with_forms.max(frobenius(&commutator(&pb, w)));
            }
        }
        report.push(Check::residual(
            "aj-commutes-one-forms",
            "[a, omega] = 0 for a in A_J and omega in Omega^1_D",
            with_forms,
            tol.derived,
            Scope::FiniteShadow,
        ));
        report
    }

    /// Whether `U` carries `self` onto `other`.
    pub fn unitary_equivalent(
        &self,
        other: &Self,
        u: &CMatrix,
        tol: &Tolerances,
    ) -> Result<Report, SpectralError> {
        let n = self.hilbert_dim();
        crate::numerics::check_shape(u, (n, n))?;
        crate::numerics::check_shape(other.dirac(), (n, n))?;
        if other.algebra.ambient() != self.algebra.ambient() {
            return Err(NumericsError::DimensionMismatch {
                expected: (self.algebra.ambient(), self.algebra.ambient()),
                found: (other.algebra.ambient(), other.algebra.ambient()),
            }
            .into());
        }
        let ua = u.adjoint();
        let mut report = Report::new(&format!("{} ~ {}", self.label, other.label));
        report.push(Check::residual(
            "u-unitary",
            "U is unitary",
            unitarity_residual(u),
            tol.structural,
            Scope::Exact,
        ));
        let rep = self
            .algebra
            .basis()
            .iter()
            .zip(&self.rep)
            .map(|(b, r)| distance(&(u * r * &ua), &other.rep(b)))
            .fold(0.0, f64::max);
        report.push(Check::residual(
            "u-rep",
            "U pi_1(a) U* = pi_2(a)",
            rep,
            tol.derived,
            Scope::Exact,
        ));
        report.push(Check::residual(
            "u-dirac",
            "U D_1 U* = D_2",
            distance(&(u * &self.dirac * &ua), other.dirac()),
            tol.derived,
            Scope::Exact,
        ));
        report.push(Check::residual(
            "u-real-structure",
            "U J_1 U* = J_2",
            distance(&(u * self.kernel() * u.transpose()), other.kernel()),
            tol.derived,
            Scope::Exact,
        ));
        Ok(report)
    }
}

/// `sum_k pi(a_k) [D, pi(b_k)]` with its terms kept.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    pub terms: Vec<(CMatrix, CMatrix)>,
    pub evaluated: CMatrix,
}

impl OneForm {
    pub fn zero(t: &RealSpectralTriple) -> Self {
        let n = t.hilbert_dim();
        Self {
            terms: Vec::new(),
            evaluated: CMatrix::zeros(n, n),
        }
    }

    pub fn new(t: &RealSpectralTriple, terms: Vec<(CMatrix, CMatrix)>) -> Self {
        let n = t.hilbert_dim();
        let mut evaluated = CMatrix::zeros(n, n);
        for (a, b) in &terms {
            evaluated += t.rep(a) * t.differential(b);
        }
        Self { terms, evaluated }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self {
            terms,
            evaluated: &self.evaluated + &other.evaluated,
        }
    }

    pub fn self_adjoint_residual(&self) -> f64 {
        distance(&self.evaluated, &self.evaluated.adjoint())
    }

    /// Distance of the evaluated form from `Omega^1_D(A)`.
    pub fn membership_residual(&self, t: &RealSpectralTriple) -> f64 {
        t.one_form_space().residual(&self.evaluated)
    }
}
