//! Finite-dimensional *-algebras carried inside a faithful matrix
//! representation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::numerics::{
    c64, commutator, distance, expm_skew, frobenius, generated_algebra, hermitian_eigen, identity,
    nullspace, range_projection, seeded_rng, stack, CMatrix, NumericsError, RealSubspace, Subspace,
    Tolerances,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StarAlgError {
    #[error("span is not closed under products: b{left} * b{right} leaves it by {residual:e}")]
    NotClosed {
        left: usize,
        right: usize,
        residual: f64,
    },
    #[error("span is not closed under adjoints: b{index}* leaves it by {residual:e}")]
    NotAdjointClosed { index: usize, residual: f64 },
    #[error("algebra has no unit inside its span (residual {residual:e})")]
    NoUnit { residual: f64 },
    #[error("algebra is not commutative (commutator residual {residual:e})")]
    NonCommutative { residual: f64 },
    #[error("no generic element with separated eigenvalues after {attempts} draws")]
    DegenerateDraw { attempts: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A *-closed, unital span of `n x n` matrices. The unit need not be the
/// identity of the ambient matrix algebra (fibers `p A` have unit `p`).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteStarAlgebra {
    space: Subspace,
    unit: CMatrix,
    label: String,
}

impl FiniteStarAlgebra {
    /// Packages a span after verifying closure, locating its unit.
    pub fn from_span<'a, I>(vectors: I, ambient: usize, label: &str) -> Result<Self, StarAlgError>
    where
        I: IntoIterator<Item = &'a CMatrix>,
    {
        let space = Subspace::spanned_by(ambient, ambient, vectors);
        Self::from_subspace(space, label)
    }

    /// As [`FiniteStarAlgebra::from_span`], starting from an orthonormal span.
    pub fn from_subspace(space: Subspace, label: &str) -> Result<Self, StarAlgError> {
        let tol = Tolerances::default().derived;
        let basis = space.basis();
        for (i, b) in basis.iter().enumerate() {
            let residual = space.residual(&b.adjoint());
            if residual >= tol {
                return Err(StarAlgError::NotAdjointClosed { index: i, residual });
            }
        }
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let residual = space.residual(&(x * y));
                if residual >= tol {
                    return Err(StarAlgError::NotClosed {
                        left: i,
                        right: j,
                        residual,
                    });
                }
            }
        }
        let unit = find_unit(&space)?;
        Ok(Self {
            space,
            unit,
            label: label.into(),
        })
    }

    /// Algebra generated by `generators` together with the ambient identity.
    pub fn generated_by(generators: &[CMatrix], label: &str) -> Result<Self, StarAlgError> {
        let space = generated_algebra(generators, true)?;
        Self::from_subspace(space, label)
    }

    /// `M_n`.
    pub fn full_matrix(n: usize) -> Self {
        Self {
            space: Subspace::full(n, n),
            unit: identity(n),
            label: format!("M_{n}"),
        }
    }

    /// Diagonal matrices in `M_n`, i.e. `C^n`.
    pub fn diagonal(n: usize) -> Self {
        let basis: Vec<CMatrix> = (0..n)
            .map(|i| {
                let mut e = CMatrix::zeros(n, n);
                e[(i, i)] = c64(1.0, 0.0);
                e
            })
            .collect();
        Self {
            space: Subspace::spanned_by(n, n, basis.iter()),
            unit: identity(n),
            label: format!("C^{n}"),
        }
    }

    /// Block-diagonal `M_{n_1} + ... + M_{n_k}` inside `M_{n_1 + ... + n_k}`.
    pub fn block_diagonal(sizes: &[usize]) -> Self {
        let n: usize = sizes.iter().sum();
        let mut basis = Vec::new();
        let mut offset = 0;
        for &s in sizes {
            for i in 0..s {
                for j in 0..s {
                    let mut e = CMatrix::zeros(n, n);
                    e[(offset + i, offset + j)] = c64(1.0, 0.0);
                    basis.push(e);
                }
            }
            offset += s;
        }
        let label = sizes
            .iter()
            .map(|s| format!("M_{s}"))
            .collect::<Vec<_>>()
            .join(" + ");
        Self {
            space: Subspace::spanned_by(n, n, basis.iter()),
            unit: identity(n),
            label,
        }
    }

    pub fn relabel(mut self, label: &str) -> Self {
        self.label = label.into();
        self
    }

    pub fn ambient(&self) -> usize {
        self.space.shape().0
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn basis(&self) -> &[CMatrix] {
        self.space.basis()
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn unit(&self) -> &CMatrix {
        &self.unit
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, m: &CMatrix, tol: f64) -> bool {
        self.space.contains(m, tol)
    }

    pub fn residual(&self, m: &CMatrix) -> f64 {
        self.space.residual(m)
    }

    pub fn project(&self, m: &CMatrix) -> CMatrix {
        self.space.project(m)
    }

    /// Largest commutator among basis pairs.
    pub fn commutativity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, x) in self.basis().iter().enumerate() {
            for y in &self.basis()[i + 1..] {
                worst = worst.max(frobenius(&commutator(x, y)));
            }
        }
        worst
    }

    pub fn is_commutative(&self, tol: f64) -> bool {
        self.commutativity_residual() <= tol
    }

    /// Random complex combination of the basis.
    pub fn random_element(&self, seed: u64) -> CMatrix {
        let mut rng = seeded_rng(seed);
        let mut out = CMatrix::zeros(self.ambient(), self.ambient());
        for b in self.basis() {
            out += b * c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        out
    }
}

fn find_unit(space: &Subspace) -> Result<CMatrix, StarAlgError> {
    let n = space.shape().0;
    if space.dim() == 0 {
        return Ok(CMatrix::zeros(n, n));
    }
    // the unit of a *-subalgebra of M_n projects onto the joint range
    let mut gram = CMatrix::zeros(n, n);
    for b in space.basis() {
        gram += b * b.adjoint();
    }
    let unit = range_projection(&gram);
    let tol = Tolerances::default().derived;
    let mut residual = space.residual(&unit);
    for b in space.basis() {
        residual = residual
            .max(distance(&(&unit * b), b))
            .max(distance(&(b * &unit), b));
    }
    if residual >= tol {
        return Err(StarAlgError::NoUnit { residual });
    }
    Ok(unit)
}

/// Packages an arbitrary span as an algebra, failing with the offending
/// product when it is not closed.
pub fn subalgebra_from_span(
    vectors: &[CMatrix],
    ambient: usize,
) -> Result<FiniteStarAlgebra, StarAlgError> {
    FiniteStarAlgebra::from_span(vectors.iter(), ambient, "subalgebra")
}

/// `Z(A)`: the kernel of `a -> ([a, b_j])_j` inside `A`.
pub fn center(a: &FiniteStarAlgebra) -> FiniteStarAlgebra {
    let basis = a.basis();
    let kernel = nullspace(a.space(), |x| {
        let comms: Vec<CMatrix> = basis.iter().map(|b| commutator(x, b)).collect();
        stack(comms.iter())
    });
    let label = format!("Z({})", a.label());
    // a central subspace of a *-algebra is again a *-algebra
    FiniteStarAlgebra::from_subspace(kernel, &label).expect("center of a *-algebra is a *-algebra")
}

/// Finite family of pairwise orthogonal projections summing to a unit; the
/// points of a finite base space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionFamily {
    pub projections: Vec<CMatrix>,
    pub labels: Vec<String>,
}

impl ProjectionFamily {
    pub fn len(&self) -> usize {
        self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }

    /// Largest violation of idempotence, self-adjointness, orthogonality and
    /// completeness against `unit`.
    pub fn residual(&self, unit: &CMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        let mut total = CMatrix::zeros(unit.nrows(), unit.ncols());
        for (i, p) in self.projections.iter().enumerate() {
            worst = worst
                .max(distance(&(p * p), p))
                .max(distance(p, &p.adjoint()));
            for q in &self.projections[i + 1..] {
                worst = worst.max(frobenius(&(p * q)));
            }
            total += p;
        }
        worst.max(distance(&total, unit))
    }
}

const PROJECTION_ATTEMPTS: usize = 10;

/// Minimal projections of a commutative algebra, read off the spectral
/// projections of one generic self-adjoint element.
pub fn minimal_projections(c: &FiniteStarAlgebra) -> Result<ProjectionFamily, StarAlgError> {
    let tol = Tolerances::default();
    let residual = c.commutativity_residual();
    if residual > tol.derived {
        return Err(StarAlgError::NonCommutative { residual });
    }
    let n = c.ambient();
    let hermitian: Vec<CMatrix> = c
        .basis()
        .iter()
        .flat_map(|b| {
            [
                (b + b.adjoint()) * c64(0.5, 0.0),
                (b - b.adjoint()) * c64(0.0, -0.5),
            ]
        })
        .collect();
    let self_adjoint = RealSubspace::spanned_by(n, n, hermitian.iter());

    for attempt in 0..PROJECTION_ATTEMPTS {
        let mut rng = seeded_rng(0x5eed_0000 + attempt as u64);
        let mut h = CMatrix::zeros(n, n);
        for s in self_adjoint.basis() {
            h += s * c64(rng.random_range(-1.0..1.0), 0.0);
        }
        // lift the spectrum on the unit's range above the complement's zero
        let lift = crate::numerics::op_norm(&h) + 1.0;
        let shifted = &h + c.unit() * c64(lift, 0.0);
        let (values, vectors) = hermitian_eigen(&shifted);

        let scale = lift * 2.0;
        let mut clusters: Vec<(f64, Vec<usize>)> = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            if v < 0.5 {
                continue;
            }
            match clusters.last_mut() {
                Some((last, members)) if (v - *last).abs() <= 1e-8 * scale => {
                    members.push(i);
                    *last = v;
                }
                _ => clusters.push((v, alloc::vec![i])),
            }
        }
        let collision = clusters.windows(2).any(|w| w[1].0 - w[0].0 < 1e-6 * scale);
        if collision || clusters.len() != c.dim() {
            continue;
        }
        let projections: Vec<CMatrix> = clusters
            .iter()
            .map(|(_, members)| {
                let mut p = CMatrix::zeros(n, n);
                for &i in members {
                    let v = vectors.column(i);
                    p += v * v.adjoint();
                }
                p
            })
            .collect();
        if projections.iter().any(|p| c.residual(p) > tol.derived) {
            continue;
        }
        let labels = (0..projections.len()).map(|i| format!("x{i}")).collect();
        return Ok(ProjectionFamily {
            projections,
            labels,
        });
    }
    Err(StarAlgError::DegenerateDraw {
        attempts: PROJECTION_ATTEMPTS,
    })
}

/// Real-orthonormal basis of the skew-hermitian part `u(A)`.
pub fn skew_hermitian_basis(a: &FiniteStarAlgebra) -> Vec<CMatrix> {
    skew_hermitian_space(a).basis().to_vec()
}

pub fn skew_hermitian_space(a: &FiniteStarAlgebra) -> RealSubspace {
    let n = a.ambient();
    let candidates: Vec<CMatrix> = a
        .basis()
        .iter()
        .flat_map(|b| {
            [
                (b - b.adjoint()) * c64(0.5, 0.0),
                (b + b.adjoint()) * c64(0.0, 0.5),
            ]
        })
        .collect();
    RealSubspace::spanned_by(n, n, candidates.iter())
}

/// A unitary of `A` (so `u u* = unit`) drawn as the exponential of a random
/// skew-hermitian element.
pub fn random_unitary(a: &FiniteStarAlgebra, seed: u64) -> CMatrix {
    let mut rng = seeded_rng(seed);
    let n = a.ambient();
    let mut x = CMatrix::zeros(n, n);
    for s in skew_hermitian_basis(a) {
        x += s * c64(rng.random_range(-2.0..2.0), 0.0);
    }
    a.unit() * expm_skew(&x)
}

/// Random skew-hermitian element of `A`.
pub fn random_skew(a: &FiniteStarAlgebra, seed: u64) -> CMatrix {
    let mut rng = seeded_rng(seed);
    let n = a.ambient();
    let mut x = CMatrix::zeros(n, n);
    for s in skew_hermitian_basis(a) {
        x += s * c64(rng.random_range(-1.0..1.0), 0.0);
    }
    x
}
