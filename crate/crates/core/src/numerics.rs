//! Dense complex linear algebra shared by every other module.
//!
//! Matrices are plain `nalgebra` dynamic matrices over `Complex<f64>`. Spans
//! of matrices are handled as vectors under the trace inner product
//! `<a, b> = tr(a* b)`, which is the Frobenius inner product on entries.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

pub use nalgebra::DVector;
use nalgebra::{Complex, DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Relative singular-value cutoff for ranks and nullspaces.
pub const RANK_TOL: f64 = 1e-9;

/// Generators smaller than this (Frobenius) are treated as zero when
/// generating algebras. Base-point evaluations such as `cos(pi/2)` land here.
pub const ZERO_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
}

/// Tolerance ladder: construction checks, structural identities, derived
/// identities and grid continuity scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub construction: f64,
    pub structural: f64,
    pub derived: f64,
    pub grid: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            construction: 1e-10,
            structural: 1e-9,
            derived: 1e-8,
            grid: 1e-4,
        }
    }
}

impl Tolerances {
    /// One tolerance for every rung of the ladder.
    pub fn uniform(tol: f64) -> Self {
        Self {
            construction: tol,
            structural: tol,
            derived: tol,
            grid: tol,
        }
    }
}

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Trace inner product `tr(a* b)`.
pub fn trace_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Entrywise complex conjugate.
pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

/// `max(|a - b|)` measured in Frobenius norm.
pub fn distance(a: &CMatrix, b: &CMatrix) -> f64 {
    frobenius(&(a - b))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `|u u* - 1|` and `|u* u - 1|`, whichever is larger.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let id = identity(u.nrows());
    let left = distance(&(u * u.adjoint()), &id);
    let right = distance(&(u.adjoint() * u), &id);
    left.max(right)
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    distance(m, &m.adjoint())
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let s = m.clone().svd(false, false).singular_values;
    s.iter().cloned().fold(0.0, f64::max)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in ascending
/// order. The input is symmetrized first.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * c64(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// `exp(x)` for skew-hermitian `x`, through the eigenvectors of `-i x`.
pub fn expm_skew(x: &CMatrix) -> CMatrix {
    let h = x * c64(0.0, -1.0);
    let (values, vectors) = hermitian_eigen(&h);
    let phases =
        DVector::from_iterator(values.len(), values.iter().map(|&l| c64(l.cos(), l.sin())));
    &vectors * CMatrix::from_diagonal(&phases) * vectors.adjoint()
}

/// Orthogonal projection onto the range of a positive semi-definite matrix,
/// keeping eigenvalues above `RANK_TOL` times the largest.
pub fn range_projection(psd: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(psd);
    let top = values.iter().cloned().fold(0.0, f64::max);
    let n = psd.nrows();
    let mut p = CMatrix::zeros(n, n);
    if top <= 0.0 {
        return p;
    }
    for (i, &l) in values.iter().enumerate() {
        if l > RANK_TOL * top {
            let v = vectors.column(i);
            p += v * v.adjoint();
        }
    }
    p
}

/// Deterministic generator used for every seeded draw in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let m = random_matrix(rng, n, n);
    (&m + m.adjoint()) * c64(0.5, 0.0)
}

/// Haar-ish random unitary from the exponential of a random skew matrix.
pub fn random_unitary_matrix<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let h = random_hermitian(rng, n) * c64(0.0, 2.0);
    expm_skew(&h)
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<C64> {
    DVector::from_fn(n, |_, _| {
        c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Anti-linear operator `v -> K conj(v)` stored through its unitary kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiLinearOp {
    kernel: CMatrix,
}

impl AntiLinearOp {
    /// Wraps a kernel, rejecting it unless unitary to `1e-10`.
    pub fn new(kernel: CMatrix) -> Result<Self, NumericsError> {
        let residual = unitarity_residual(&kernel);
        if residual > Tolerances::default().construction {
            return Err(NumericsError::NotUnitary { residual });
        }
        Ok(Self { kernel })
    }

    /// Wraps any square kernel. Candidate real structures that fail the
    /// axioms are still useful for negative checks.
    pub fn new_unchecked(kernel: CMatrix) -> Self {
        Self { kernel }
    }

    /// Complex conjugation on `C^n`.
    pub fn conjugation(n: usize) -> Self {
        Self {
            kernel: identity(n),
        }
    }

    pub fn kernel(&self) -> &CMatrix {
        &self.kernel
    }

    pub fn dim(&self) -> usize {
        self.kernel.nrows()
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.kernel * v.map(|z| z.conj())
    }

    /// `J^{-1} v = K^T conj(v)` for unitary `K`.
    pub fn apply_inverse(&self, v: &DVector<C64>) -> DVector<C64> {
        self.kernel.transpose() * v.map(|z| z.conj())
    }

    /// `|K conj(K) - eps I|`.
    pub fn square_residual(&self, eps: f64) -> f64 {
        let sq = &self.kernel * conj(&self.kernel);
        distance(&sq, &(identity(self.dim()) * c64(eps, 0.0)))
    }

    /// The sign `eps` with `J^2 = eps`, if one fits within `tol`.
    pub fn epsilon(&self, tol: f64) -> Option<f64> {
        [1.0, -1.0]
            .into_iter()
            .find(|&eps| self.square_residual(eps) <= tol)
    }
}

/// Matrix of the linear operator `J m J^{-1}`, which is `K conj(m) K*`.
pub fn antilinear_conjugate(j: &AntiLinearOp, m: &CMatrix) -> Result<CMatrix, NumericsError> {
    check_shape(m, (j.dim(), j.dim()))?;
    Ok(j.kernel() * conj(m) * j.kernel().adjoint())
}

pub fn check_shape(m: &CMatrix, expected: (usize, usize)) -> Result<(), NumericsError> {
    if m.shape() != expected {
        return Err(NumericsError::DimensionMismatch {
            expected,
            found: m.shape(),
        });
    }
    Ok(())
}

/// Complex span of matrices of a fixed shape, stored as an orthonormal basis
/// under the trace inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    rows: usize,
    cols: usize,
    basis: Vec<CMatrix>,
}

impl Subspace {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            basis: Vec::new(),
        }
    }

    /// Orthonormalizes a spanning family; dependent members are dropped.
    pub fn spanned_by<'a, I>(rows: usize, cols: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = &'a CMatrix>,
    {
        let mut s = Self::zero(rows, cols);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    /// All `rows x cols` matrices, spanned by matrix units.
    pub fn full(rows: usize, cols: usize) -> Self {
        let mut basis = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let mut e = CMatrix::zeros(rows, cols);
                e[(i, j)] = c64(1.0, 0.0);
                basis.push(e);
            }
        }
        Self { rows, cols, basis }
    }

    /// Trusts the caller that `basis` is orthonormal.
    pub(crate) fn from_orthonormal(rows: usize, cols: usize, basis: Vec<CMatrix>) -> Self {
        Self { rows, cols, basis }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// Coordinates `<b_i, m>` in the orthonormal basis.
    pub fn coordinates(&self, m: &CMatrix) -> DVector<C64> {
        DVector::from_iterator(self.dim(), self.basis.iter().map(|b| trace_inner(b, m)))
    }

    pub fn combine(&self, coords: &DVector<C64>) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, self.cols);
        for (b, &c) in self.basis.iter().zip(coords.iter()) {
            out += b * c;
        }
        out
    }

    pub fn project(&self, m: &CMatrix) -> CMatrix {
        self.combine(&self.coordinates(m))
    }

    /// Frobenius distance from `m` to the subspace.
    pub fn residual(&self, m: &CMatrix) -> f64 {
        frobenius(&(m - self.project(m)))
    }

    pub fn contains(&self, m: &CMatrix, tol: f64) -> bool {
        self.residual(m) <= tol * frobenius(m).max(1.0)
    }

    /// Adds `v` if it is independent of the current span. Returns whether
    /// the dimension grew.
    pub fn insert(&mut self, v: &CMatrix) -> bool {
        if v.shape() != (self.rows, self.cols) {
            return false;
        }
        let norm = frobenius(v);
        if norm <= ZERO_FLOOR {
            return false;
        }
        let mut w = v / c64(norm, 0.0);
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            let p = self.project(&w);
            w -= p;
        }
        let rest = frobenius(&w);
        if rest <= RANK_TOL {
            return false;
        }
        w /= c64(rest, 0.0);
        self.basis.push(w);
        true
    }

    /// Largest residual of either subspace's basis measured against the other.
    /// Zero iff the subspaces coincide.
    pub fn distance_to(&self, other: &Subspace) -> f64 {
        if self.shape() != other.shape() || self.dim() != other.dim() {
            return f64::INFINITY;
        }
        let a = self
            .basis
            .iter()
            .map(|b| other.residual(b))
            .fold(0.0, f64::max);
        let b = other
            .basis
            .iter()
            .map(|b| self.residual(b))
            .fold(0.0, f64::max);
        a.max(b)
    }

    /// Whether every basis vector of `self` lies in `other`, with the
    /// largest residual.
    pub fn inclusion_residual(&self, other: &Subspace) -> f64 {
        self.basis
            .iter()
            .map(|b| other.residual(b))
            .fold(0.0, f64::max)
    }

    /// Dimension of `self + other`.
    pub fn sum_dim(&self, other: &Subspace) -> usize {
        let mut s = self.clone();
        for b in &other.basis {
            s.insert(b);
        }
        s.dim()
    }
}

/// Real span of matrices, orthonormal under `Re tr(a* b)`. Used for
/// skew-hermitian spaces, which are real vector spaces only.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSubspace {
    rows: usize,
    cols: usize,
    basis: Vec<CMatrix>,
}

impl RealSubspace {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            basis: Vec::new(),
        }
    }

    pub fn spanned_by<'a, I>(rows: usize, cols: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = &'a CMatrix>,
    {
        let mut s = Self::zero(rows, cols);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn project(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, self.cols);
        for b in &self.basis {
            out += b * c64(trace_inner(b, m).re, 0.0);
        }
        out
    }

    pub fn residual(&self, m: &CMatrix) -> f64 {
        frobenius(&(m - self.project(m)))
    }

    pub fn insert(&mut self, v: &CMatrix) -> bool {
        if v.shape() != (self.rows, self.cols) {
            return false;
        }
        let norm = frobenius(v);
        if norm <= ZERO_FLOOR {
            return false;
        }
        let mut w = v / c64(norm, 0.0);
        for _ in 0..2 {
            let p = self.project(&w);
            w -= p;
        }
        let rest = frobenius(&w);
        if rest <= RANK_TOL {
            return false;
        }
        w /= c64(rest, 0.0);
        self.basis.push(w);
        true
    }
}

/// Orthonormal coefficient vectors spanning the kernel of the linear map
/// whose images of an orthonormal basis are `images`.
///
/// A direction counts as null when its image is below `RANK_TOL` times the
/// operator norm of the map, or below `RANK_TOL` outright.
pub fn nullspace_coefficients(images: &[DVector<C64>]) -> Vec<DVector<C64>> {
    let d = images.len();
    if d == 0 {
        return Vec::new();
    }
    let len = images.iter().map(|v| v.len()).max().unwrap_or(0);
    // pad so the thin SVD returns a full right basis
    let rows = len.max(d);
    let mut m = CMatrix::zeros(rows, d);
    for (j, v) in images.iter().enumerate() {
        for (i, z) in v.iter().enumerate() {
            m[(i, j)] = *z;
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = RANK_TOL * top.max(1.0);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cutoff)
        .map(|(i, _)| v_t.row(i).adjoint())
        .collect()
}

/// Kernel of a linear map on `domain`, the map being given by its action on
/// each basis element (flattened into a vector of any length).
pub fn nullspace<F>(domain: &Subspace, map: F) -> Subspace
where
    F: Fn(&CMatrix) -> DVector<C64>,
{
    let images: Vec<DVector<C64>> = domain.basis().iter().map(map).collect();
    let (rows, cols) = domain.shape();
    let basis = nullspace_coefficients(&images)
        .iter()
        .map(|c| domain.combine(c))
        .collect();
    Subspace::from_orthonormal(rows, cols, basis)
}

/// Flattens a list of matrices into one vector, for stacked linear maps.
pub fn stack<'a, I>(parts: I) -> DVector<C64>
where
    I: IntoIterator<Item = &'a CMatrix>,
{
    let mut out = Vec::new();
    for m in parts {
        out.extend(m.iter().cloned());
    }
    DVector::from_vec(out)
}

/// Smallest subspace containing `generators` (and the identity when
/// `include_unit`) that is closed under products and adjoints.
///
/// Words in the generators and their adjoints are grown by left
/// multiplication until the span stops growing; this terminates because the
/// dimension is bounded by `n^2`.
pub fn generated_algebra(
    generators: &[CMatrix],
    include_unit: bool,
) -> Result<Subspace, NumericsError> {
    let n = match generators.first() {
        Some(g) => g.nrows(),
        None => return Ok(Subspace::zero(0, 0)),
    };
    for g in generators {
        check_shape(g, (n, n))?;
    }
    let mut letters = Subspace::zero(n, n);
    for g in generators {
        letters.insert(g);
        letters.insert(&g.adjoint());
    }
    let letters = letters.basis().to_vec();

    let mut span = Subspace::zero(n, n);
    let mut queue: Vec<CMatrix> = Vec::new();
    if include_unit && span.insert(&identity(n)) {
        queue.push(span.basis()[span.dim() - 1].clone());
    }
    for g in &letters {
        if span.insert(g) {
            queue.push(span.basis()[span.dim() - 1].clone());
        }
    }
    while let Some(w) = queue.pop() {
        if span.dim() == n * n {
            break;
        }
        for g in &letters {
            if span.insert(&(g * &w)) {
                queue.push(span.basis()[span.dim() - 1].clone());
            }
        }
    }
    Ok(span)
}
