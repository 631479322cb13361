//! Canonical models: the Hilbert-Schmidt triple on `M_N`, finite Yang-Mills
//! triples over `k` points, commutative point sets, and the rational
//! orbifold algebras.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::nctorus::{clock_shift, TorusError};
use crate::numerics::{
    c64, identity, kron, nullspace, random_hermitian, seeded_rng, stack, AntiLinearOp, CMatrix,
};
use crate::report::{Check, Report, Scope, Value};
use crate::spectral::{RealSpectralTriple, Sign};
use crate::staralg::{center, FiniteStarAlgebra, StarAlgError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("hopping matrix must be {k} x {k} and hermitian (residual {residual:e})")]
    BadHopping { k: usize, residual: f64 },
    #[error("bad model parameters: {0}")]
    BadParameters(String),
    #[error("cannot parse model spec `{spec}`: {reason}")]
    Parse { spec: String, reason: String },
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Algebra(#[from] StarAlgError),
}

/// Row-major swap `e_i (x) e_j -> e_j (x) e_i`, the kernel of `x -> x*` on
/// `M_n` with the trace inner product.
pub fn flip_kernel(n: usize) -> CMatrix {
    let mut k = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            k[(i * n + j, j * n + i)] = c64(1.0, 0.0);
        }
    }
    k
}

/// `L_a = a (x) 1` on row-major `M_n`.
pub fn left_mult(a: &CMatrix) -> CMatrix {
    kron(a, &identity(a.nrows()))
}

/// `R_b = 1 (x) b^T` on row-major `M_n`: `x -> x b`.
pub fn right_mult(b: &CMatrix) -> CMatrix {
    kron(&identity(b.nrows()), &b.transpose())
}

fn block_diag(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), b.shape()).copy_from(b);
        at += b.nrows();
    }
    out
}

/// `A = M_N` on `H = M_N`, `D = L_M + R_M`, `J x = x*`.
pub fn build_hs_model(n: usize, seed: u64) -> Result<RealSpectralTriple, ModelError> {
    if n == 0 {
        return Err(ModelError::BadParameters("N must be at least 1".into()));
    }
    let mut rng = seeded_rng(seed);
    let m = random_hermitian(&mut rng, n);
    let d = left_mult(&m) + right_mult(&m);
    let triple = RealSpectralTriple::from_map(
        FiniteStarAlgebra::full_matrix(n),
        left_mult,
        d,
        AntiLinearOp::new_unchecked(flip_kernel(n)),
        Sign::Plus,
        Sign::Plus,
        &format!("hs:N={n},seed={seed}"),
    )
    .expect("shapes agree by construction");
    Ok(triple)
}

/// `k x k` hopping amplitudes between points.
#[derive(Debug, Clone, PartialEq)]
pub struct Hopping(pub CMatrix);

impl Hopping {
    pub fn none(k: usize) -> Self {
        Hopping(CMatrix::zeros(k, k))
    }

    /// `lambda` between every pair of distinct points.
    pub fn uniform(k: usize, lambda: f64) -> Self {
        Hopping(CMatrix::from_fn(k, k, |i, j| {
            if i == j {
                c64(0.0, 0.0)
            } else {
                c64(lambda, 0.0)
            }
        }))
    }

    fn validate(&self, k: usize) -> Result<(), ModelError> {
        if self.0.shape() != (k, k) {
            return Err(ModelError::BadHopping {
                k,
                residual: f64::INFINITY,
            });
        }
        let residual = crate::numerics::hermiticity_residual(&self.0);
        if residual > 1e-12 {
            return Err(ModelError::BadHopping { k, residual });
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.norm() == 0.0)
    }
}

/// `A = M_N + ... + M_N` (`k` blocks) on `H = M_N + ... + M_N`, blockwise
/// Hilbert-Schmidt, with `D` coupling the blocks through `hopping`.
///
/// Nonzero hopping between distinct points violates the order-one
/// condition: the `(x, y)` block of `[[D, a], b^0]` is
/// `lambda_xy (L_{a_y} - L_{a_x}) (R_{b_y} - R_{b_x})`.
pub fn build_finite_ym(
    k: usize,
    n: usize,
    hopping: &Hopping,
    seed: u64,
) -> Result<RealSpectralTriple, ModelError> {
    if k == 0 || n == 0 {
        return Err(ModelError::BadParameters(
            "k and N must be at least 1".into(),
        ));
    }
    hopping.validate(k)?;
    let mut rng = seeded_rng(seed);
    let n2 = n * n;
    let blocks: Vec<CMatrix> = (0..k)
        .map(|_| {
            let m = random_hermitian(&mut rng, n);
            left_mult(&m) + right_mult(&m)
        })
        .collect();
    let mut d = block_diag(&blocks);
    d += kron(&hopping.0, &identity(n2));
    let kernel = block_diag(&alloc::vec![flip_kernel(n); k]);
    let pi = |a: &CMatrix| {
        let parts: Vec<CMatrix> = (0..k)
            .map(|x| left_mult(&a.view((x * n, x * n), (n, n)).into_owned()))
            .collect();
        block_diag(&parts)
    };
    let label = if hopping.is_zero() {
        format!("ym:k={k},N={n},seed={seed}")
    } else {
        format!("ym:k={k},N={n},seed={seed},hop")
    };
    let triple = RealSpectralTriple::from_map(
        FiniteStarAlgebra::block_diagonal(&alloc::vec![n; k]),
        pi,
        d,
        AntiLinearOp::new_unchecked(kernel),
        Sign::Plus,
        Sign::Plus,
        &label,
    )
    .expect("shapes agree by construction");
    Ok(triple)
}

/// `A = C^k` on `C^k`, `J` = complex conjugation, `D` real.
pub fn build_commutative(
    k: usize,
    hopping: &Hopping,
    seed: u64,
) -> Result<RealSpectralTriple, ModelError> {
    let t = build_finite_ym(k, 1, hopping, seed)?;
    Ok(t)
}

/// Algebra of `Z/q`-equivariant maps `Y -> M_q`, `Y = Z/q x {1..m}`.
#[derive(Debug, Clone)]
pub struct OrbifoldAlgebra {
    pub algebra: FiniteStarAlgebra,
    pub center_dim: usize,
    pub report: Report,
}

/// Functions `f : Y -> M_q` with `f(g + 1, j) = w f(g, j) w*`, `w` the
/// second clock/shift unitary, stored block-diagonally with block `j q + g`.
pub fn build_orbifold_algebra(q: i64, p: i64, m: usize) -> Result<OrbifoldAlgebra, ModelError> {
    if m == 0 {
        return Err(ModelError::BadParameters("m must be at least 1".into()));
    }
    let (_, w) = clock_shift(q, p)?;
    let q = q as usize;
    let blocks = q * m;
    let sizes = alloc::vec![q; blocks];
    let all = FiniteStarAlgebra::block_diagonal(&sizes);
    let block = |f: &CMatrix, b: usize| f.view((b * q, b * q), (q, q)).into_owned();
    let wa = w.adjoint();
    let space = nullspace(all.space(), |f| {
        let mut parts = Vec::with_capacity(blocks);
        for j in 0..m {
            for g in 0..q {
                let here = block(f, j * q + g);
                let next = block(f, j * q + (g + 1) % q);
                parts.push(next - &w * here * &wa);
            }
        }
        stack(parts.iter())
    });
    let algebra = FiniteStarAlgebra::from_subspace(space, &format!("orbifold:q={q},p={p},m={m}"))?;
    let z = center(&algebra);

    let mut report = Report::new(algebra.label());
    report.push(Check::count(
        "orbifold-dim",
        "dim A = m q^2",
        algebra.dim(),
        m * q * q,
        Scope::RationalShadow,
    ));
    report.push(Check::count(
        "orbifold-center",
        "the center of A is C^m, functions on the orbit space",
        z.dim(),
        m,
        Scope::RationalShadow,
    ));
    report.push(Check::residual(
        "orbifold-unit",
        "the unit of A is the identity",
        crate::numerics::distance(algebra.unit(), &identity(blocks * q)),
        1e-9,
        Scope::Exact,
    ));
    report.quantity("dim", Value::Int(algebra.dim() as i64));
    report.quantity("center_dim", Value::Int(z.dim() as i64));
    Ok(OrbifoldAlgebra {
        center_dim: z.dim(),
        algebra,
        report,
    })
}

/// A model addressed by name, e.g. `hs:N=3`, `ym:k=2,N=2,seed=7`,
/// `comm:k=3`, `orbifold:q=3,p=1,m=2`.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelPreset {
    Hs {
        n: usize,
        seed: u64,
    },
    Ym {
        k: usize,
        n: usize,
        seed: u64,
        hop: f64,
    },
    Comm {
        k: usize,
        seed: u64,
        hop: f64,
    },
    Orbifold {
        q: i64,
        p: i64,
        m: usize,
    },
}

/// A built preset.
#[derive(Debug, Clone)]
pub enum Model {
    Triple(Box<RealSpectralTriple>),
    Algebra(OrbifoldAlgebra),
}

pub const DEFAULT_SEED: u64 = 1;

impl ModelPreset {
    pub fn parse(spec: &str) -> Result<Self, ModelError> {
        let fail = |reason: &str| ModelError::Parse {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let spec = spec.trim();
        let (name, rest) = match spec.split_once(':') {
            Some((n, r)) => (n.trim(), r.trim()),
            None => (spec, ""),
        };
        let mut pairs: Vec<(String, String)> = Vec::new();
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| fail(&format!("expected key=value, found `{part}`")))?;
            let key = key.trim().to_string();
            if pairs.iter().any(|(k, _)| *k == key) {
                return Err(fail(&format!("duplicate key `{key}`")));
            }
            pairs.push((key, value.trim().to_string()));
        }
        let allowed: &[&str] = match name {
            "hs" => &["N", "seed"],
            "ym" => &["k", "N", "seed", "hop"],
            "comm" => &["k", "seed", "hop"],
            "orbifold" => &["q", "p", "m"],
            _ => return Err(fail(&format!("unknown model `{name}`"))),
        };
        if let Some((k, _)) = pairs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(fail(&format!("unknown key `{k}` for `{name}`")));
        }
        let get = |key: &str| {
            pairs
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
        };
        fn num<T: core::str::FromStr>(
            raw: Option<&str>,
            default: Option<T>,
            key: &str,
            fail: &dyn Fn(&str) -> ModelError,
        ) -> Result<T, ModelError> {
            match raw {
                Some(v) => v
                    .parse()
                    .map_err(|_| fail(&format!("`{key}` has bad value `{v}`"))),
                None => default.ok_or_else(|| fail(&format!("missing `{key}`"))),
            }
        }
        let seed = num(get("seed"), Some(DEFAULT_SEED), "seed", &fail)?;
        let hop: f64 = num(get("hop"), Some(0.0), "hop", &fail)?;
        if !hop.is_finite() {
            return Err(fail("`hop` must be finite"));
        }
        let positive = |v: usize, key: &str| {
            if v == 0 {
                Err(fail(&format!("`{key}` must be at least 1")))
            } else {
                Ok(v)
            }
        };
        Ok(match name {
            "hs" => ModelPreset::Hs {
                n: positive(num(get("N"), None, "N", &fail)?, "N")?,
                seed,
            },
            "ym" => ModelPreset::Ym {
                k: positive(num(get("k"), None, "k", &fail)?, "k")?,
                n: positive(num(get("N"), None, "N", &fail)?, "N")?,
                seed,
                hop,
            },
            "comm" => ModelPreset::Comm {
                k: positive(num(get("k"), None, "k", &fail)?, "k")?,
                seed,
                hop,
            },
            _ => {
                let q: i64 = num(get("q"), None, "q", &fail)?;
                let p: i64 = num(get("p"), Some(1), "p", &fail)?;
                let m = positive(num(get("m"), Some(1), "m", &fail)?, "m")?;
                if q < 1 {
                    return Err(fail("`q` must be at least 1"));
                }
                ModelPreset::Orbifold { q, p, m }
            }
        })
    }

    /// Replaces the seed, for presets that have one.
    pub fn with_seed(self, new: u64) -> Self {
        match self {
            ModelPreset::Hs { n, .. } => ModelPreset::Hs { n, seed: new },
            ModelPreset::Ym { k, n, hop, .. } => ModelPreset::Ym {
                k,
                n,
                seed: new,
                hop,
            },
            ModelPreset::Comm { k, hop, .. } => ModelPreset::Comm { k, seed: new, hop },
            other => other,
        }
    }

    pub fn build(&self) -> Result<Model, ModelError> {
        Ok(match *self {
            ModelPreset::Hs { n, seed } => Model::Triple(Box::new(build_hs_model(n, seed)?)),
            ModelPreset::Ym { k, n, seed, hop } => Model::Triple(Box::new(build_finite_ym(
                k,
                n,
                &Hopping::uniform(k, hop),
                seed,
            )?)),
            ModelPreset::Comm { k, seed, hop } => Model::Triple(Box::new(build_commutative(
                k,
                &Hopping::uniform(k, hop),
                seed,
            )?)),
            ModelPreset::Orbifold { q, p, m } => Model::Algebra(build_orbifold_algebra(q, p, m)?),
        })
    }

    /// Builds and insists on a triple.
    pub fn build_triple(&self) -> Result<RealSpectralTriple, ModelError> {
        match self.build()? {
            Model::Triple(t) => Ok(*t),
            Model::Algebra(_) => Err(ModelError::BadParameters(format!(
                "`{self}` is an algebra without a Dirac operator"
            ))),
        }
    }
}

impl fmt::Display for ModelPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelPreset::Hs { n, seed } => write!(f, "hs:N={n},seed={seed}"),
            ModelPreset::Ym { k, n, seed, hop } => {
                write!(f, "ym:k={k},N={n},seed={seed}")?;
                if *hop != 0.0 {
                    write!(f, ",hop={hop}")?;
                }
                Ok(())
            }
            ModelPreset::Comm { k, seed, hop } => {
                write!(f, "comm:k={k},seed={seed}")?;
                if *hop != 0.0 {
                    write!(f, ",hop={hop}")?;
                }
                Ok(())
            }
            ModelPreset::Orbifold { q, p, m } => write!(f, "orbifold:q={q},p={p},m={m}"),
        }
    }
}
