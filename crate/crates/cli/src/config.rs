//! TOML triple descriptions. See `docs/triple-config.md`.

use std::path::Path;

use ncgauge::models::{flip_kernel, left_mult, right_mult, ModelPreset};
use ncgauge::numerics::{c64, AntiLinearOp, CMatrix};
use ncgauge::spectral::{RealSpectralTriple, Sign};
use ncgauge::staralg::FiniteStarAlgebra;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleConfig {
    /// A preset name; excludes every other key.
    pub model: Option<String>,
    pub label: Option<String>,
    pub epsilon: Option<i8>,
    pub epsilon_prime: Option<i8>,
    pub algebra: Option<AlgebraConfig>,
    pub representation: Option<RepresentationConfig>,
    pub dirac: Option<MatrixConfig>,
    pub real_structure: Option<MatrixConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct AlgebraConfig {
    pub kind: AlgebraKind,
    pub n: Option<usize>,
    pub blocks: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraKind {
    Full,
    Diagonal,
    Blocks,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationConfig {
    pub kind: RepresentationKind,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum RepresentationKind {
    /// `H = C^n`, `pi(a) = a`.
    Defining,
    /// `H = C^n (x) C^n`, `pi(a) = a (x) 1`.
    LeftRegular,
}

/// A matrix given by entries, by a preset name, or (Dirac only) as
/// `L_M + R_M` on the left-regular space.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct MatrixConfig {
    pub preset: Option<String>,
    pub entries: Option<Vec<Vec<Entry>>>,
    pub left_right: Option<Vec<Vec<Entry>>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

fn bad(reason: impl Into<String>) -> CliError {
    CliError::Config(reason.into())
}

fn matrix(rows: &[Vec<Entry>], what: &str) -> Result<CMatrix, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(bad(format!("{what} must be a non-empty square array")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| match rows[i][j] {
        Entry::Real(re) => c64(re, 0.0),
        Entry::Complex([re, im]) => c64(re, im),
    }))
}

fn sign(v: Option<i8>, key: &str) -> Result<Sign, CliError> {
    match v.unwrap_or(1) {
        1 => Ok(Sign::Plus),
        -1 => Ok(Sign::Minus),
        other => Err(bad(format!("`{key}` must be 1 or -1, found {other}"))),
    }
}

/// Either a preset or an explicit triple.
pub enum Described {
    Preset(ModelPreset),
    Triple(Box<RealSpectralTriple>),
}

pub fn load(path: &Path) -> Result<Described, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Described, CliError> {
    let cfg: TripleConfig = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
    if let Some(spec) = &cfg.model {
        let others = cfg.algebra.is_some()
            || cfg.representation.is_some()
            || cfg.dirac.is_some()
            || cfg.real_structure.is_some()
            || cfg.epsilon.is_some()
            || cfg.epsilon_prime.is_some();
        if others {
            return Err(bad("`model` cannot be combined with an explicit triple"));
        }
        return Ok(Described::Preset(ModelPreset::parse(spec)?));
    }
    build(&cfg).map(|t| Described::Triple(Box::new(t)))
}

fn build(cfg: &TripleConfig) -> Result<RealSpectralTriple, CliError> {
    let alg = cfg
        .algebra
        .as_ref()
        .ok_or_else(|| bad("missing [algebra]"))?;
    let algebra = match alg.kind {
        AlgebraKind::Full | AlgebraKind::Diagonal => {
            let n = alg
                .n
                .filter(|&n| n > 0)
                .ok_or_else(|| bad("[algebra] needs n >= 1"))?;
            if alg.kind == AlgebraKind::Full {
                FiniteStarAlgebra::full_matrix(n)
            } else {
                FiniteStarAlgebra::diagonal(n)
            }
        }
        AlgebraKind::Blocks => {
            let blocks = alg
                .blocks
                .as_ref()
                .filter(|b| !b.is_empty() && b.iter().all(|&s| s > 0))
                .ok_or_else(|| {
                    bad("[algebra] kind = \"blocks\" needs non-empty positive `blocks`")
                })?;
            FiniteStarAlgebra::block_diagonal(blocks)
        }
    };
    let n = algebra.ambient();
    let rep_kind = cfg
        .representation
        .as_ref()
        .map_or(RepresentationKind::Defining, |r| r.kind);
    let h = match rep_kind {
        RepresentationKind::Defining => n,
        RepresentationKind::LeftRegular => n * n,
    };

    let d_cfg = cfg.dirac.as_ref().ok_or_else(|| bad("missing [dirac]"))?;
    let dirac = match (&d_cfg.preset, &d_cfg.entries, &d_cfg.left_right) {
        (Some(p), None, None) if p == "zero" => CMatrix::zeros(h, h),
        (Some(p), None, None) => return Err(bad(format!("unknown Dirac preset `{p}`"))),
        (None, Some(e), None) => matrix(e, "[dirac] entries")?,
        (None, None, Some(m)) => {
            if rep_kind != RepresentationKind::LeftRegular {
                return Err(bad(
                    "[dirac] left-right needs the left-regular representation",
                ));
            }
            let m = matrix(m, "[dirac] left-right")?;
            left_mult(&m) + right_mult(&m)
        }
        _ => {
            return Err(bad(
                "[dirac] needs exactly one of preset, entries, left-right",
            ))
        }
    };

    let j_cfg = cfg
        .real_structure
        .as_ref()
        .ok_or_else(|| bad("missing [real_structure]"))?;
    if j_cfg.left_right.is_some() {
        return Err(bad("[real_structure] does not take left-right"));
    }
    let kernel = match (&j_cfg.preset, &j_cfg.entries) {
        (Some(p), None) if p == "conjugation" => CMatrix::identity(h, h),
        (Some(p), None) if p == "swap" => {
            if rep_kind != RepresentationKind::LeftRegular {
                return Err(bad(
                    "the swap real structure needs the left-regular representation",
                ));
            }
            flip_kernel(n)
        }
        (Some(p), None) => return Err(bad(format!("unknown real-structure preset `{p}`"))),
        (None, Some(e)) => matrix(e, "[real_structure] entries")?,
        _ => return Err(bad("[real_structure] needs exactly one of preset, entries")),
    };
    let j = AntiLinearOp::new(kernel).map_err(|e| bad(format!("[real_structure]: {e}")))?;

    let label = cfg.label.clone().unwrap_or_else(|| "config".into());
    let eps = sign(cfg.epsilon, "epsilon")?;
    let eps_prime = sign(cfg.epsilon_prime, "epsilon_prime")?;
    let triple = match rep_kind {
        RepresentationKind::Defining => {
            RealSpectralTriple::from_map(algebra, |a| a.clone(), dirac, j, eps, eps_prime, &label)
        }
        RepresentationKind::LeftRegular => {
            RealSpectralTriple::from_map(algebra, left_mult, dirac, j, eps, eps_prime, &label)
        }
    };
    triple.map_err(|e| bad(format!("inconsistent triple: {e}")))
}
