use std::path::Path;

use ncgauge::gauge::{
    doubled_fluctuation, fluctuate as fluctuate_dirac, gauge_field, gauge_lie_algebra,
    gauge_transform_field, pure_gauge_residuals, Perturbation,
};
use ncgauge::localize::{
    group_bundle_dims, localize as localize_triple, localize_algebra, omega_bundle,
    section_map_report,
};
use ncgauge::models::{Model, ModelPreset, OrbifoldAlgebra, DEFAULT_SEED};
use ncgauge::nctorus::{parse_sphere, PhaseMode};
use ncgauge::numerics::{distance, hermiticity_residual, CMatrix};
use ncgauge::report::{Check, Report, Scope, Value};
use ncgauge::spectral::{OneForm, RealSpectralTriple};
use ncgauge::staralg::{center, random_unitary};
use ncgauge::toric::{norm_profile, strata_report, Sphere};

use crate::config::{self, Described};
use crate::document::{Document, FiberRow, ProfileRecord};
use crate::{CliError, Output, Settings, SphereArg, Table};

/// Random draws per sampled check in `localize`.
const SAMPLES: usize = 20;

enum Subject {
    Triple(Box<RealSpectralTriple>),
    Algebra(OrbifoldAlgebra),
}

struct Resolved {
    subject: Subject,
    descriptor: String,
    seed: Option<u64>,
}

fn computation<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Computation(e.to_string())
}

fn looks_like_file(spec: &str) -> bool {
    spec.ends_with(".toml") || Path::new(spec).is_file()
}

fn resolve(spec: &str, s: &Settings) -> Result<Resolved, CliError> {
    let preset = if looks_like_file(spec) {
        match config::load(Path::new(spec))? {
            Described::Preset(p) => p,
            Described::Triple(t) => {
                let descriptor = format!("{spec} ({})", t.label());
                return Ok(Resolved {
                    subject: Subject::Triple(t),
                    descriptor,
                    seed: s.seed,
                });
            }
        }
    } else {
        ModelPreset::parse(spec)?
    };
    let preset = match s.seed {
        Some(seed) => preset.with_seed(seed),
        None => preset,
    };
    let seed = match preset {
        ModelPreset::Hs { seed, .. }
        | ModelPreset::Ym { seed, .. }
        | ModelPreset::Comm { seed, .. } => Some(seed),
        ModelPreset::Orbifold { .. } => None,
    };
    let subject = match preset.build()? {
        Model::Triple(t) => Subject::Triple(t),
        Model::Algebra(a) => Subject::Algebra(a),
    };
    Ok(Resolved {
        subject,
        descriptor: preset.to_string(),
        seed,
    })
}

pub fn check(spec: &str, s: &Settings) -> Result<Output, CliError> {
    let r = resolve(spec, s)?;
    let reports = match &r.subject {
        Subject::Triple(t) => {
            let gauge = gauge_lie_algebra(t, &s.tol).map_err(computation)?;
            vec![
                t.check_axioms(&s.tol),
                t.verify_aj_properties(&s.tol),
                gauge.report,
            ]
        }
        Subject::Algebra(o) => vec![o.report.clone()],
    };
    Ok(Output {
        document: Document::new("check", r.descriptor, r.seed, s, reports),
        table: None,
    })
}

pub fn localize(spec: &str, s: &Settings) -> Result<Output, CliError> {
    let r = resolve(spec, s)?;
    let seed = r.seed.unwrap_or(DEFAULT_SEED);
    let (reports, fibers) = match &r.subject {
        Subject::Triple(t) => {
            let dec = localize_triple(t).map_err(computation)?;
            let sections = section_map_report(&dec, t, SAMPLES, seed, &s.tol);
            let groups = group_bundle_dims(&dec, t, &s.tol).map_err(computation)?;
            let omega = omega_bundle(&dec, t, SAMPLES / 2, seed, &s.tol);
            let fibers = dec
                .base
                .labels
                .iter()
                .enumerate()
                .map(|(i, label)| FiberRow {
                    point: label.clone(),
                    dim: dec.fibers[i].dim(),
                    gauge_dim: groups.gauge_dims[i],
                    omega_dim: Some(omega.fibers[i].space.dim()),
                })
                .collect();
            (vec![sections, groups.report, omega.report], fibers)
        }
        Subject::Algebra(o) => {
            let z = center(&o.algebra);
            let dec = localize_algebra(&o.algebra, &z).map_err(computation)?;
            let mut report = Report::new(&format!("localization of {}", o.algebra.label()));
            let dims = dec.fiber_dims();
            report.push(Check::count(
                "fiber-dims-sum",
                "sum over points of dim B_x = dim A",
                dims.iter().sum(),
                o.algebra.dim(),
                Scope::FiniteShadow,
            ));
            report.push(Check::count(
                "points",
                "points of the base = dimension of the center",
                dec.len(),
                o.center_dim,
                Scope::FiniteShadow,
            ));
            report.push(Check::residual(
                "points-partition-unity",
                "sum of p_x = 1",
                dec.base.residual(o.algebra.unit()),
                s.tol.structural,
                Scope::Exact,
            ));
            let fibers = dec
                .base
                .labels
                .iter()
                .zip(&dims)
                .map(|(label, &dim)| FiberRow {
                    point: label.clone(),
                    dim,
                    gauge_dim: dim - 1,
                    omega_dim: None,
                })
                .collect();
            (vec![report], fibers)
        }
    };
    let mut document = Document::new("localize", r.descriptor, r.seed, s, reports);
    document.fibers = fibers;
    let table = fiber_table(&document.fibers);
    Ok(Output {
        document,
        table: Some(table),
    })
}

fn fiber_table(rows: &[FiberRow]) -> Table {
    Table {
        header: ["point", "dim", "gauge_dim", "omega_dim"]
            .map(String::from)
            .to_vec(),
        rows: rows
            .iter()
            .map(|f| {
                vec![
                    f.point.clone(),
                    f.dim.to_string(),
                    f.gauge_dim.to_string(),
                    f.omega_dim.map_or(String::new(), |d| d.to_string()),
                ]
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PerturbationSpec {
    Zero,
    Pure(Option<u64>),
    Random(Option<u64>),
}

fn parse_perturbation(spec: &str) -> Result<PerturbationSpec, CliError> {
    let bad = || {
        CliError::Argument(format!(
            "perturbation must be zero, pure[:seed=S] or random[:seed=S], got `{spec}`"
        ))
    };
    let (name, rest) = spec.trim().split_once(':').unwrap_or((spec.trim(), ""));
    let seed = match rest.trim() {
        "" => None,
        r => {
            let value = r.strip_prefix("seed=").ok_or_else(bad)?;
            Some(value.trim().parse().map_err(|_| bad())?)
        }
    };
    match (name, seed) {
        ("zero", None) => Ok(PerturbationSpec::Zero),
        ("pure", seed) => Ok(PerturbationSpec::Pure(seed)),
        ("random", seed) => Ok(PerturbationSpec::Random(seed)),
        _ => Err(bad()),
    }
}

pub fn fluctuate(spec: &str, perturbation: &str, s: &Settings) -> Result<Output, CliError> {
    let kind = parse_perturbation(perturbation)?;
    let r = resolve(spec, s)?;
    let Subject::Triple(t) = &r.subject else {
        return Err(CliError::Argument(format!(
            "`{}` has no Dirac operator to fluctuate",
            r.descriptor
        )));
    };
    let base_seed = s.seed.or(r.seed).unwrap_or(DEFAULT_SEED);
    let tol = &s.tol;
    let mut report = Report::new(&format!("fluctuation {perturbation} of {}", t.label()));
    let used_seed = match kind {
        PerturbationSpec::Zero => {
            let n = t.hilbert_dim();
            let d = fluctuate_dirac(t, &CMatrix::zeros(n, n), tol).map_err(computation)?;
            report.push(Check::residual(
                "zero-fluctuation",
                "D_0 = D",
                distance(&d, t.dirac()),
                tol.construction,
                Scope::Exact,
            ));
            let omega = gauge_field(t, &Perturbation::identity(t), tol).map_err(computation)?;
            report.push(Check::residual(
                "identity-perturbation",
                "the unit of Pert(A) gives the zero one-form",
                ncgauge::numerics::frobenius(&omega.evaluated),
                tol.construction,
                Scope::Exact,
            ));
            None
        }
        PerturbationSpec::Pure(seed) => {
            let seed = seed.unwrap_or(base_seed);
            let u = random_unitary(t.algebra(), seed);
            let (pure, doubled) = pure_gauge_residuals(t, &u, tol).map_err(computation)?;
            report.push(Check::residual(
                "pure-gauge",
                "D_{u[D,u*]} = U D U* with U = u J u J^{-1}",
                pure,
                tol.derived,
                Scope::Exact,
            ));
            report.push(Check::residual(
                "doubled-pure-gauge",
                "the doubled action of u (x) u* agrees with D_{u[D,u*]}",
                doubled,
                tol.derived,
                Scope::Exact,
            ));
            Some(seed)
        }
        PerturbationSpec::Random(seed) => {
            let seed = seed.unwrap_or(base_seed);
            let p = Perturbation::random(t, seed);
            report.push(Check::residual(
                "perturbation-membership",
                "the perturbation is normalized and self-adjoint in A (x) A^op",
                p.relative_certificate(t),
                tol.derived,
                Scope::Exact,
            ));
            let omega = gauge_field(t, &p, tol).map_err(computation)?;
            report.push(Check::residual(
                "one-form-membership",
                "sum a_j [D, b_j] lies in the one-forms",
                omega.membership_residual(t),
                tol.derived,
                Scope::Exact,
            ));
            let d_omega = fluctuate_dirac(t, &omega.evaluated, tol).map_err(computation)?;
            report.push(Check::residual(
                "fluctuation-self-adjoint",
                "D_omega is self-adjoint",
                hermiticity_residual(&d_omega),
                tol.derived,
                Scope::Exact,
            ));
            let eps = t.epsilon_prime().value();
            report.push(Check::residual(
                "fluctuation-j-dirac",
                "J D_omega = eps' D_omega J",
                distance(
                    &t.conjugate_by_j(&d_omega),
                    &(&d_omega * ncgauge::numerics::c64(eps, 0.0)),
                ),
                tol.derived,
                Scope::Exact,
            ));
            report.push(Check::residual(
                "doubled-fluctuation",
                "the doubled action of the perturbation gives D_omega",
                distance(&doubled_fluctuation(t, &p), &d_omega),
                tol.derived,
                Scope::Exact,
            ));
            let u = random_unitary(t.algebra(), seed.wrapping_add(1));
            let moved = gauge_transform_field(t, &omega, &OneForm::zero(t), &u, tol)
                .map_err(computation)?;
            report.push(Check::residual(
                "gauge-covariance",
                "transformed fields give U D_omega U*",
                moved.covariance_residual,
                tol.derived,
                Scope::Exact,
            ));
            report.quantity(
                "fluctuation_norm",
                Value::Real(ncgauge::numerics::op_norm(&(&d_omega - t.dirac()))),
            );
            Some(seed)
        }
    };
    let seed = used_seed.or(r.seed);
    Ok(Output {
        document: Document::new("fluctuate", r.descriptor, seed, s, vec![report]),
        table: None,
    })
}

pub fn toric_scan(
    sphere: SphereArg,
    p: i64,
    q: i64,
    h: f64,
    poly: &str,
    s: &Settings,
) -> Result<Output, CliError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(CliError::Argument(format!(
            "grid step must be positive, got {h}"
        )));
    }
    let mode = PhaseMode::rational(p, q).map_err(|e| CliError::Argument(e.to_string()))?;
    let e = parse_sphere(poly, mode)?;
    let (which, name) = match sphere {
        SphereArg::S3 => (Sphere::S3, "s3"),
        SphereArg::S4 => (Sphere::S4, "s4"),
    };
    if which == Sphere::S3 && e.uses_x() {
        return Err(CliError::Argument(
            "`x` is not a generator of the three-sphere".into(),
        ));
    }
    let profile = norm_profile(&e, which, h).map_err(computation)?;
    let strata = strata_report(which, p, q).map_err(computation)?;

    let mut report = Report::new(&format!(
        "norm profile of {poly} on {name} at p/q = {p}/{q}"
    ));
    let mismatches = profile
        .rows
        .iter()
        .filter(|r| r.fiber_dim != r.stratum.expected_dim(q))
        .count();
    report.push(Check::count(
        "fiber-dims-match-strata",
        "every grid point's fiber dimension matches its stratum",
        mismatches,
        0,
        Scope::RationalShadow,
    ));
    if profile.jump < 1e-12 {
        report.push(Check::flag(
            "continuity",
            "the norm profile is constant",
            true,
            Scope::ContinuityEvidence,
        ));
    } else {
        report.push(Check::residual(
            "continuity",
            "largest neighbour jump halves with the grid step (ratio within 0.2 of 1/2)",
            (profile.ratio() - 0.5).abs(),
            0.2,
            Scope::ContinuityEvidence,
        ));
    }
    report.quantity("h", Value::Real(h));
    report.quantity("rows", Value::Int(profile.rows.len() as i64));
    report.quantity("jump", Value::Real(profile.jump));
    report.quantity("jump_half", Value::Real(profile.jump_half));
    report.quantity("ratio", Value::Real(profile.ratio()));

    let records: Vec<ProfileRecord> = profile
        .rows
        .iter()
        .map(|r| ProfileRecord {
            chi: r.chi,
            psi: r.psi,
            r: r.r,
            s: r.s,
            x: r.x,
            norm: r.norm,
            stratum: r.stratum.to_string(),
            fiber_dim: r.fiber_dim,
        })
        .collect();
    let mut header: Vec<String> = vec!["chi".into()];
    if which == Sphere::S4 {
        header.push("psi".into());
    }
    header.extend(["r", "s", "x", "norm", "stratum", "fiber_dim"].map(String::from));
    let rows = records
        .iter()
        .map(|r| {
            let mut row = vec![number(r.chi)];
            if let Some(psi) = r.psi {
                row.push(number(psi));
            }
            row.extend([
                number(r.r),
                number(r.s),
                number(r.x),
                number(r.norm),
                r.stratum.clone(),
                r.fiber_dim.to_string(),
            ]);
            row
        })
        .collect();

    let descriptor = format!("{name}:p={p},q={q},h={h},poly={poly}");
    let mut document = Document::new("toric-scan", descriptor, None, s, vec![strata, report]);
    document.profile = records;
    Ok(Output {
        document,
        table: Some(Table { header, rows }),
    })
}

/// Plain decimals, switching to exponent form for tiny magnitudes.
fn number(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-4 {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perturbation_specs() {
        assert_eq!(parse_perturbation("zero").unwrap(), PerturbationSpec::Zero);
        assert_eq!(
            parse_perturbation("pure").unwrap(),
            PerturbationSpec::Pure(None)
        );
        assert_eq!(
            parse_perturbation("pure:seed=4").unwrap(),
            PerturbationSpec::Pure(Some(4))
        );
        assert_eq!(
            parse_perturbation(" random:seed=9 ").unwrap(),
            PerturbationSpec::Random(Some(9))
        );
        for bad in ["zero:seed=1", "pure:4", "random:seed=x", "wiggle", ""] {
            assert!(parse_perturbation(bad).is_err(), "{bad}");
        }
    }
}
