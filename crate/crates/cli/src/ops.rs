//! One function per check, shared by the single-shot subcommands and the
//! batch runner. Every function takes already-loaded inputs and returns a
//! [`Report`]; input loading and flag handling stay in the callers.

use cylmp::fractions::{bound_certificate, parse_frac, BoundCertificate};
use cylmp::gaussian::{
    classify_sigma_additivity, fourier, wick_moment, wick_moment_enumeration, CovarianceSpec,
    GaussianMeasure,
};
use cylmp::measures::{
    check_axioms, check_consistency, chebyshev_bound, BoxRegion, ConsistencyReport, Estimate,
    IndexSet, MomentValue,
};
use cylmp::moments::{
    carleman_report, eval_functional, moment_matrix, psd_check, quadrature_1d, CarlemanVerdict,
    MomentFunctional, MomentTable,
};
use cylmp::poly::{parse_monomial, parse_poly};
use cylmp::rat::{format_rational, rational_to_f64};
use cylmp::{Monomial, VarIndex};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::report::{CliError, Report};

/// Source of the moment functional a check runs against.
pub enum Backend {
    Gaussian(CovarianceSpec),
    Table(MomentTable),
}

impl Backend {
    pub fn label(&self) -> &'static str {
        match self {
            Backend::Gaussian(_) => "gaussian",
            Backend::Table(_) => "table",
        }
    }

    pub fn functional(&self) -> MomentFunctional {
        match self {
            Backend::Gaussian(spec) => MomentFunctional::gaussian(spec.clone()),
            Backend::Table(table) => MomentFunctional::table(table.clone()),
        }
    }
}

/// Variable flags are 1-based; 0 is rejected here rather than at the type
/// boundary so the caller gets a reportable error instead of a panic.
pub fn var_index(k: u32) -> Result<VarIndex, CliError> {
    if k == 0 {
        return Err(CliError::Usage(
            "variable indices are 1-based; got 0".into(),
        ));
    }
    Ok(VarIndex::new(k))
}

pub fn index_set(raw: &[u32]) -> Result<IndexSet, CliError> {
    Ok(IndexSet::from_indices(raw.iter().copied())?)
}

fn moment_value_json(v: &MomentValue) -> Value {
    match v {
        MomentValue::Exact(q) => Value::String(format_rational(q)),
        MomentValue::Real(x) => json!(x),
    }
}

fn estimate_json(e: &Estimate) -> Value {
    if e.is_exact() {
        json!({"exact": true, "value": e.value})
    } else {
        json!({"stderr": e.stderr(), "value": e.value})
    }
}

fn consistency_rows_json(report: &ConsistencyReport) -> Value {
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|row| {
            json!({
                "monomial": row.monomial.to_string(),
                "lhs": moment_value_json(&row.lhs),
                "rhs": moment_value_json(&row.rhs),
                "residual": row.residual,
                "exact_zero": row.exact_zero,
            })
        })
        .collect();
    Value::Array(rows)
}

/// `eval`: apply the moment functional to a polynomial.
pub fn eval_check(backend: &Backend, poly_text: &str) -> Result<Report, CliError> {
    let poly = parse_poly(poly_text)?;
    let value = eval_functional(&backend.functional(), &poly)?;
    Ok(Report::done(
        "eval",
        json!({"backend": backend.label(), "poly": poly_text}),
        0,
        json!({"value": format_rational(&value)}),
        true,
        vec![],
    ))
}

/// `wick`: one Gaussian monomial moment along both routes, which must
/// agree exactly.
pub fn wick_check(spec: &CovarianceSpec, monomial_text: &str) -> Result<Report, CliError> {
    let alpha = parse_monomial(monomial_text)?;
    let (recursive, enumerated) = if alpha.is_unit() {
        let one = BigRational::from_integer(1.into());
        (one.clone(), one)
    } else {
        let f = IndexSet::new(alpha.vars())?;
        let cov = spec.submatrix(&f)?;
        (
            wick_moment(&cov, &alpha)?,
            wick_moment_enumeration(&cov, &alpha)?,
        )
    };
    let pass = recursive == enumerated;
    let residual = rational_to_f64(&(&recursive - &enumerated));
    Ok(Report::done(
        "wick",
        json!({"monomial": alpha.to_string()}),
        0,
        json!({
            "enumeration": format_rational(&enumerated),
            "recursive": format_rational(&recursive),
        }),
        pass,
        vec![residual.abs()],
    ))
}

/// `carleman`: moment-growth divergence diagnostics for one variable.
/// Passes when the divergence certificate holds.
pub fn carleman_check(backend: &Backend, var: u32, horizon: u32) -> Result<Report, CliError> {
    let t = var_index(var)?;
    let report = carleman_report(&backend.functional(), t, horizon)?;
    let pass = matches!(report.verdict, CarlemanVerdict::Diverges { .. });
    Ok(Report::done(
        "carleman",
        json!({"backend": backend.label(), "horizon": horizon, "var": var}),
        0,
        report.to_json(),
        pass,
        vec![],
    ))
}

/// `classify`: sigma-additivity verdict from the covariance tail.
pub fn classify_check(spec: &CovarianceSpec) -> Result<Report, CliError> {
    let verdict = classify_sigma_additivity(spec);
    Ok(Report::done(
        "classify",
        json!({}),
        0,
        json!({
            "justification": verdict.justification(),
            "verdict": verdict.kind(),
        }),
        true,
        vec![],
    ))
}

/// `consistency`: marginal moments on `f` computed directly and through
/// the superset `g` must agree.
pub fn consistency_check(
    spec: &CovarianceSpec,
    f_raw: &[u32],
    g_raw: &[u32],
    degree: u64,
) -> Result<Report, CliError> {
    let f = index_set(f_raw)?;
    let g = index_set(g_raw)?;
    let mu = GaussianMeasure::new(spec.clone())?;
    let report = check_consistency(&mu, &f, &g, degree)?;
    let residuals: Vec<f64> = report.rows.iter().map(|row| row.residual).collect();
    let pass = report.pass;
    Ok(Report::done(
        "consistency",
        json!({"degree": degree, "indices": f.to_string(), "superset": g.to_string()}),
        0,
        json!({
            "max_residual": report.max_residual,
            "rows": consistency_rows_json(&report),
        }),
        pass,
        residuals,
    ))
}

/// `axioms`: box-partition additivity for the marginal on `f`. The boxes
/// document is `{"cells": [box, ...], "whole": box}` with `whole`
/// defaulting to the full space; each box is an array of intervals.
pub fn axioms_check(
    spec: &CovarianceSpec,
    f_raw: &[u32],
    boxes: &Value,
    seed: u64,
) -> Result<Report, CliError> {
    let f = index_set(f_raw)?;
    let obj = boxes
        .as_object()
        .ok_or_else(|| CliError::Usage("boxes document must be a JSON object".into()))?;
    let cell_values = obj
        .get("cells")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Usage("boxes document needs a \"cells\" array".into()))?;
    let cells: Vec<BoxRegion> = cell_values
        .iter()
        .map(BoxRegion::from_json)
        .collect::<Result<_, _>>()?;
    let whole = match obj.get("whole") {
        Some(v) => BoxRegion::from_json(v)?,
        None => BoxRegion::full(f.len()),
    };
    let mu = GaussianMeasure::new(spec.clone())?;
    let report = check_axioms(&mu, &f, &cells, &whole, seed)?;
    let pass = report.pass;
    Ok(Report::done(
        "axioms",
        json!({"cells": cells.len(), "indices": f.to_string()}),
        seed,
        json!({
            "residual": report.residual,
            "tolerance": report.tolerance,
            "total": estimate_json(&report.total),
            "whole": estimate_json(&report.whole),
        }),
        pass,
        vec![report.residual],
    ))
}

/// `hankel`: moment matrix on `f` up to `degree`, plus an exact positive
/// semidefiniteness certificate.
pub fn hankel_check(backend: &Backend, f_raw: &[u32], degree: u64) -> Result<Report, CliError> {
    let f = index_set(f_raw)?;
    let matrix = moment_matrix(&backend.functional(), &f, degree)?;
    let verdict = psd_check(&matrix);
    let basis: Vec<String> = matrix.basis().iter().map(Monomial::to_string).collect();
    let entries: Vec<Vec<String>> = matrix
        .entries()
        .iter()
        .map(|row| row.iter().map(format_rational).collect())
        .collect();
    let pass = verdict.is_psd();
    Ok(Report::done(
        "hankel",
        json!({"backend": backend.label(), "degree": degree, "indices": f.to_string()}),
        0,
        json!({"basis": basis, "matrix": entries, "verdict": verdict.to_json()}),
        pass,
        vec![],
    ))
}

/// `quad`: recover an `n`-atom measure on one variable from the moments
/// of degree < 2n, then report the reconstruction residuals.
pub fn quad_check(backend: &Backend, var: u32, atoms: usize) -> Result<Report, CliError> {
    if atoms == 0 {
        return Err(CliError::Usage("quad needs at least one atom".into()));
    }
    let t = var_index(var)?;
    let l = backend.functional();
    let moments: Vec<BigRational> = (0..2 * atoms)
        .map(|j| l.moment(&Monomial::var_pow(t, j as u32)))
        .collect::<Result<_, _>>()?;
    let nu = quadrature_1d(&moments, atoms)?;
    let residuals: Vec<f64> = (0..2 * atoms)
        .map(|j| (nu.moment_power(j as u32) - rational_to_f64(&moments[j])).abs())
        .collect();
    let nodes: Vec<f64> = nu.atoms().iter().map(|&(x, _)| x).collect();
    let weights: Vec<f64> = nu.atoms().iter().map(|&(_, w)| w).collect();
    let pass = residuals.iter().all(|r| *r <= 1e-9);
    Ok(Report::done(
        "quad",
        json!({"backend": backend.label(), "degree": atoms, "var": var}),
        0,
        json!({"nodes": nodes, "weights": weights}),
        pass,
        residuals,
    ))
}

/// `fourier`: characteristic function of the Gaussian measure at the
/// linear form given as a polynomial.
pub fn fourier_check(spec: &CovarianceSpec, poly_text: &str) -> Result<Report, CliError> {
    let t = parse_poly(poly_text)?;
    let y = cylmp::measures::linear_coefficients(&t)?;
    let value = fourier(spec, &y);
    Ok(Report::done(
        "fourier",
        json!({"poly": poly_text}),
        0,
        json!({"value": value}),
        true,
        vec![],
    ))
}

/// `chebyshev`: exact tail bound `L(t^2)/a^2` for a degree-1 polynomial.
pub fn chebyshev_check(
    backend: &Backend,
    poly_text: &str,
    threshold: &BigRational,
) -> Result<Report, CliError> {
    let t = parse_poly(poly_text)?;
    let bound = chebyshev_bound(&backend.functional(), &t, threshold)?;
    Ok(Report::done(
        "chebyshev",
        json!({
            "backend": backend.label(),
            "poly": poly_text,
            "threshold": format_rational(threshold),
        }),
        0,
        json!({"bound": format_rational(&bound)}),
        true,
        vec![],
    ))
}

/// `frac`: canonicalize a fraction-algebra element and certify a sup
/// bound over all real characters, or flag it unbounded.
pub fn frac_check(frac_text: &str) -> Result<Report, CliError> {
    let u = parse_frac(frac_text)?;
    let certificate = match bound_certificate(&u) {
        BoundCertificate::Bounded(bound) => json!({"bounded": format_rational(&bound)}),
        BoundCertificate::Unbounded { var } => {
            json!({"unbounded_in": format!("x{}", var.get())})
        }
    };
    Ok(Report::done(
        "frac",
        json!({"input": frac_text}),
        0,
        json!({"canonical": u.to_string(), "certificate": certificate}),
        true,
        vec![],
    ))
}
