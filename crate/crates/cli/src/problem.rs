//! Problem files: one JSON document declaring backends, named
//! polynomials, and a list of check descriptors to run as a batch.
//!
//! Layout:
//!
//! ```json
//! {
//!   "covariance": { ... },
//!   "moment_table": { ... },
//!   "polynomials": {"t": "x1 + 2*x2"},
//!   "checks": [
//!     {"check": "eval", "poly": "t"},
//!     {"check": "axioms", "indices": [1], "boxes": {...}, "seed": 7}
//!   ]
//! }
//! ```
//!
//! Both backends are optional, but every functional-dependent check must
//! resolve to exactly one: when both are declared, the descriptor picks
//! with `"backend": "covariance" | "moment_table"`. Gaussian-only checks
//! (`wick`, `classify`, `consistency`, `axioms`, `fourier`) always use the
//! covariance spec. Monte Carlo checks must carry an explicit `"seed"`.
//! A `"poly"` value naming an entry of `polynomials` is replaced by that
//! entry; anything else is parsed as inline text.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Mutex;
use std::thread;

use cylmp::gaussian::CovarianceSpec;
use cylmp::moments::MomentTable;
use cylmp::rat::parse_rational;
use num_rational::BigRational;
use serde_json::{Map, Value};

use crate::ops::{self, Backend};
use crate::report::{CliError, Report};

/// Parsed problem file: backends and polynomial names are resolved once,
/// descriptors are kept as JSON until each check runs.
pub struct Context {
    spec: Option<CovarianceSpec>,
    table: Option<MomentTable>,
    polynomials: BTreeMap<String, String>,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

pub fn load_problem(text: &str, path: &str) -> Result<(Context, Vec<Value>), CliError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Json {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    let obj = doc
        .as_object()
        .ok_or_else(|| usage("problem file must be a JSON object"))?;
    let spec = obj
        .get("covariance")
        .map(CovarianceSpec::from_json)
        .transpose()?;
    let table = obj
        .get("moment_table")
        .map(MomentTable::from_json)
        .transpose()?;
    let mut polynomials = BTreeMap::new();
    if let Some(value) = obj.get("polynomials") {
        let entries = value
            .as_object()
            .ok_or_else(|| usage("\"polynomials\" must be an object of strings"))?;
        for (name, text) in entries {
            let text = text
                .as_str()
                .ok_or_else(|| usage(format!("polynomial {name:?} must be a string")))?;
            polynomials.insert(name.clone(), text.to_string());
        }
    }
    let checks = obj
        .get("checks")
        .and_then(Value::as_array)
        .ok_or_else(|| usage("problem file needs a \"checks\" array"))?;
    if checks.is_empty() {
        return Err(usage("problem file declares no checks"));
    }
    Ok((
        Context {
            spec,
            table,
            polynomials,
        },
        checks.clone(),
    ))
}

impl Context {
    fn backend(&self, obj: &Map<String, Value>) -> Result<Backend, CliError> {
        match obj.get("backend").and_then(Value::as_str) {
            Some("covariance") => self
                .spec
                .clone()
                .map(Backend::Gaussian)
                .ok_or_else(|| usage("problem file has no \"covariance\" backend")),
            Some("moment_table") => self
                .table
                .clone()
                .map(Backend::Table)
                .ok_or_else(|| usage("problem file has no \"moment_table\" backend")),
            Some(other) => Err(usage(format!(
                "unknown backend {other:?}; use \"covariance\" or \"moment_table\""
            ))),
            None => match (&self.spec, &self.table) {
                (Some(spec), None) => Ok(Backend::Gaussian(spec.clone())),
                (None, Some(table)) => Ok(Backend::Table(table.clone())),
                (Some(_), Some(_)) => Err(usage(
                    "both backends are declared; the check must pick one with \"backend\"",
                )),
                (None, None) => Err(usage("problem file declares no backend")),
            },
        }
    }

    fn gaussian(&self) -> Result<&CovarianceSpec, CliError> {
        self.spec
            .as_ref()
            .ok_or_else(|| usage("this check needs a \"covariance\" backend"))
    }

    /// Resolves a polynomial reference: a declared name wins, anything
    /// else is inline text.
    fn poly_text<'a>(&'a self, obj: &'a Map<String, Value>, key: &str) -> Result<&'a str, CliError> {
        let raw = str_field(obj, key)?;
        Ok(self
            .polynomials
            .get(raw)
            .map(String::as_str)
            .unwrap_or(raw))
    }
}

fn str_field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a str, CliError> {
    obj.get(name)
        .and_then(Value::as_str)
        .ok_or_else(|| usage(format!("check needs a string field {name:?}")))
}

fn u64_field(obj: &Map<String, Value>, name: &str) -> Result<u64, CliError> {
    obj.get(name)
        .and_then(Value::as_u64)
        .ok_or_else(|| usage(format!("check needs a nonnegative integer field {name:?}")))
}

fn u32_field(obj: &Map<String, Value>, name: &str) -> Result<u32, CliError> {
    u32::try_from(u64_field(obj, name)?)
        .map_err(|_| usage(format!("field {name:?} is out of range")))
}

fn u64_field_or(obj: &Map<String, Value>, name: &str, default: u64) -> Result<u64, CliError> {
    match obj.get(name) {
        None => Ok(default),
        Some(_) => u64_field(obj, name),
    }
}

fn indices_field(obj: &Map<String, Value>, name: &str) -> Result<Vec<u32>, CliError> {
    let items = obj
        .get(name)
        .and_then(Value::as_array)
        .ok_or_else(|| usage(format!("check needs an index array field {name:?}")))?;
    items
        .iter()
        .map(|v| {
            v.as_u64()
                .and_then(|k| u32::try_from(k).ok())
                .ok_or_else(|| usage(format!("field {name:?} must hold 1-based indices")))
        })
        .collect()
}

/// Thresholds are exact rationals: a `"p/q"` string or a plain integer.
fn threshold_field(obj: &Map<String, Value>) -> Result<BigRational, CliError> {
    match obj.get("threshold") {
        Some(Value::String(text)) => Ok(parse_rational(text)?),
        Some(value) if value.as_i64().is_some() => {
            Ok(BigRational::from_integer(value.as_i64().expect("checked").into()))
        }
        Some(_) => Err(usage(
            "field \"threshold\" must be a \"p/q\" string or an integer",
        )),
        None => Err(usage("check needs a field \"threshold\"")),
    }
}

fn dispatch(ctx: &Context, desc: &Value) -> Result<Report, CliError> {
    let obj = desc
        .as_object()
        .ok_or_else(|| usage("check descriptor must be a JSON object"))?;
    let kind = str_field(obj, "check")?;
    let seed = obj.get("seed").and_then(Value::as_u64);
    let mut report = match kind {
        "eval" => ops::eval_check(&ctx.backend(obj)?, ctx.poly_text(obj, "poly")?)?,
        "wick" => ops::wick_check(ctx.gaussian()?, ctx.poly_text(obj, "poly")?)?,
        "carleman" => ops::carleman_check(
            &ctx.backend(obj)?,
            u32_field(obj, "var")?,
            u32_field(obj, "horizon")?,
        )?,
        "classify" => ops::classify_check(ctx.gaussian()?)?,
        "consistency" => ops::consistency_check(
            ctx.gaussian()?,
            &indices_field(obj, "indices")?,
            &indices_field(obj, "superset")?,
            u64_field_or(obj, "degree", 6)?,
        )?,
        "axioms" => {
            let seed =
                seed.ok_or_else(|| usage("axioms is a Monte Carlo check and needs a \"seed\""))?;
            let boxes = obj
                .get("boxes")
                .ok_or_else(|| usage("axioms needs a \"boxes\" object"))?;
            ops::axioms_check(ctx.gaussian()?, &indices_field(obj, "indices")?, boxes, seed)?
        }
        "hankel" => ops::hankel_check(
            &ctx.backend(obj)?,
            &indices_field(obj, "indices")?,
            u64_field(obj, "degree")?,
        )?,
        "quad" => ops::quad_check(
            &ctx.backend(obj)?,
            u32_field(obj, "var")?,
            u64_field(obj, "degree")? as usize,
        )?,
        "fourier" => ops::fourier_check(ctx.gaussian()?, ctx.poly_text(obj, "poly")?)?,
        "chebyshev" => ops::chebyshev_check(
            &ctx.backend(obj)?,
            ctx.poly_text(obj, "poly")?,
            &threshold_field(obj)?,
        )?,
        "frac" => ops::frac_check(ctx.poly_text(obj, "poly")?)?,
        other => return Err(usage(format!("unknown check {other:?}"))),
    };
    if let Some(seed) = seed {
        report.seed = seed;
    }
    Ok(report)
}

/// Descriptor echo used when a check never produced its own params.
fn descriptor_params(desc: &Value) -> Value {
    match desc.as_object() {
        Some(obj) => {
            let mut params = obj.clone();
            params.remove("check");
            Value::Object(params)
        }
        None => desc.clone(),
    }
}

fn run_one(ctx: &Context, desc: &Value) -> Report {
    let kind = desc
        .as_object()
        .and_then(|obj| obj.get("check"))
        .and_then(Value::as_str)
        .unwrap_or("unknown")
        .to_string();
    let seed = desc
        .as_object()
        .and_then(|obj| obj.get("seed"))
        .and_then(Value::as_u64)
        .unwrap_or(0);
    dispatch(ctx, desc).unwrap_or_else(|e| Report::error(&kind, descriptor_params(desc), seed, e))
}

/// Runs every descriptor on up to `jobs` worker threads. Reports come
/// back sorted by check name (stable, so ties keep file order) no matter
/// which worker finished first.
pub fn run_all(ctx: &Context, checks: &[Value], jobs: usize) -> Vec<Report> {
    let jobs = jobs.clamp(1, checks.len());
    let mut reports: Vec<Report> = if jobs == 1 {
        checks.iter().map(|desc| run_one(ctx, desc)).collect()
    } else {
        let queue: Mutex<VecDeque<usize>> = Mutex::new((0..checks.len()).collect());
        let slots: Vec<Mutex<Option<Report>>> =
            checks.iter().map(|_| Mutex::new(None)).collect();
        thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let next = queue.lock().expect("queue lock").pop_front();
                    let Some(index) = next else { break };
                    let report = run_one(ctx, &checks[index]);
                    *slots[index].lock().expect("slot lock") = Some(report);
                });
            }
        });
        slots
            .into_iter()
            .map(|slot| {
                slot.into_inner()
                    .expect("slot lock")
                    .expect("every queued check stores a report")
            })
            .collect()
    };
    reports.sort_by(|a, b| a.check.cmp(&b.check));
    reports
}
