//! Cylinder sets over box bases, finite-dimensional marginals and the
//! cylinder-measure interface.
//!
//! A cylinder measure is handled purely through its projective family: a
//! [`CylinderMeasure`] hands out one [`FiniteMeasure`] per finite
//! [`IndexSet`], and the checks in [`checks`](self) probe normalization,
//! additivity along a fixed index set, and compatibility between nested
//! marginals. Probabilities carry an [`ErrorBar`] so Monte Carlo estimates
//! and exact values flow through the same arithmetic.

mod checks;

pub use checks::{
    check_axioms, check_consistency, chebyshev_bound, continuity_witness, cyl_prob,
    cyl_prob_with, AxiomsReport, ConsistencyReport, ConsistencyRow,
};

use crate::error::{Error, Result};
use crate::gaussian::TailModel;
use crate::poly::{Monomial, Poly, VarIndex};
use crate::rat::{format_rational, rational_from_json, rational_to_f64};
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::fmt;

/// Finite sorted set of variable indices naming a finite-dimensional
/// subspace; never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    indices: BTreeSet<VarIndex>,
}

impl IndexSet {
    pub fn new<I: IntoIterator<Item = VarIndex>>(indices: I) -> Result<Self> {
        let indices: BTreeSet<VarIndex> = indices.into_iter().collect();
        if indices.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        Ok(IndexSet { indices })
    }

    /// Builds from raw 1-based indices, rejecting 0.
    pub fn from_indices<I: IntoIterator<Item = u32>>(raw: I) -> Result<Self> {
        let mut indices = BTreeSet::new();
        for k in raw {
            if k == 0 {
                return Err(Error::InvalidInput(
                    "variable indices are 1-based; got 0".into(),
                ));
            }
            indices.insert(VarIndex::new(k));
        }
        IndexSet::new(indices)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: VarIndex) -> bool {
        self.indices.contains(&v)
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.indices.is_subset(&other.indices)
    }

    pub fn iter(&self) -> impl Iterator<Item = VarIndex> + '_ {
        self.indices.iter().copied()
    }

    /// Sorted variable list; position in this list is the coordinate order
    /// used by boxes, samples and covariance blocks.
    pub fn vars(&self) -> Vec<VarIndex> {
        self.indices.iter().copied().collect()
    }

    pub fn position(&self, v: VarIndex) -> Option<usize> {
        self.indices.iter().position(|&u| u == v)
    }

    /// Checks that a monomial only mentions variables of this set.
    pub fn covers(&self, alpha: &Monomial) -> Result<()> {
        for (v, _) in alpha.exponents() {
            if !self.contains(v) {
                return Err(Error::MonomialOutsideIndexSet(v.get()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, v) in self.indices.iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v.get())?;
        }
        write!(f, "}}")
    }
}

/// One coordinate interval with exact rational endpoints; `None` endpoints
/// are infinite. Open flags are ignored on infinite ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Option<BigRational>,
    hi: Option<BigRational>,
    lo_open: bool,
    hi_open: bool,
}

impl Interval {
    pub fn new(
        lo: Option<BigRational>,
        hi: Option<BigRational>,
        lo_open: bool,
        hi_open: bool,
    ) -> Result<Self> {
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l > h {
                return Err(Error::InvalidBox(format!(
                    "lower endpoint {} exceeds upper endpoint {}",
                    format_rational(l),
                    format_rational(h)
                )));
            }
        }
        Ok(Interval {
            lo,
            hi,
            lo_open,
            hi_open,
        })
    }

    pub fn full() -> Self {
        Interval {
            lo: None,
            hi: None,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn closed(lo: BigRational, hi: BigRational) -> Result<Self> {
        Interval::new(Some(lo), Some(hi), false, false)
    }

    pub fn open(lo: BigRational, hi: BigRational) -> Result<Self> {
        Interval::new(Some(lo), Some(hi), true, true)
    }

    /// `(-inf, hi]` or `(-inf, hi)`.
    pub fn up_to(hi: BigRational, open: bool) -> Self {
        Interval {
            lo: None,
            hi: Some(hi),
            lo_open: false,
            hi_open: open,
        }
    }

    /// `[lo, inf)` or `(lo, inf)`.
    pub fn from_on(lo: BigRational, open: bool) -> Self {
        Interval {
            lo: Some(lo),
            hi: None,
            lo_open: open,
            hi_open: false,
        }
    }

    pub fn lo(&self) -> Option<&BigRational> {
        self.lo.as_ref()
    }

    pub fn hi(&self) -> Option<&BigRational> {
        self.hi.as_ref()
    }

    pub fn lo_open(&self) -> bool {
        self.lo_open
    }

    pub fn hi_open(&self) -> bool {
        self.hi_open
    }

    /// True for zero-width intervals with an open end, the only way to spell
    /// the empty set (lower > upper is rejected at construction).
    pub fn is_empty(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Some(l), Some(h)) => l == h && (self.lo_open || self.hi_open),
            _ => false,
        }
    }

    /// True when unbounded on both sides, covering the whole line.
    pub fn is_full(&self) -> bool {
        self.lo.is_none() && self.hi.is_none()
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        if let Some(l) = &self.lo {
            if x < l || (x == l && self.lo_open) {
                return false;
            }
        }
        if let Some(h) = &self.hi {
            if x > h || (x == h && self.hi_open) {
                return false;
            }
        }
        true
    }

    /// Float membership for Monte Carlo hits; endpoint ties follow the
    /// open/closed flags on the rounded endpoints.
    pub fn contains_f64(&self, x: f64) -> bool {
        if let Some(l) = &self.lo {
            let l = rational_to_f64(l);
            if x < l || (x == l && self.lo_open) {
                return false;
            }
        }
        if let Some(h) = &self.hi {
            let h = rational_to_f64(h);
            if x > h || (x == h && self.hi_open) {
                return false;
            }
        }
        true
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidBox("interval must be a JSON object".into()))?;
        let endpoint = |name: &str| -> Result<Option<BigRational>> {
            match obj.get(name) {
                None | Some(Value::Null) => Ok(None),
                Some(v) => Ok(Some(rational_from_json(v)?)),
            }
        };
        let flag = |name: &str| obj.get(name).and_then(Value::as_bool).unwrap_or(false);
        Interval::new(
            endpoint("lo")?,
            endpoint("hi")?,
            flag("lo_open"),
            flag("hi_open"),
        )
    }

    pub fn to_json(&self) -> Value {
        let endpoint = |e: &Option<BigRational>| match e {
            None => Value::Null,
            Some(q) => Value::String(format_rational(q)),
        };
        let mut obj = serde_json::Map::new();
        obj.insert("lo".into(), endpoint(&self.lo));
        obj.insert("hi".into(), endpoint(&self.hi));
        if self.lo_open {
            obj.insert("lo_open".into(), Value::Bool(true));
        }
        if self.hi_open {
            obj.insert("hi_open".into(), Value::Bool(true));
        }
        Value::Object(obj)
    }
}

/// Axis-aligned box: one interval per coordinate of an index set, in the
/// set's sorted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxRegion {
    intervals: Vec<Interval>,
}

impl BoxRegion {
    pub fn new(intervals: Vec<Interval>) -> Self {
        BoxRegion { intervals }
    }

    /// The full space over `dim` coordinates.
    pub fn full(dim: usize) -> Self {
        BoxRegion {
            intervals: vec![Interval::full(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.iter().any(Interval::is_empty)
    }

    /// True when every coordinate ranges over the whole line.
    pub fn is_full(&self) -> bool {
        self.intervals.iter().all(Interval::is_full)
    }

    pub fn contains(&self, point: &[BigRational]) -> bool {
        point.len() == self.dim()
            && self
                .intervals
                .iter()
                .zip(point)
                .all(|(interval, x)| interval.contains(x))
    }

    pub fn contains_f64(&self, point: &[f64]) -> bool {
        point.len() == self.dim()
            && self
                .intervals
                .iter()
                .zip(point)
                .all(|(interval, &x)| interval.contains_f64(x))
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let arr = value
            .as_array()
            .ok_or_else(|| Error::InvalidBox("box must be a JSON array of intervals".into()))?;
        Ok(BoxRegion {
            intervals: arr.iter().map(Interval::from_json).collect::<Result<_>>()?,
        })
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.intervals.iter().map(Interval::to_json).collect())
    }
}

/// A cylinder set `{chi : (chi(x_i))_{i in generating} in base}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderSet {
    generating: IndexSet,
    base: BoxRegion,
}

impl CylinderSet {
    pub fn new(generating: IndexSet, base: BoxRegion) -> Result<Self> {
        if base.dim() != generating.len() {
            return Err(Error::DimensionMismatch(format!(
                "box has {} coordinates but the generating set has {} indices",
                base.dim(),
                generating.len()
            )));
        }
        Ok(CylinderSet { generating, base })
    }

    pub fn generating(&self) -> &IndexSet {
        &self.generating
    }

    pub fn base(&self) -> &BoxRegion {
        &self.base
    }

    /// Parses `{"indices":[1,2],"box":[{"lo":-1.96,"hi":1.96}, ...]}`.
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidBox("cylinder set must be a JSON object".into()))?;
        let indices = obj
            .get("indices")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidBox("missing \"indices\" array".into()))?;
        let raw: Vec<u32> = indices
            .iter()
            .map(|v| {
                v.as_u64()
                    .and_then(|k| u32::try_from(k).ok())
                    .ok_or_else(|| Error::InvalidBox("indices must be positive integers".into()))
            })
            .collect::<Result<_>>()?;
        let generating = IndexSet::from_indices(raw)?;
        let base = BoxRegion::from_json(
            obj.get("box")
                .ok_or_else(|| Error::InvalidBox("missing \"box\" array".into()))?,
        )?;
        CylinderSet::new(generating, base)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "indices": self.generating.vars().iter().map(|v| v.get()).collect::<Vec<_>>(),
            "box": self.base.to_json(),
        })
    }
}

/// Error descriptor attached to a probability or integral estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorBar {
    Exact,
    MonteCarlo { stderr: f64 },
}

/// A value plus its error bar; sums add error bars in quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub bar: ErrorBar,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            bar: ErrorBar::Exact,
        }
    }

    pub fn monte_carlo(value: f64, stderr: f64) -> Self {
        Estimate {
            value,
            bar: ErrorBar::MonteCarlo { stderr },
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.bar, ErrorBar::Exact)
    }

    pub fn stderr(&self) -> f64 {
        match self.bar {
            ErrorBar::Exact => 0.0,
            ErrorBar::MonteCarlo { stderr } => stderr,
        }
    }

    pub fn add(&self, other: &Estimate) -> Estimate {
        let value = self.value + other.value;
        if self.is_exact() && other.is_exact() {
            Estimate::exact(value)
        } else {
            let stderr = (self.stderr().powi(2) + other.stderr().powi(2)).sqrt();
            Estimate::monte_carlo(value, stderr)
        }
    }
}

/// A moment that is exact for rational backends and floating for measures
/// with irrational atoms.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentValue {
    Exact(BigRational),
    Real(f64),
}

impl MomentValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            MomentValue::Exact(q) => rational_to_f64(q),
            MomentValue::Real(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            MomentValue::Exact(q) => Some(q),
            MomentValue::Real(_) => None,
        }
    }
}

/// Monte Carlo configuration used when a marginal must estimate rather than
/// compute a probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            seed: 0,
            samples: 200_000,
        }
    }
}

/// A normalized measure on the coordinate space of one finite index set.
pub trait FiniteMeasure {
    fn indices(&self) -> &IndexSet;

    /// `integral of x^alpha`; the unit monomial must give exactly 1.
    fn moment(&self, alpha: &Monomial) -> Result<MomentValue>;

    /// `count` draws, coordinates in the index set's sorted order.
    fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>>;

    /// Probability of the box, with an error-bar descriptor.
    fn box_prob(&self, base: &BoxRegion) -> Result<Estimate>;
}

/// A compatible family of finite-dimensional marginals.
pub trait CylinderMeasure {
    /// The marginal on `f`, with explicit Monte Carlo configuration for
    /// backends that need to estimate box probabilities.
    fn marginal_with(&self, f: &IndexSet, mc: McConfig) -> Result<Box<dyn FiniteMeasure>>;

    fn marginal(&self, f: &IndexSet) -> Result<Box<dyn FiniteMeasure>> {
        self.marginal_with(f, McConfig::default())
    }

    /// Certified continuity seminorm, when the backend carries one.
    fn seminorm(&self) -> Option<&Seminorm> {
        None
    }
}

/// Weighted coefficient seminorm `q(sum c_i x_i) = sqrt(sum w_i c_i^2)`.
/// Backends that attach one certify `L(t^2) <= q(t)^2` on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seminorm {
    head_weights: Vec<BigRational>,
    tail: TailModel,
}

impl Seminorm {
    pub fn new(head_weights: Vec<BigRational>, tail: TailModel) -> Self {
        Seminorm { head_weights, tail }
    }

    /// Exact weight of `x_i`; tail weights can be irrational for fractional
    /// power laws.
    pub fn weight(&self, i: VarIndex) -> Result<BigRational> {
        let k = i.get();
        match self.head_weights.get((k - 1) as usize) {
            Some(w) => Ok(w.clone()),
            None => self.tail.value_at(k),
        }
    }

    pub fn weight_f64(&self, i: VarIndex) -> f64 {
        let k = i.get();
        match self.head_weights.get((k - 1) as usize) {
            Some(w) => rational_to_f64(w),
            None => self.tail.value_f64(k),
        }
    }

    /// Exact `q(t)^2 = sum w_i c_i^2` for a coefficient vector.
    pub fn q_squared(&self, coeffs: &[(VarIndex, BigRational)]) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (v, c) in coeffs {
            acc += self.weight(*v)? * c * c;
        }
        Ok(acc)
    }

    /// `q(t)` for a linear form, in floats (always defined).
    pub fn q(&self, t: &Poly) -> Result<f64> {
        let coeffs = linear_coefficients(t)?;
        let sum: f64 = coeffs
            .iter()
            .map(|(v, c)| {
                let c = rational_to_f64(c);
                self.weight_f64(*v) * c * c
            })
            .sum();
        Ok(sum.sqrt())
    }
}

/// Coefficients of a linear form `sum c_i x_i`; rejects constant terms and
/// anything of degree above 1.
pub fn linear_coefficients(t: &Poly) -> Result<Vec<(VarIndex, BigRational)>> {
    let mut coeffs = Vec::with_capacity(t.num_terms());
    for (m, c) in t.terms() {
        let mut vars = m.exponents();
        match (vars.next(), vars.next()) {
            (Some((v, 1)), None) => coeffs.push((v, c.clone())),
            _ => return Err(Error::NotDegreeOne(t.to_string())),
        }
    }
    coeffs.sort_by_key(|(v, _)| *v);
    Ok(coeffs)
}
