//! Gaussian covariance specifications and the cylinder measures they induce.
//!
//! A [`CovarianceSpec`] fixes variances for finitely many leading variables
//! (the head, diagonal or a dense positive-definite block) and an analytic
//! [`TailModel`] for every variable beyond. Distinct variables outside the
//! dense block are independent. The spec determines exact Wick moments for
//! every finite marginal, box probabilities, seeded sampling, the Fourier
//! transform `exp(-(y,y)/2)` and, through the summability of the variance
//! sequence, whether the induced cylinder measure extends sigma-additively.

mod wick;

pub use wick::{
    wick_moment, wick_moment_capped, wick_moment_enumeration, CovMatrix, DEFAULT_WICK_CAP,
};

use crate::error::{Error, Result};
use crate::linalg::ldlt_strict;
use crate::measures::{
    BoxRegion, CylinderMeasure, Estimate, FiniteMeasure, IndexSet, McConfig, MomentValue,
    Seminorm,
};
use crate::poly::{Monomial, Poly, VarIndex};
use crate::rat::{format_rational, integer_rational_power, rational_from_json, rational_to_f64};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};
use statrs::distribution::{ContinuousCDF, Normal};

/// Variance sequence `b_k` for the variables beyond the head block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailModel {
    /// `b_k = C * k^(-p)`; summable exactly when `p > 1`.
    PowerLaw { c: BigRational, p: BigRational },
    /// `b_k = C * r^k` with `0 < r < 1`; always summable.
    Geometric { c: BigRational, r: BigRational },
    /// `b_k = c`; never summable.
    Constant { c: BigRational },
}

impl TailModel {
    fn validate(&self) -> Result<()> {
        let positive = |q: &BigRational, what: &str| {
            if q.is_positive() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "{what} must be positive, got {}",
                    format_rational(q)
                )))
            }
        };
        match self {
            TailModel::PowerLaw { c, p } => {
                positive(c, "power-law constant C")?;
                positive(p, "power-law exponent p")
            }
            TailModel::Geometric { c, r } => {
                positive(c, "geometric constant C")?;
                positive(r, "geometric ratio r")?;
                if *r >= BigRational::one() {
                    return Err(Error::InvalidSpec(format!(
                        "geometric ratio r must lie in (0,1), got {}",
                        format_rational(r)
                    )));
                }
                Ok(())
            }
            TailModel::Constant { c } => positive(c, "constant tail value c"),
        }
    }

    /// Exact `b_k`; power laws with fractional `p` are irrational unless `k`
    /// happens to be a perfect power.
    pub fn value_at(&self, k: u32) -> Result<BigRational> {
        match self {
            TailModel::PowerLaw { c, p } => {
                let kp = integer_rational_power(u64::from(k), p)
                    .ok_or(Error::IrrationalTailValue(k))?;
                Ok(c / kp)
            }
            TailModel::Geometric { c, r } => {
                Ok(c * num_traits::pow::pow(r.clone(), k as usize))
            }
            TailModel::Constant { c } => Ok(c.clone()),
        }
    }

    /// `b_k` as a float, defined for every model.
    pub fn value_f64(&self, k: u32) -> f64 {
        match self {
            TailModel::PowerLaw { c, p } => {
                rational_to_f64(c) * f64::from(k).powf(-rational_to_f64(p))
            }
            TailModel::Geometric { c, r } => {
                rational_to_f64(c) * rational_to_f64(r).powi(k as i32)
            }
            TailModel::Constant { c } => rational_to_f64(c),
        }
    }

    /// Whether `sum_k b_k` converges; decidable analytically per model.
    pub fn series_converges(&self) -> bool {
        match self {
            TailModel::PowerLaw { p, .. } => *p > BigRational::one(),
            TailModel::Geometric { .. } => true,
            TailModel::Constant { .. } => false,
        }
    }
}

/// Covariance of the leading `K` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Head {
    Diag(Vec<BigRational>),
    Dense(Vec<Vec<BigRational>>),
}

/// Full covariance description: head block plus tail model. Encodes a
/// positive operator with trivial kernel, which the constructor certifies
/// exactly (positive diagonal entries, respectively positive LDL^T pivots).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovarianceSpec {
    head: Head,
    tail: TailModel,
}

impl CovarianceSpec {
    pub fn new(head: Head, tail: TailModel) -> Result<Self> {
        match &head {
            Head::Diag(entries) => {
                if let Some(bad) = entries.iter().find(|b| !b.is_positive()) {
                    return Err(Error::InvalidSpec(format!(
                        "diagonal head entries must be positive, got {}",
                        format_rational(bad)
                    )));
                }
            }
            Head::Dense(block) => {
                if block.is_empty() {
                    return Err(Error::InvalidSpec("dense head must be nonempty".into()));
                }
                if !crate::linalg::is_symmetric(block) {
                    return Err(Error::InvalidSpec(
                        "dense head must be a symmetric square matrix".into(),
                    ));
                }
                if let Err((step, pivot)) = ldlt_strict(block) {
                    return Err(Error::InvalidSpec(format!(
                        "dense head is not positive definite: pivot {} at step {step}",
                        format_rational(&pivot)
                    )));
                }
            }
        }
        tail.validate()?;
        Ok(CovarianceSpec { head, tail })
    }

    pub fn diag<I: IntoIterator<Item = BigRational>>(entries: I, tail: TailModel) -> Result<Self> {
        CovarianceSpec::new(Head::Diag(entries.into_iter().collect()), tail)
    }

    pub fn head(&self) -> &Head {
        &self.head
    }

    pub fn tail(&self) -> &TailModel {
        &self.tail
    }

    /// Number of head variables `K`.
    pub fn head_len(&self) -> u32 {
        let n = match &self.head {
            Head::Diag(d) => d.len(),
            Head::Dense(m) => m.len(),
        };
        n as u32
    }

    /// Exact variance `b_k` of `x_k`.
    pub fn variance(&self, k: u32) -> Result<BigRational> {
        let pos = (k - 1) as usize;
        if k <= self.head_len() {
            Ok(match &self.head {
                Head::Diag(d) => d[pos].clone(),
                Head::Dense(m) => m[pos][pos].clone(),
            })
        } else {
            self.tail.value_at(k)
        }
    }

    /// Exact covariance of `x_i` and `x_j`; zero across the head boundary
    /// and between distinct tail variables.
    pub fn covariance(&self, i: u32, j: u32) -> Result<BigRational> {
        if i == j {
            return self.variance(i);
        }
        let k = self.head_len();
        if i <= k && j <= k {
            if let Head::Dense(m) = &self.head {
                return Ok(m[(i - 1) as usize][(j - 1) as usize].clone());
            }
        }
        Ok(BigRational::zero())
    }

    pub fn covariance_f64(&self, i: u32, j: u32) -> f64 {
        match self.covariance(i, j) {
            Ok(q) => rational_to_f64(&q),
            // only tail variances can be irrational
            Err(_) => self.tail.value_f64(i),
        }
    }

    /// Exact covariance block over the index set, in sorted variable order.
    pub fn submatrix(&self, f: &IndexSet) -> Result<CovMatrix> {
        let vars = f.vars();
        let mut entries = vec![vec![BigRational::zero(); vars.len()]; vars.len()];
        for (a, &va) in vars.iter().enumerate() {
            for (b, &vb) in vars.iter().enumerate().take(a + 1) {
                let c = self.covariance(va.get(), vb.get())?;
                entries[a][b] = c.clone();
                entries[b][a] = c;
            }
        }
        CovMatrix::new(vars, entries)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidSpec("covariance spec must be a JSON object".into()))?;
        let head_v = obj
            .get("head")
            .ok_or_else(|| Error::InvalidSpec("missing \"head\"".into()))?;
        let head = if let Some(diag) = head_v.get("diag") {
            let list = diag
                .as_array()
                .ok_or_else(|| Error::InvalidSpec("\"diag\" must be an array".into()))?;
            Head::Diag(list.iter().map(rational_from_json).collect::<Result<_>>()?)
        } else if let Some(dense) = head_v.get("dense") {
            let rows = dense
                .as_array()
                .ok_or_else(|| Error::InvalidSpec("\"dense\" must be an array of rows".into()))?;
            let mut block = Vec::with_capacity(rows.len());
            for row in rows {
                let row = row
                    .as_array()
                    .ok_or_else(|| Error::InvalidSpec("dense rows must be arrays".into()))?;
                block.push(row.iter().map(rational_from_json).collect::<Result<_>>()?);
            }
            Head::Dense(block)
        } else {
            return Err(Error::InvalidSpec(
                "\"head\" must contain \"diag\" or \"dense\"".into(),
            ));
        };

        let tail_v = obj
            .get("tail")
            .ok_or_else(|| Error::InvalidSpec("missing \"tail\"".into()))?;
        let model = tail_v
            .get("model")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidSpec("tail needs a \"model\" string".into()))?;
        let field = |names: &[&str]| -> Result<BigRational> {
            for name in names {
                if let Some(v) = tail_v.get(*name) {
                    return rational_from_json(v);
                }
            }
            Err(Error::InvalidSpec(format!(
                "tail model {model:?} needs field {:?}",
                names[0]
            )))
        };
        let tail = match model {
            "power" => TailModel::PowerLaw {
                c: field(&["C", "c"])?,
                p: field(&["p"])?,
            },
            "geometric" => TailModel::Geometric {
                c: field(&["C", "c"])?,
                r: field(&["r"])?,
            },
            "constant" => TailModel::Constant { c: field(&["c", "C"])? },
            "zero" => return Err(Error::ZeroTailRejected),
            other => {
                return Err(Error::InvalidSpec(format!("unknown tail model {other:?}")))
            }
        };
        CovarianceSpec::new(head, tail)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidSpec(format!("malformed JSON: {e}")))?;
        CovarianceSpec::from_json(&value)
    }

    pub fn to_json(&self) -> Value {
        let rat = |q: &BigRational| Value::String(format_rational(q));
        let head = match &self.head {
            Head::Diag(d) => json!({ "diag": d.iter().map(rat).collect::<Vec<_>>() }),
            Head::Dense(m) => json!({
                "dense": m
                    .iter()
                    .map(|row| row.iter().map(rat).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            }),
        };
        let tail = match &self.tail {
            TailModel::PowerLaw { c, p } => json!({ "model": "power", "C": rat(c), "p": rat(p) }),
            TailModel::Geometric { c, r } => {
                json!({ "model": "geometric", "C": rat(c), "r": rat(r) })
            }
            TailModel::Constant { c } => json!({ "model": "constant", "c": rat(c) }),
        };
        json!({ "head": head, "tail": tail })
    }
}

/// Outcome of [`classify_sigma_additivity`] with the rule that decided it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigmaAdditivityVerdict {
    /// The variance sequence is summable; the cylinder measure extends to a
    /// sigma-additive measure.
    SigmaAdditive { justification: String },
    /// The variance sequence has a divergent sum; the measure stays finitely
    /// additive on cylinder sets only.
    CylinderOnly { justification: String },
    /// No built-in convergence rule applies (reserved for user-supplied
    /// tails; the three built-in models never produce it).
    Inconclusive { justification: String },
}

impl SigmaAdditivityVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            SigmaAdditivityVerdict::SigmaAdditive { .. } => "SigmaAdditive",
            SigmaAdditivityVerdict::CylinderOnly { .. } => "CylinderOnly",
            SigmaAdditivityVerdict::Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn justification(&self) -> &str {
        match self {
            SigmaAdditivityVerdict::SigmaAdditive { justification }
            | SigmaAdditivityVerdict::CylinderOnly { justification }
            | SigmaAdditivityVerdict::Inconclusive { justification } => justification,
        }
    }
}

/// Decides sigma-additivity of the Gaussian cylinder measure: it holds
/// exactly when the variance sequence is summable (the covariance operator
/// is trace class). The finite head never affects the verdict.
pub fn classify_sigma_additivity(spec: &CovarianceSpec) -> SigmaAdditivityVerdict {
    let k = spec.head_len();
    let head_note = format!("the {k} head variances sum finitely");
    match spec.tail() {
        TailModel::PowerLaw { c, p } => {
            let c = format_rational(c);
            let p = format_rational(p);
            if spec.tail().series_converges() {
                SigmaAdditivityVerdict::SigmaAdditive {
                    justification: format!(
                        "{head_note}; the power tail b_k = {c}*k^(-{p}) has p = {p} > 1, so \
                         the p-series converges and the variance sequence is summable \
                         (trace class)"
                    ),
                }
            } else {
                SigmaAdditivityVerdict::CylinderOnly {
                    justification: format!(
                        "{head_note}; the power tail b_k = {c}*k^(-{p}) has p = {p} <= 1, so \
                         the p-series diverges and the variance sequence is not summable"
                    ),
                }
            }
        }
        TailModel::Geometric { c, r } => SigmaAdditivityVerdict::SigmaAdditive {
            justification: format!(
                "{head_note}; the geometric tail b_k = {}*{}^k with ratio in (0,1) always \
                 has a finite sum (trace class)",
                format_rational(c),
                format_rational(r)
            ),
        },
        TailModel::Constant { c } => SigmaAdditivityVerdict::CylinderOnly {
            justification: format!(
                "{head_note}; the constant tail b_k = {} does not tend to zero, so the \
                 variance sum diverges",
                format_rational(c)
            ),
        },
    }
}

/// `exp(-(y,y)/2)` for a finite coefficient vector `y`, where `(y,y)` is the
/// covariance quadratic form. The form is computed exactly when every needed
/// entry is rational, in floats otherwise; `y = 0` gives exactly 1.
pub fn fourier(spec: &CovarianceSpec, y: &[(VarIndex, BigRational)]) -> f64 {
    let coeffs: Vec<(VarIndex, BigRational)> = {
        let mut merged = std::collections::BTreeMap::new();
        for (v, c) in y {
            *merged.entry(*v).or_insert_with(BigRational::zero) += c;
        }
        merged.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    };
    let q = match quad_form_exact(spec, &coeffs) {
        Ok(exact) => rational_to_f64(&exact),
        Err(_) => quad_form_f64(spec, &coeffs),
    };
    (-q / 2.0).exp()
}

fn quad_form_exact(spec: &CovarianceSpec, y: &[(VarIndex, BigRational)]) -> Result<BigRational> {
    let mut acc = BigRational::zero();
    for (a, (vi, ci)) in y.iter().enumerate() {
        for (vj, cj) in y.iter().take(a + 1) {
            let c = spec.covariance(vi.get(), vj.get())?;
            if c.is_zero() {
                continue;
            }
            let term = ci * cj * c;
            acc += if vi == vj { term } else { term * BigRational::from_integer(2.into()) };
        }
    }
    Ok(acc)
}

fn quad_form_f64(spec: &CovarianceSpec, y: &[(VarIndex, BigRational)]) -> f64 {
    let mut acc = 0.0;
    for (vi, ci) in y {
        for (vj, cj) in y {
            acc += rational_to_f64(ci)
                * rational_to_f64(cj)
                * spec.covariance_f64(vi.get(), vj.get());
        }
    }
    acc
}

/// Sample chunk width; each chunk advances to its own counter stream so
/// chunks can be generated independently and in parallel.
pub const SAMPLE_CHUNK: usize = 65536;

/// `n` i.i.d. draws from `N(0, cov)`, deterministic in `seed`. Coordinates
/// follow the matrix's variable order.
pub fn sample_from_cov(cov: &CovMatrix, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::InvalidInput("sample count must be at least 1".into()));
    }
    let factor = ldlt_strict(cov.entries()).map_err(|_| Error::NumericallySingular)?;
    let dim = cov.dim();
    // scaled factor A = L sqrt(D), so A z ~ N(0, cov) for z standard normal
    let mut a = vec![vec![0.0f64; dim]; dim];
    for (j, d) in factor.diag.iter().enumerate() {
        let root = rational_to_f64(d).sqrt();
        if !(root.is_finite() && root > 0.0) {
            return Err(Error::NumericallySingular);
        }
        a[j][j] = root;
        for (row, low) in a.iter_mut().zip(&factor.lower).skip(j + 1) {
            row[j] = rational_to_f64(&low[j]) * root;
        }
    }

    let mut out = Vec::with_capacity(n);
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    for chunk in 0..chunks {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk as u64);
        let count = SAMPLE_CHUNK.min(n - chunk * SAMPLE_CHUNK);
        for _ in 0..count {
            let z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let x: Vec<f64> = (0..dim)
                .map(|i| (0..=i).map(|j| a[i][j] * z[j]).sum())
                .collect();
            out.push(x);
        }
    }
    Ok(out)
}

/// Draws from the marginal of `spec` on `f`; see [`sample_from_cov`].
pub fn sample(spec: &CovarianceSpec, f: &IndexSet, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    sample_from_cov(&spec.submatrix(f)?, n, seed)
}

/// Finite-dimensional Gaussian marginal: exact Wick moments, exact CDF
/// products for diagonal blocks, seeded Monte Carlo otherwise.
#[derive(Debug, Clone)]
pub struct GaussianMarginal {
    indices: IndexSet,
    cov: CovMatrix,
    mc: McConfig,
}

impl GaussianMarginal {
    pub fn cov(&self) -> &CovMatrix {
        &self.cov
    }
}

/// The marginal of `spec` on `f` with default Monte Carlo configuration.
pub fn gaussian_marginal(spec: &CovarianceSpec, f: &IndexSet) -> Result<GaussianMarginal> {
    gaussian_marginal_with(spec, f, McConfig::default())
}

pub fn gaussian_marginal_with(
    spec: &CovarianceSpec,
    f: &IndexSet,
    mc: McConfig,
) -> Result<GaussianMarginal> {
    Ok(GaussianMarginal {
        indices: f.clone(),
        cov: spec.submatrix(f)?,
        mc,
    })
}

impl FiniteMeasure for GaussianMarginal {
    fn indices(&self) -> &IndexSet {
        &self.indices
    }

    fn moment(&self, alpha: &Monomial) -> Result<MomentValue> {
        Ok(MomentValue::Exact(wick_moment(&self.cov, alpha)?))
    }

    fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        sample_from_cov(&self.cov, count, seed)
    }

    fn box_prob(&self, base: &BoxRegion) -> Result<Estimate> {
        if base.dim() != self.cov.dim() {
            return Err(Error::DimensionMismatch(format!(
                "box has {} coordinates, marginal has {}",
                base.dim(),
                self.cov.dim()
            )));
        }
        if base.is_empty() {
            return Ok(Estimate::exact(0.0));
        }
        if base.is_full() {
            return Ok(Estimate::exact(1.0));
        }
        if self.cov.is_diagonal() {
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            let mut p = 1.0f64;
            for (k, interval) in base.intervals().iter().enumerate() {
                let sigma = rational_to_f64(self.cov.entry(k, k)).sqrt();
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::NumericallySingular);
                }
                let upper = match interval.hi() {
                    None => 1.0,
                    Some(h) => normal.cdf(rational_to_f64(h) / sigma),
                };
                let lower = match interval.lo() {
                    None => 0.0,
                    Some(l) => normal.cdf(rational_to_f64(l) / sigma),
                };
                p *= (upper - lower).max(0.0);
            }
            return Ok(Estimate::exact(p));
        }
        let draws = sample_from_cov(&self.cov, self.mc.samples, self.mc.seed)?;
        let hits = draws.iter().filter(|x| base.contains_f64(x)).count();
        let n = draws.len() as f64;
        let p = hits as f64 / n;
        let stderr = (p * (1.0 - p) / n).sqrt();
        Ok(Estimate::monte_carlo(p, stderr))
    }
}

/// The Gaussian cylinder measure of a covariance spec, carrying the
/// certified continuity seminorm.
#[derive(Debug, Clone)]
pub struct GaussianMeasure {
    spec: CovarianceSpec,
    seminorm: Seminorm,
}

impl GaussianMeasure {
    pub fn new(spec: CovarianceSpec) -> Result<Self> {
        let seminorm = derive_seminorm(&spec)?;
        Ok(GaussianMeasure { spec, seminorm })
    }

    pub fn spec(&self) -> &CovarianceSpec {
        &self.spec
    }
}

impl CylinderMeasure for GaussianMeasure {
    fn marginal_with(&self, f: &IndexSet, mc: McConfig) -> Result<Box<dyn FiniteMeasure>> {
        Ok(Box::new(gaussian_marginal_with(&self.spec, f, mc)?))
    }

    fn seminorm(&self) -> Option<&Seminorm> {
        Some(&self.seminorm)
    }
}

/// Weighted-coefficient seminorm dominating the variance form: `w_i = b_i`
/// for diagonal heads (equality on single variables), a Gershgorin row-sum
/// bound as the uniform head weight for dense heads, and `w_k = b_k` beyond.
/// Certified on construction by exact comparison on a sample of forms.
pub fn derive_seminorm(spec: &CovarianceSpec) -> Result<Seminorm> {
    let head_weights: Vec<BigRational> = match spec.head() {
        Head::Diag(d) => d.clone(),
        Head::Dense(m) => {
            let bound = m
                .iter()
                .map(|row| row.iter().map(Signed::abs).sum::<BigRational>())
                .max()
                .expect("dense head is nonempty");
            vec![bound; m.len()]
        }
    };
    let seminorm = Seminorm::new(head_weights, spec.tail().clone());
    certify_seminorm(spec, &seminorm)?;
    Ok(seminorm)
}

/// Exactly verifies `L(t^2) <= q(t)^2` on sample forms: each single head
/// variable, head pairs `x_i + x_j` and `x_i - x_j`, and the first tail
/// variables with rational variance, including one mixed head-tail pair.
fn certify_seminorm(spec: &CovarianceSpec, seminorm: &Seminorm) -> Result<()> {
    let k = spec.head_len();
    let one = BigRational::one;
    let mut forms: Vec<Vec<(VarIndex, BigRational)>> = Vec::new();
    for i in 1..=k {
        forms.push(vec![(VarIndex::new(i), one())]);
    }
    for i in 1..k {
        forms.push(vec![(VarIndex::new(i), one()), (VarIndex::new(i + 1), one())]);
        forms.push(vec![(VarIndex::new(i), one()), (VarIndex::new(i + 1), -one())]);
    }
    for t in [k + 1, k + 2] {
        if spec.tail().value_at(t).is_ok() {
            forms.push(vec![(VarIndex::new(t), one())]);
            if k >= 1 {
                forms.push(vec![(VarIndex::new(1), one()), (VarIndex::new(t), one())]);
            }
        }
    }

    for coeffs in forms {
        let lhs = quad_form_exact(spec, &coeffs)?;
        let rhs = seminorm.q_squared(&coeffs)?;
        if lhs > rhs {
            let mut t = Poly::zero();
            for (v, c) in &coeffs {
                t.add_term(Monomial::var(*v), c.clone());
            }
            return Err(Error::SeminormNotDominating {
                t: t.to_string(),
                lhs: format_rational(&lhs),
                rhs: format_rational(&rhs),
            });
        }
    }
    Ok(())
}

/// Bessel-corrected mean and standard error of a sample.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
