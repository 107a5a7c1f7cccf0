//! Executable checks on cylinder measures: box probabilities, projective
//! compatibility, additivity along a fixed index set, and the continuity
//! and Chebyshev bounds.

use super::{
    linear_coefficients, BoxRegion, CylinderMeasure, CylinderSet, Estimate, IndexSet, Interval,
    McConfig, MomentValue,
};
use crate::error::{Error, Result};
use crate::moments::{eval_functional, MomentFunctional};
use crate::poly::{monomials_up_to, Monomial, Poly};
use crate::rat::{rational_to_f64, sqrt_exact};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Probability of a cylinder set: the base-box probability under the
/// marginal on the generating set.
pub fn cyl_prob(mu: &dyn CylinderMeasure, n: &CylinderSet) -> Result<Estimate> {
    cyl_prob_with(mu, n, McConfig::default())
}

pub fn cyl_prob_with(
    mu: &dyn CylinderMeasure,
    n: &CylinderSet,
    mc: McConfig,
) -> Result<Estimate> {
    let marginal = mu.marginal_with(n.generating(), mc)?;
    marginal.box_prob(n.base())
}

/// One compared moment in a consistency report.
#[derive(Debug, Clone)]
pub struct ConsistencyRow {
    pub monomial: Monomial,
    pub lhs: MomentValue,
    pub rhs: MomentValue,
    /// Absolute difference; computed exactly first when both sides are.
    pub residual: f64,
    /// Whether the difference is exactly zero in rational arithmetic.
    pub exact_zero: bool,
}

/// Moment-level compatibility of two nested marginals.
#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub f: IndexSet,
    pub g: IndexSet,
    pub max_degree: u64,
    pub rows: Vec<ConsistencyRow>,
    pub max_residual: f64,
    pub pass: bool,
}

/// Compares every moment of degree <= `max_degree` over `f` between the
/// marginal on `f` and the marginal on the superset `g`. Exact backends
/// must agree exactly; float-valued moments are allowed 1e-10.
pub fn check_consistency(
    mu: &dyn CylinderMeasure,
    f: &IndexSet,
    g: &IndexSet,
    max_degree: u64,
) -> Result<ConsistencyReport> {
    if !f.is_subset(g) {
        return Err(Error::NotSubset);
    }
    let marginal_f = mu.marginal(f)?;
    let marginal_g = mu.marginal(g)?;
    let mut rows = Vec::new();
    let mut max_residual = 0.0f64;
    let mut pass = true;
    for alpha in monomials_up_to(&f.vars(), max_degree) {
        let lhs = marginal_f.moment(&alpha)?;
        let rhs = marginal_g.moment(&alpha)?;
        let (residual, exact_zero) = match (lhs.exact(), rhs.exact()) {
            (Some(a), Some(b)) => {
                let diff = (a - b).abs();
                (rational_to_f64(&diff), diff.is_zero())
            }
            _ => ((lhs.to_f64() - rhs.to_f64()).abs(), false),
        };
        let row_ok = if lhs.exact().is_some() && rhs.exact().is_some() {
            exact_zero
        } else {
            residual <= 1e-10
        };
        pass &= row_ok;
        max_residual = max_residual.max(residual);
        rows.push(ConsistencyRow {
            monomial: alpha,
            lhs,
            rhs,
            residual,
            exact_zero,
        });
    }
    Ok(ConsistencyReport {
        f: f.clone(),
        g: g.clone(),
        max_degree,
        rows,
        max_residual,
        pass,
    })
}

/// Additivity check along one index set.
#[derive(Debug, Clone)]
pub struct AxiomsReport {
    pub cells: usize,
    pub total: Estimate,
    pub whole: Estimate,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
}

/// Verifies `mu(whole) = sum_n mu(cell_n)` for a box partition over `f`.
/// The partition is validated exactly on the rational endpoints before any
/// probability is computed; the probabilistic tolerance is `1e-12` for
/// exact backends, widened to four combined standard errors for Monte
/// Carlo ones.
pub fn check_axioms(
    mu: &dyn CylinderMeasure,
    f: &IndexSet,
    partition: &[BoxRegion],
    whole: &BoxRegion,
    seed: u64,
) -> Result<AxiomsReport> {
    let dim = f.len();
    if whole.dim() != dim || partition.iter().any(|b| b.dim() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "partition boxes and the whole box must all have {dim} coordinates"
        )));
    }
    validate_partition(partition, whole)?;

    let marginal = mu.marginal_with(f, McConfig { seed, ..McConfig::default() })?;
    let mut total = Estimate::exact(0.0);
    for cell in partition {
        total = total.add(&marginal.box_prob(cell)?);
    }
    let whole_prob = marginal.box_prob(whole)?;
    let residual = (total.value - whole_prob.value).abs();
    let combined = (total.stderr().powi(2) + whole_prob.stderr().powi(2)).sqrt();
    let tolerance = (4.0 * combined).max(1e-12);
    Ok(AxiomsReport {
        cells: partition.len(),
        total,
        whole: whole_prob,
        residual,
        tolerance,
        pass: residual <= tolerance,
        seed,
    })
}

/// Exact combinatorial validation that `partition` tiles `whole`: the box
/// endpoints cut each axis into elementary pieces (open gaps and singleton
/// points); every product cell is represented by one rational point, and
/// membership of that point decides membership of the whole cell. Cells
/// inside `whole` must be covered by exactly one partition box, cells
/// outside by none.
fn validate_partition(partition: &[BoxRegion], whole: &BoxRegion) -> Result<()> {
    let dim = whole.dim();
    let mut axis_reps: Vec<Vec<BigRational>> = Vec::with_capacity(dim);
    for d in 0..dim {
        let mut cuts: Vec<BigRational> = Vec::new();
        let mut push = |interval: &Interval| {
            for endpoint in [interval.lo(), interval.hi()].into_iter().flatten() {
                cuts.push(endpoint.clone());
            }
        };
        push(&whole.intervals()[d]);
        for b in partition {
            push(&b.intervals()[d]);
        }
        cuts.sort();
        cuts.dedup();

        let mut reps = Vec::with_capacity(2 * cuts.len() + 1);
        match cuts.first() {
            None => reps.push(BigRational::zero()),
            Some(first) => {
                reps.push(first - BigRational::one());
                for (pos, cut) in cuts.iter().enumerate() {
                    reps.push(cut.clone());
                    match cuts.get(pos + 1) {
                        Some(next) => {
                            reps.push((cut + next) / BigRational::from_integer(2.into()))
                        }
                        None => reps.push(cut + BigRational::one()),
                    }
                }
            }
        }
        axis_reps.push(reps);
    }

    let cell_count: usize = axis_reps.iter().map(Vec::len).product();
    if cell_count > 1_000_000 {
        return Err(Error::InvalidPartition(format!(
            "partition induces {cell_count} elementary cells; refusing to validate"
        )));
    }

    let mut point = vec![BigRational::zero(); dim];
    let mut index = vec![0usize; dim];
    loop {
        for d in 0..dim {
            point[d] = axis_reps[d][index[d]].clone();
        }
        let covering = partition.iter().filter(|b| b.contains(&point)).count();
        if whole.contains(&point) {
            if covering == 0 {
                return Err(Error::InvalidPartition(format!(
                    "gap: point ({}) lies in the whole box but in no partition cell",
                    render_point(&point)
                )));
            }
            if covering > 1 {
                return Err(Error::InvalidPartition(format!(
                    "overlap: point ({}) lies in {covering} partition cells",
                    render_point(&point)
                )));
            }
        } else if covering > 0 {
            return Err(Error::InvalidPartition(format!(
                "escape: point ({}) lies in a partition cell but outside the whole box",
                render_point(&point)
            )));
        }

        // odometer increment over the cell grid
        let mut d = 0;
        loop {
            if d == dim {
                return Ok(());
            }
            index[d] += 1;
            if index[d] < axis_reps[d].len() {
                break;
            }
            index[d] = 0;
            d += 1;
        }
    }
}

fn render_point(point: &[BigRational]) -> String {
    point
        .iter()
        .map(crate::rat::format_rational)
        .collect::<Vec<_>>()
        .join(", ")
}

/// The continuity witness `delta = a * sqrt(epsilon)`: whenever
/// `q(t) <= delta`, the cylinder probability of `{|chi(t)| >= a}` is at
/// most `epsilon`. Requires the measure to carry a certified seminorm.
/// The result is exact whenever `epsilon` is a square in the rationals.
pub fn continuity_witness(
    mu: &dyn CylinderMeasure,
    epsilon: &BigRational,
    a: &BigRational,
) -> Result<MomentValue> {
    if mu.seminorm().is_none() {
        return Err(Error::NoSeminorm);
    }
    if !epsilon.is_positive() || !a.is_positive() {
        return Err(Error::InvalidInput(
            "continuity witness needs epsilon > 0 and a > 0".into(),
        ));
    }
    Ok(match sqrt_exact(epsilon) {
        Some(root) => MomentValue::Exact(a * root),
        None => MomentValue::Real(rational_to_f64(a) * rational_to_f64(epsilon).sqrt()),
    })
}

/// The Chebyshev tail bound `L(t^2) / a^2` for a linear form `t`: the
/// cylinder probability of `{|chi(t)| >= a}` never exceeds it.
pub fn chebyshev_bound(
    l: &MomentFunctional,
    t: &Poly,
    a: &BigRational,
) -> Result<BigRational> {
    if !a.is_positive() {
        return Err(Error::InvalidInput("chebyshev bound needs a > 0".into()));
    }
    linear_coefficients(t)?;
    let second = eval_functional(l, &(t * t))?;
    if second.is_negative() {
        return Err(Error::NegativeEvenMoment {
            power: 2,
            value: crate::rat::format_rational(&second),
        });
    }
    Ok(second / (a * a))
}
