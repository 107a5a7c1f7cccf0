//! Small atomic representing measures on the line, recovered from a moment
//! vector by the moment-determinant three-term recurrence and a Jacobi
//! eigen-decomposition.

use crate::error::{Error, Result};
use crate::linalg::ldlt_strict;
use crate::measures::{BoxRegion, Estimate, FiniteMeasure, IndexSet, MomentValue};
use crate::poly::{Monomial, VarIndex};
use crate::rat::{format_rational, rational_to_f64};
use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Finitely many weighted point masses on the line, weights positive and
/// summing to one, atoms sorted by node.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<(f64, f64)>,
}

impl AtomicMeasure {
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput(
                "atomic measure needs at least one atom".into(),
            ));
        }
        for &(node, weight) in &atoms {
            if !node.is_finite() || !weight.is_finite() || weight <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "atom ({node}, {weight}) must have a finite node and positive weight"
                )));
            }
        }
        let total: f64 = atoms.iter().map(|&(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "atom weights sum to {total}, expected 1"
            )));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(AtomicMeasure { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `sum_i w_i x_i^e`.
    pub fn moment_power(&self, e: u32) -> f64 {
        self.atoms
            .iter()
            .map(|&(node, weight)| weight * node.powi(e as i32))
            .sum()
    }

    /// Places the measure on the coordinate of one variable so it can be
    /// compared against marginals and functionals.
    pub fn over(&self, v: VarIndex) -> AtomicMarginal {
        AtomicMarginal {
            indices: IndexSet::new([v]).expect("a single index is nonempty"),
            var: v,
            measure: self.clone(),
        }
    }
}

/// An [`AtomicMeasure`] viewed as the marginal on one variable.
#[derive(Debug, Clone)]
pub struct AtomicMarginal {
    indices: IndexSet,
    var: VarIndex,
    measure: AtomicMeasure,
}

impl AtomicMarginal {
    pub fn measure(&self) -> &AtomicMeasure {
        &self.measure
    }
}

impl FiniteMeasure for AtomicMarginal {
    fn indices(&self) -> &IndexSet {
        &self.indices
    }

    fn moment(&self, alpha: &Monomial) -> Result<MomentValue> {
        self.indices.covers(alpha)?;
        Ok(MomentValue::Real(
            self.measure.moment_power(alpha.exponent(self.var)),
        ))
    }

    fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        if count == 0 {
            return Err(Error::InvalidInput("sample count must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut chosen = self.measure.atoms().last().expect("nonempty").0;
            for &(node, weight) in self.measure.atoms() {
                acc += weight;
                if u < acc {
                    chosen = node;
                    break;
                }
            }
            out.push(vec![chosen]);
        }
        Ok(out)
    }

    fn box_prob(&self, base: &BoxRegion) -> Result<Estimate> {
        if base.dim() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "box has {} coordinates, atomic marginal has 1",
                base.dim()
            )));
        }
        let p = self
            .measure
            .atoms()
            .iter()
            .filter(|&&(node, _)| base.contains_f64(&[node]))
            .map(|&(_, weight)| weight)
            .sum();
        Ok(Estimate::exact(p))
    }
}

/// Gauss quadrature from the moment vector `m_0..m_{2n-1}`: an `n`-atom
/// measure reproducing every input moment. The moments must be normalized
/// and their `n x n` Hankel matrix positive definite; the three-term
/// recurrence runs in exact rationals and only the final Jacobi
/// eigen-decomposition uses floats.
pub fn quadrature_1d(m: &[BigRational], n: usize) -> Result<AtomicMeasure> {
    if n == 0 || m.len() != 2 * n {
        return Err(Error::BadMomentCount(m.len()));
    }
    if !m[0].is_one() {
        return Err(Error::TableNotNormalized);
    }

    let hankel: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| m[i + j].clone()).collect())
        .collect();
    if let Err((step, pivot)) = ldlt_strict(&hankel) {
        return Err(Error::HankelNotPositiveDefinite {
            step,
            pivot: format_rational(&pivot),
        });
    }

    // recurrence coefficients a_k, b_k of the monic orthogonal polynomials,
    // from the moment-determinant recursion on sigma_{k,l}
    let mut a: Vec<BigRational> = vec![&m[1] / &m[0]];
    let mut b: Vec<BigRational> = vec![BigRational::zero()];
    let mut sigma_prev = vec![BigRational::zero(); 2 * n];
    let mut sigma_cur = m.to_vec();
    for k in 1..n {
        let mut sigma_next = vec![BigRational::zero(); 2 * n];
        for l in k..=(2 * n - 1 - k) {
            sigma_next[l] =
                &sigma_cur[l + 1] - &a[k - 1] * &sigma_cur[l] - &b[k - 1] * &sigma_prev[l];
        }
        let b_k = &sigma_next[k] / &sigma_cur[k - 1];
        if !b_k.is_positive() {
            return Err(Error::InvalidInput(format!(
                "recurrence coefficient b_{k} = {} is not positive; the moment data is degenerate",
                format_rational(&b_k)
            )));
        }
        let a_k = &sigma_next[k + 1] / &sigma_next[k] - &sigma_cur[k] / &sigma_cur[k - 1];
        a.push(a_k);
        b.push(b_k);
        sigma_prev = sigma_cur;
        sigma_cur = sigma_next;
    }

    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            rational_to_f64(&a[i])
        } else if j == i + 1 || i == j + 1 {
            rational_to_f64(&b[i.max(j)]).sqrt()
        } else {
            0.0
        }
    });
    let eigen = SymmetricEigen::try_new(jacobi, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::InvalidInput("Jacobi eigen-decomposition did not converge".into()))?;

    let mut atoms: Vec<(f64, f64)> = (0..n)
        .map(|i| (eigen.eigenvalues[i], eigen.eigenvectors[(0, i)].powi(2)))
        .collect();
    atoms.sort_by(|x, y| x.0.total_cmp(&y.0));
    for pair in atoms.windows(2) {
        if (pair[1].0 - pair[0].0).abs() < 1e-9 {
            return Err(Error::NodesTooClose(pair[0].0, pair[1].0));
        }
    }
    let measure = AtomicMeasure::new(atoms)?;

    // the Gauss rule must reproduce every input moment
    for (l, want) in m.iter().enumerate() {
        let want = rational_to_f64(want);
        let got = measure.moment_power(l as u32);
        if (got - want).abs() > 1e-10 * want.abs().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "quadrature failed to reproduce m_{l}: got {got}, want {want}"
            )));
        }
    }
    Ok(measure)
}
