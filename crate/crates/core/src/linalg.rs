//! Exact rational LDL^T factorization, shared by the covariance validator,
//! the Gaussian sampler and the Hankel positive-definiteness check.

use num_rational::BigRational;
use num_traits::Zero;

/// Unit lower-triangular factor and pivot diagonal of `M = L D L^T`.
/// `lower[i]` stores the strict part of row `i` (length `i`).
#[derive(Debug)]
pub(crate) struct Ldlt {
    pub lower: Vec<Vec<BigRational>>,
    pub diag: Vec<BigRational>,
}

impl Ldlt {
    /// Exact solve of `M x = rhs` via forward, diagonal and back substitution.
    pub fn solve(&self, rhs: &[BigRational]) -> Vec<BigRational> {
        let n = self.diag.len();
        let mut x = rhs.to_vec();
        for i in 0..n {
            for k in 0..i {
                let sub = &self.lower[i][k] * &x[k];
                x[i] -= sub;
            }
        }
        for (xi, d) in x.iter_mut().zip(&self.diag) {
            *xi /= d;
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let sub = &self.lower[k][i] * &x[k];
                x[i] -= sub;
            }
        }
        x
    }
}

/// Non-pivoting LDL^T requiring every pivot to be strictly positive, which
/// holds exactly when all leading principal minors are positive. Returns the
/// offending `(step, pivot)` otherwise.
pub(crate) fn ldlt_strict(m: &[Vec<BigRational>]) -> Result<Ldlt, (usize, BigRational)> {
    let n = m.len();
    let mut lower: Vec<Vec<BigRational>> = (0..n).map(|i| vec![BigRational::zero(); i]).collect();
    let mut diag: Vec<BigRational> = Vec::with_capacity(n);
    for j in 0..n {
        let mut d = m[j][j].clone();
        for k in 0..j {
            d -= &lower[j][k] * &lower[j][k] * &diag[k];
        }
        if d <= BigRational::zero() {
            return Err((j, d));
        }
        for i in (j + 1)..n {
            let mut v = m[i][j].clone();
            for k in 0..j {
                v -= &lower[i][k] * &lower[j][k] * &diag[k];
            }
            lower[i][j] = v / &d;
        }
        diag.push(d);
    }
    Ok(Ldlt { lower, diag })
}

pub(crate) fn is_symmetric(m: &[Vec<BigRational>]) -> bool {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return false;
    }
    for (i, row) in m.iter().enumerate() {
        for (j, value) in row.iter().enumerate().take(i) {
            if value != &m[j][i] {
                return false;
            }
        }
    }
    true
}

/// `v^T M v`, exact.
pub(crate) fn quadratic_form(m: &[Vec<BigRational>], v: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for (j, vj) in v.iter().enumerate() {
            if !vj.is_zero() {
                acc += vi * vj * &m[i][j];
            }
        }
    }
    acc
}
