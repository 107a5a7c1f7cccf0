//! Exact Gaussian monomial moments via the Isserlis pairing formula.
//!
//! Two independent evaluators are kept on purpose. [`wick_moment`] runs the
//! recursion `E[x_i m] = sum_j e_j(m) C_ij E[m / x_j]` with memoization;
//! [`wick_moment_enumeration`] literally enumerates perfect matchings of the
//! degree-many symbols and sums covariance products. Tests require them to
//! agree exactly, so neither may be expressed through the other.

use crate::error::{Error, Result};
use crate::linalg::is_symmetric;
use crate::poly::{Monomial, VarIndex};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::HashMap;

/// Default total-degree cap: degree 16 already means 15!! = 2,027,025
/// matchings per moment in the enumeration oracle.
pub const DEFAULT_WICK_CAP: u64 = 16;

/// Symmetric covariance block over an explicit sorted variable list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovMatrix {
    vars: Vec<VarIndex>,
    entries: Vec<Vec<BigRational>>,
}

impl CovMatrix {
    pub fn new(vars: Vec<VarIndex>, entries: Vec<Vec<BigRational>>) -> Result<Self> {
        if vars.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "covariance variables must be strictly increasing".into(),
            ));
        }
        if entries.len() != vars.len() || !is_symmetric(&entries) {
            return Err(Error::DimensionMismatch(format!(
                "covariance block must be a symmetric {n}x{n} matrix",
                n = vars.len()
            )));
        }
        Ok(CovMatrix { vars, entries })
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[VarIndex] {
        &self.vars
    }

    pub fn entries(&self) -> &[Vec<BigRational>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i][j]
    }

    pub fn position(&self, v: VarIndex) -> Option<usize> {
        self.vars.binary_search(&v).ok()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim()).all(|i| (0..i).all(|j| self.entries[i][j].is_zero()))
    }

    /// Exponents of `alpha` in matrix position order; errors when `alpha`
    /// mentions a variable outside this block.
    fn exponent_vector(&self, alpha: &Monomial) -> Result<Vec<u32>> {
        let mut exps = vec![0u32; self.dim()];
        for (v, e) in alpha.exponents() {
            let pos = self
                .position(v)
                .ok_or(Error::MonomialOutsideIndexSet(v.get()))?;
            exps[pos] = e;
        }
        Ok(exps)
    }
}

fn check_cap(alpha: &Monomial, cap: u64) -> Result<()> {
    let degree = alpha.degree();
    if degree > cap {
        return Err(Error::WickCapExceeded { degree, cap });
    }
    Ok(())
}

/// `E[x^alpha]` under `N(0, C)` by the memoized pairing recursion, with the
/// default degree cap.
pub fn wick_moment(cov: &CovMatrix, alpha: &Monomial) -> Result<BigRational> {
    wick_moment_capped(cov, alpha, DEFAULT_WICK_CAP)
}

pub fn wick_moment_capped(cov: &CovMatrix, alpha: &Monomial, cap: u64) -> Result<BigRational> {
    check_cap(alpha, cap)?;
    let mut exps = cov.exponent_vector(alpha)?;
    let mut memo = HashMap::new();
    Ok(recurse(&mut exps, cov, &mut memo))
}

/// Peels one factor `x_i` off the monomial and pairs it with every remaining
/// symbol; odd-degree moments bottom out at the empty sum.
fn recurse(
    exps: &mut Vec<u32>,
    cov: &CovMatrix,
    memo: &mut HashMap<Vec<u32>, BigRational>,
) -> BigRational {
    let Some(i) = exps.iter().position(|&e| e > 0) else {
        return BigRational::one();
    };
    if let Some(hit) = memo.get(exps) {
        return hit.clone();
    }
    let key = exps.clone();
    exps[i] -= 1;
    let mut acc = BigRational::zero();
    for j in 0..exps.len() {
        if exps[j] == 0 || cov.entry(i, j).is_zero() {
            continue;
        }
        let multiplicity = BigRational::from_integer(exps[j].into());
        exps[j] -= 1;
        acc += multiplicity * cov.entry(i, j) * recurse(exps, cov, memo);
        exps[j] += 1;
    }
    exps[i] += 1;
    memo.insert(key, acc.clone());
    acc
}

/// `E[x^alpha]` by explicit perfect-matching enumeration; the independent
/// oracle for the recursion above. Same degree cap.
pub fn wick_moment_enumeration(cov: &CovMatrix, alpha: &Monomial) -> Result<BigRational> {
    check_cap(alpha, DEFAULT_WICK_CAP)?;
    let exps = cov.exponent_vector(alpha)?;
    let mut symbols = Vec::new();
    for (pos, &e) in exps.iter().enumerate() {
        symbols.extend(std::iter::repeat_n(pos, e as usize));
    }
    if symbols.len() % 2 == 1 {
        return Ok(BigRational::zero());
    }
    Ok(match_sum(&mut symbols, cov))
}

fn match_sum(symbols: &mut Vec<usize>, cov: &CovMatrix) -> BigRational {
    if symbols.is_empty() {
        return BigRational::one();
    }
    let first = symbols.remove(0);
    let mut acc = BigRational::zero();
    for k in 0..symbols.len() {
        let partner = symbols.remove(k);
        let c = cov.entry(first, partner);
        if !c.is_zero() {
            acc += c * match_sum(symbols, cov);
        }
        symbols.insert(k, partner);
    }
    symbols.insert(0, first);
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::var;
    use crate::rat::{big_int, big_rational};

    fn diag_one() -> CovMatrix {
        CovMatrix::new(vec![var(1)], vec![vec![big_int(1)]]).unwrap()
    }

    #[test]
    fn fourth_moment_counts_three_matchings() {
        let alpha = Monomial::var_pow(var(1), 4);
        assert_eq!(wick_moment(&diag_one(), &alpha).unwrap(), big_int(3));
        assert_eq!(
            wick_moment_enumeration(&diag_one(), &alpha).unwrap(),
            big_int(3)
        );
    }

    #[test]
    fn odd_degree_vanishes() {
        let c = CovMatrix::new(
            vec![var(1), var(2)],
            vec![
                vec![big_int(2), big_rational(1, 3)],
                vec![big_rational(1, 3), big_int(1)],
            ],
        )
        .unwrap();
        let alpha = Monomial::from_pairs([(var(1), 2), (var(2), 1)]);
        assert!(wick_moment(&c, &alpha).unwrap().is_zero());
        assert!(wick_moment_enumeration(&c, &alpha).unwrap().is_zero());
    }

    #[test]
    fn quartic_cross_moment_is_the_three_pair_products() {
        // E[x1 x2 x3 x4] = C12 C34 + C13 C24 + C14 C23
        let c = |i: usize, j: usize| big_rational((i * j) as i64, 7);
        let entries: Vec<Vec<_>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| if i == j { big_int(3) } else { c(i + 1, j + 1) })
                    .collect()
            })
            .collect();
        let cov = CovMatrix::new(vec![var(1), var(2), var(3), var(4)], entries).unwrap();
        let alpha = Monomial::from_pairs([(var(1), 1), (var(2), 1), (var(3), 1), (var(4), 1)]);
        let expected = &c(1, 2) * &c(3, 4) + &c(1, 3) * &c(2, 4) + &c(1, 4) * &c(2, 3);
        assert_eq!(wick_moment(&cov, &alpha).unwrap(), expected);
        assert_eq!(wick_moment_enumeration(&cov, &alpha).unwrap(), expected);
    }

    #[test]
    fn degree_cap_is_enforced() {
        let alpha = Monomial::var_pow(var(1), 18);
        match wick_moment(&diag_one(), &alpha) {
            Err(Error::WickCapExceeded { degree: 18, cap: 16 }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
        assert_eq!(
            wick_moment_capped(&diag_one(), &Monomial::var_pow(var(1), 6), 6).unwrap(),
            big_int(15)
        );
    }

    #[test]
    fn variables_outside_the_block_are_rejected() {
        let alpha = Monomial::var(var(9));
        match wick_moment(&diag_one(), &alpha) {
            Err(Error::MonomialOutsideIndexSet(9)) => {}
            other => panic!("expected index error, got {other:?}"),
        }
    }

    #[test]
    fn block_diagonal_moments_factor() {
        // cov = diag blocks {1} and {2}: E[x1^2 x2^4] = E[x1^2] E[x2^4]
        let cov = CovMatrix::new(
            vec![var(1), var(2)],
            vec![
                vec![big_rational(1, 2), big_int(0)],
                vec![big_int(0), big_int(2)],
            ],
        )
        .unwrap();
        let alpha = Monomial::from_pairs([(var(1), 2), (var(2), 4)]);
        let expected = big_rational(1, 2) * big_int(3) * big_int(4); // (1/2) * 3*2^2
        assert_eq!(wick_moment(&cov, &alpha).unwrap(), expected);
    }
}
