//! The fraction algebra obtained from the polynomial ring by inverting the
//! elements `1 + x_i^2`.
//!
//! A [`FracElement`] is `numerator / prod_i (1 + x_i^2)^(m_i)` in canonical
//! form: no factor `1 + x_i^2` divides the numerator exactly. Since
//! `1 + t^2 >= 1` on the reals, evaluation at any character is total, and
//! the generators `a_i = 1/(1+x_i^2)`, `b_i = x_i/(1+x_i^2)` are globally
//! bounded by 1 and 1/2. [`bound_certificate`] extends those two bounds to
//! arbitrary elements via per-variable factorization.

use crate::error::{Error, Result};
use crate::poly::{parse_poly_prefix, Monomial, Poly, VarIndex};
use crate::poly::Character;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Canonical rational function with denominator `prod (1 + x_i^2)^(m_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FracElement {
    numerator: Poly,
    denom_exponents: BTreeMap<VarIndex, u32>,
}

impl FracElement {
    /// Builds and canonicalizes `numerator / prod (1+x_i^2)^(m_i)`.
    pub fn new<I: IntoIterator<Item = (VarIndex, u32)>>(numerator: Poly, denom: I) -> Self {
        let mut exps: BTreeMap<VarIndex, u32> = BTreeMap::new();
        for (i, m) in denom {
            if m > 0 {
                *exps.entry(i).or_insert(0) += m;
            }
        }
        let mut elem = FracElement {
            numerator,
            denom_exponents: exps,
        };
        elem.canonicalize();
        elem
    }

    pub fn from_poly(p: Poly) -> Self {
        FracElement {
            numerator: p,
            denom_exponents: BTreeMap::new(),
        }
    }

    pub fn zero() -> Self {
        FracElement::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        FracElement::from_poly(Poly::one())
    }

    /// The bounded generator `a_i = 1 / (1 + x_i^2)`.
    pub fn a_generator(i: VarIndex) -> Self {
        FracElement::new(Poly::one(), [(i, 1)])
    }

    /// The bounded generator `b_i = x_i / (1 + x_i^2)`.
    pub fn b_generator(i: VarIndex) -> Self {
        FracElement::new(Poly::var(i), [(i, 1)])
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denom_exponents(&self) -> impl Iterator<Item = (VarIndex, u32)> + '_ {
        self.denom_exponents.iter().map(|(&i, &m)| (i, m))
    }

    pub fn is_polynomial(&self) -> bool {
        self.denom_exponents.is_empty()
    }

    /// The denominator expanded as a polynomial.
    pub fn denominator_poly(&self) -> Poly {
        let mut d = Poly::one();
        for (&i, &m) in &self.denom_exponents {
            d = &d * &one_plus_square(i).pow(m);
        }
        d
    }

    /// Divides out every factor `1 + x_i^2` common to numerator and
    /// denominator; a zero numerator clears the denominator entirely.
    fn canonicalize(&mut self) {
        if self.numerator.is_zero() {
            self.denom_exponents.clear();
            return;
        }
        let vars: Vec<VarIndex> = self.denom_exponents.keys().copied().collect();
        for i in vars {
            while self.denom_exponents.get(&i).copied().unwrap_or(0) > 0 {
                match divide_by_one_plus_square(&self.numerator, i) {
                    Some(quotient) => {
                        self.numerator = quotient;
                        let m = self.denom_exponents.get_mut(&i).unwrap();
                        *m -= 1;
                        if *m == 0 {
                            self.denom_exponents.remove(&i);
                        }
                    }
                    None => break,
                }
            }
        }
    }
}

/// `1 + x_i^2` as a polynomial.
pub fn one_plus_square(i: VarIndex) -> Poly {
    &Poly::one() + &Poly::term(Monomial::var_pow(i, 2), BigRational::one())
}

/// Exact division of `p` by `1 + x_i^2`, or `None` with nonzero remainder.
///
/// Long division in the single variable `x_i` over the ring of polynomials
/// in the remaining variables: coefficients are grouped by the exponent of
/// `x_i` and `x^d = x^(d-2) * (x^2 + 1) - x^(d-2)` peels the top term.
fn divide_by_one_plus_square(p: &Poly, i: VarIndex) -> Option<Poly> {
    let mut coeffs: BTreeMap<u32, Poly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let e = m.exponent(i);
        let rest = Monomial::from_pairs(m.exponents().filter(|&(v, _)| v != i));
        coeffs
            .entry(e)
            .or_insert_with(Poly::zero)
            .add_term(rest, c.clone());
    }
    coeffs.retain(|_, c| !c.is_zero());

    let mut quotient_coeffs: BTreeMap<u32, Poly> = BTreeMap::new();
    while let Some((&d, _)) = coeffs.iter().next_back() {
        if d < 2 {
            break;
        }
        let lead = coeffs.remove(&d).unwrap();
        let lower = coeffs.remove(&(d - 2)).unwrap_or_else(Poly::zero);
        let reduced = &lower - &lead;
        if !reduced.is_zero() {
            coeffs.insert(d - 2, reduced);
        }
        quotient_coeffs.insert(d - 2, lead);
    }
    if !coeffs.is_empty() {
        return None;
    }

    let mut quotient = Poly::zero();
    for (e, c) in quotient_coeffs {
        let xe = Poly::term(Monomial::var_pow(i, e), BigRational::one());
        quotient = &quotient + &(&xe * &c);
    }
    Some(quotient)
}

/// Exact product with re-canonicalization.
pub fn frac_mul(u: &FracElement, v: &FracElement) -> FracElement {
    let numerator = &u.numerator * &v.numerator;
    let denom = u
        .denom_exponents()
        .chain(v.denom_exponents())
        .collect::<Vec<_>>();
    FracElement::new(numerator, denom)
}

/// Exact sum over the least common denominator, re-canonicalized.
pub fn frac_add(u: &FracElement, v: &FracElement) -> FracElement {
    let mut common: BTreeMap<VarIndex, u32> = u.denom_exponents.clone();
    for (i, m) in v.denom_exponents() {
        let entry = common.entry(i).or_insert(0);
        *entry = (*entry).max(m);
    }
    let lift = |w: &FracElement| {
        let mut n = w.numerator.clone();
        for (&i, &m) in &common {
            let have = w.denom_exponents.get(&i).copied().unwrap_or(0);
            if m > have {
                n = &n * &one_plus_square(i).pow(m - have);
            }
        }
        n
    };
    FracElement::new(&lift(u) + &lift(v), common)
}

/// Point evaluation; always defined because `1 + t^2 >= 1`.
pub fn frac_eval(u: &FracElement, chi: &Character) -> BigRational {
    let numerator = u.numerator.evaluate(chi);
    let mut denominator = BigRational::one();
    for (i, m) in u.denom_exponents() {
        let t = chi.value(i);
        let factor = BigRational::one() + &t * &t;
        denominator *= num_traits::pow::pow(factor, m as usize);
    }
    numerator / denominator
}

impl Mul for &FracElement {
    type Output = FracElement;
    fn mul(self, rhs: &FracElement) -> FracElement {
        frac_mul(self, rhs)
    }
}

impl Add for &FracElement {
    type Output = FracElement;
    fn add(self, rhs: &FracElement) -> FracElement {
        frac_add(self, rhs)
    }
}

impl Sub for &FracElement {
    type Output = FracElement;
    fn sub(self, rhs: &FracElement) -> FracElement {
        frac_add(self, &-rhs)
    }
}

impl Neg for &FracElement {
    type Output = FracElement;
    fn neg(self) -> FracElement {
        FracElement {
            numerator: -&self.numerator,
            denom_exponents: self.denom_exponents.clone(),
        }
    }
}

/// The image of a point `t` under the bounded transform: `a = 1/(1+t^2)`
/// and `b = t/(1+t^2)`, which land on the circle `(a-1/2)^2 + b^2 = 1/4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedPair {
    pub a: BigRational,
    pub b: BigRational,
}

impl BoundedPair {
    /// `(a - 1/2)^2 + b^2 - 1/4`, exactly zero for transformed points.
    pub fn circle_residual(&self) -> BigRational {
        let half = BigRational::new(1.into(), 2.into());
        let quarter = BigRational::new(1.into(), 4.into());
        let da = &self.a - half;
        &da * &da + &self.b * &self.b - quarter
    }
}

pub fn bounded_transform(t: &BigRational) -> BoundedPair {
    let denom = BigRational::one() + t * t;
    BoundedPair {
        a: denom.recip(),
        b: t / denom,
    }
}

/// Outcome of [`bound_certificate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundCertificate {
    /// Certified sup bound over all real characters (not tight in general).
    Bounded(BigRational),
    /// Some numerator term outgrows the denominator in this variable.
    Unbounded { var: VarIndex },
}

/// Certifies a sup bound for `|u|` over all of character space.
///
/// Each term factors per variable as `x^j / (1+x^2)^m` with `j` the
/// numerator exponent and `m` the denominator multiplicity. For `j <= 2m`
/// this factor is at most 1, and at most 1/2 when `j` is odd (one factor
/// `x/(1+x^2)` splits off). Term bounds are the products of these factors
/// times `|coefficient|` and add up by the triangle inequality. If some
/// variable has `j > 2m` the term grows without bound along that axis.
pub fn bound_certificate(u: &FracElement) -> BoundCertificate {
    let mut total = BigRational::zero();
    let half = BigRational::new(1.into(), 2.into());
    for (mono, coef) in u.numerator.terms() {
        let mut term_bound = coef.abs();
        for (var, j) in mono.exponents() {
            let m = u.denom_exponents.get(&var).copied().unwrap_or(0);
            if u64::from(j) > 2 * u64::from(m) {
                return BoundCertificate::Unbounded { var };
            }
            if j % 2 == 1 {
                term_bound *= &half;
            }
        }
        total += term_bound;
    }
    BoundCertificate::Bounded(total)
}

impl fmt::Display for FracElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.numerator)?;
        if self.denom_exponents.is_empty() {
            return Ok(());
        }
        write!(f, " / ")?;
        for (pos, (&i, &m)) in self.denom_exponents.iter().enumerate() {
            if pos > 0 {
                write!(f, "*")?;
            }
            write!(f, "(1+x{}^2)", i.get())?;
            if m > 1 {
                write!(f, "^{m}")?;
            }
        }
        Ok(())
    }
}

/// Parses the text form `P / (1+x1^2)^2*(1+x3^2)`; the denominator part is
/// optional and `P` uses the polynomial grammar.
pub fn parse_frac(text: &str) -> Result<FracElement> {
    let (numerator, consumed) = parse_poly_prefix(text)?;
    let mut rest = text[consumed..].trim_start();
    let mut offset = text.len() - rest.len();
    if rest.is_empty() {
        return Ok(FracElement::from_poly(numerator));
    }
    if !rest.starts_with('/') {
        return Err(Error::Syntax {
            offset,
            message: "expected '/' before the denominator".into(),
        });
    }
    rest = rest[1..].trim_start();
    offset = text.len() - rest.len();

    let mut denom: Vec<(VarIndex, u32)> = Vec::new();
    loop {
        let (var, mult, len) = parse_denom_factor(rest, offset)?;
        denom.push((var, mult));
        rest = rest[len..].trim_start();
        offset = text.len() - rest.len();
        if let Some(stripped) = rest.strip_prefix('*') {
            rest = stripped.trim_start();
            offset = text.len() - rest.len();
        } else {
            break;
        }
    }
    if !rest.is_empty() {
        return Err(Error::Syntax {
            offset,
            message: "unexpected input after the denominator".into(),
        });
    }
    Ok(FracElement::new(numerator, denom))
}

/// One factor `(1+xK^2)` or `(1+xK^2)^M`; returns consumed byte length.
fn parse_denom_factor(text: &str, base_offset: usize) -> Result<(VarIndex, u32, usize)> {
    let syntax = |rel: usize, message: &str| Error::Syntax {
        offset: base_offset + rel,
        message: message.into(),
    };
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let expect = |pos: &mut usize, token: &str| -> Result<()> {
        while matches!(bytes.get(*pos), Some(b) if b.is_ascii_whitespace()) {
            *pos += 1;
        }
        if text[*pos..].starts_with(token) {
            *pos += token.len();
            Ok(())
        } else {
            Err(syntax(*pos, &format!("expected {token:?} in denominator")))
        }
    };
    expect(&mut pos, "(")?;
    expect(&mut pos, "1")?;
    expect(&mut pos, "+")?;
    expect(&mut pos, "x")?;
    let digits_start = pos;
    while matches!(bytes.get(pos), Some(b'0'..=b'9')) {
        pos += 1;
    }
    if pos == digits_start {
        return Err(syntax(pos, "expected a variable index"));
    }
    let index: u32 = text[digits_start..pos]
        .parse()
        .map_err(|_| syntax(digits_start, "variable index too large"))?;
    if index == 0 {
        return Err(Error::ZeroVariableIndex {
            offset: base_offset + digits_start,
        });
    }
    expect(&mut pos, "^")?;
    expect(&mut pos, "2")?;
    expect(&mut pos, ")")?;

    let mut mult = 1u32;
    let before_power = pos;
    let mut probe = pos;
    while matches!(bytes.get(probe), Some(b) if b.is_ascii_whitespace()) {
        probe += 1;
    }
    if bytes.get(probe) == Some(&b'^') {
        probe += 1;
        while matches!(bytes.get(probe), Some(b) if b.is_ascii_whitespace()) {
            probe += 1;
        }
        let digits_start = probe;
        while matches!(bytes.get(probe), Some(b'0'..=b'9')) {
            probe += 1;
        }
        if probe == digits_start {
            return Err(syntax(digits_start, "expected a denominator exponent"));
        }
        mult = text[digits_start..probe]
            .parse()
            .map_err(|_| Error::ExponentOverflow {
                offset: base_offset + digits_start,
            })?;
        pos = probe;
    } else {
        pos = before_power;
    }
    Ok((VarIndex::new(index), mult, pos))
}
