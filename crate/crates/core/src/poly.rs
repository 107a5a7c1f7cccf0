//! Exact sparse polynomial arithmetic in countably many variables.
//!
//! A [`Poly`] is a finite map from monomials to nonzero `BigRational`
//! coefficients; the variables `x1, x2, ...` are indexed by [`VarIndex`]
//! (1-based). The empty term map is the zero polynomial and the unit
//! monomial carries constants, so the type is the polynomial ring
//! `Q[x1, x2, ...]` with no a-priori bound on the number of variables.
//!
//! Canonical text form: terms in descending graded-lexicographic order
//! (total degree first, then lower-indexed variables dominate), e.g.
//! `3/2*x1^2*x3 - x2 + 1`. [`parse_poly`] inverts [`Poly`]'s `Display`.

use crate::error::{Error, Result};
use crate::rat::format_rational;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// 1-based index of a basis variable `x_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarIndex(u32);

impl VarIndex {
    /// Panics if `index` is 0; indices are 1-based.
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "variable indices are 1-based");
        VarIndex(index)
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for VarIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Shorthand for `VarIndex::new`.
pub fn var(index: u32) -> VarIndex {
    VarIndex::new(index)
}

/// A power product `x1^e1 * x2^e2 * ...` with finitely many nonzero
/// exponents. The empty map is the unit monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: BTreeMap<VarIndex, u32>,
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial::default()
    }

    pub fn var(index: VarIndex) -> Self {
        Monomial::var_pow(index, 1)
    }

    pub fn var_pow(index: VarIndex, exp: u32) -> Self {
        let mut exps = BTreeMap::new();
        if exp > 0 {
            exps.insert(index, exp);
        }
        Monomial { exps }
    }

    /// Builds a monomial from `(index, exponent)` pairs; repeated indices
    /// accumulate and zero exponents are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (VarIndex, u32)>>(pairs: I) -> Self {
        let mut m = Monomial::unit();
        for (i, e) in pairs {
            m.bump(i, e);
        }
        m
    }

    fn bump(&mut self, index: VarIndex, exp: u32) {
        if exp == 0 {
            return;
        }
        let entry = self.exps.entry(index).or_insert(0);
        *entry = entry.checked_add(exp).expect("monomial exponent overflow");
    }

    pub fn exponent(&self, index: VarIndex) -> u32 {
        self.exps.get(&index).copied().unwrap_or(0)
    }

    pub fn is_unit(&self) -> bool {
        self.exps.is_empty()
    }

    /// Total degree (sum of exponents).
    pub fn degree(&self) -> u64 {
        self.exps.values().map(|&e| e as u64).sum()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarIndex> + '_ {
        self.exps.keys().copied()
    }

    pub fn exponents(&self) -> impl Iterator<Item = (VarIndex, u32)> + '_ {
        self.exps.iter().map(|(&i, &e)| (i, e))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (&i, &e) in &other.exps {
            out.bump(i, e);
        }
        out
    }

    /// Removes one power of `index`, or `None` if absent.
    pub fn div_var(&self, index: VarIndex) -> Option<Monomial> {
        let e = *self.exps.get(&index)?;
        let mut out = self.clone();
        if e == 1 {
            out.exps.remove(&index);
        } else {
            out.exps.insert(index, e - 1);
        }
        Some(out)
    }

    /// Grammar form used as a table key: `x1^2*x3`, empty string for the unit.
    pub fn key(&self) -> String {
        let mut parts = Vec::with_capacity(self.exps.len());
        for (&i, &e) in &self.exps {
            if e == 1 {
                parts.push(format!("x{}", i.get()));
            } else {
                parts.push(format!("x{}^{}", i.get(), e));
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            write!(f, "1")
        } else {
            write!(f, "{}", self.key())
        }
    }
}

/// Graded lexicographic order: total degree first; among equal degrees the
/// monomial with the larger exponent at the earliest differing variable is
/// greater, so `x1^2 > x1*x2 > x2^2`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let by_degree = self.degree().cmp(&other.degree());
        if by_degree != Ordering::Equal {
            return by_degree;
        }
        let mut a = self.exps.iter();
        let mut b = other.exps.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((ia, ea)), Some((ib, eb))) => match ia.cmp(ib) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with exact rational coefficients; stored coefficients
/// are never zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::unit(), c);
        p
    }

    pub fn var(index: VarIndex) -> Self {
        Poly::term(Monomial::var(index), BigRational::one())
    }

    pub fn term(monomial: Monomial, coef: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(monomial, coef);
        p
    }

    /// Adds `coef * monomial`, removing the entry if the sum cancels.
    pub fn add_term(&mut self, monomial: Monomial, coef: BigRational) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(monomial) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + coef;
                if sum.is_zero() {
                    o.remove();
                } else {
                    o.insert(sum);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, monomial: &Monomial) -> BigRational {
        self.terms.get(monomial).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Variables occurring with nonzero exponent in some term.
    pub fn support(&self) -> BTreeSet<VarIndex> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    /// Total degree; `None` is the minus-infinity marker of the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, q)| (m.clone(), q * c))
                .collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Point evaluation: extends the character multiplicatively, with
    /// unmentioned variables at 0.
    pub fn evaluate(&self, chi: &Character) -> BigRational {
        let mut total = BigRational::zero();
        'terms: for (m, coef) in &self.terms {
            let mut value = coef.clone();
            for (i, e) in m.exponents() {
                let x = chi.value(i);
                if x.is_zero() {
                    continue 'terms;
                }
                value *= num_traits::pow::pow(x, e as usize);
            }
            total += value;
        }
        total
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (pos, (m, coef)) in self.terms.iter().rev().enumerate() {
            let negative = coef.is_negative();
            if pos == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = coef.abs();
            if m.is_unit() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", m.key())?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), m.key())?;
            }
        }
        Ok(())
    }
}

/// All monomials over `vars` with total degree at most `max_degree`, in
/// ascending degree and descending graded-lex within each degree block:
/// `1, x1, x2, x1^2, x1*x2, x2^2, ...`. This is the canonical moment-matrix
/// basis; the degree-`d` basis is a prefix of the degree-`d+1` basis.
pub fn monomials_up_to(vars: &[VarIndex], max_degree: u64) -> Vec<Monomial> {
    fn fill(
        vars: &[VarIndex],
        degree_left: u32,
        prefix: &mut Vec<(VarIndex, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        match vars {
            [] => {
                if degree_left == 0 {
                    out.push(Monomial::from_pairs(prefix.iter().copied()));
                }
            }
            [first, rest @ ..] => {
                for e in (0..=degree_left).rev() {
                    prefix.push((*first, e));
                    fill(rest, degree_left - e, prefix, out);
                    prefix.pop();
                }
            }
        }
    }

    let max_degree = u32::try_from(max_degree).expect("basis degree fits in u32");
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(vars.len());
    for d in 0..=max_degree {
        fill(vars, d, &mut prefix, &mut out);
    }
    out
}

/// A finitely supported point of character space: variables outside the map
/// evaluate to 0, and the unit always evaluates to 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Character {
    values: BTreeMap<VarIndex, BigRational>,
}

impl Character {
    pub fn new<I: IntoIterator<Item = (VarIndex, BigRational)>>(values: I) -> Self {
        Character {
            values: values.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn value(&self, index: VarIndex) -> BigRational {
        self.values.get(&index).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn set(&mut self, index: VarIndex, value: BigRational) {
        if value.is_zero() {
            self.values.remove(&index);
        } else {
            self.values.insert(index, value);
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parses the full input as a polynomial; trailing garbage is a syntax error.
pub fn parse_poly(text: &str) -> Result<Poly> {
    let (poly, consumed) = parse_poly_prefix(text)?;
    let rest = text[consumed..].trim_start();
    if !rest.is_empty() {
        return Err(Error::Syntax {
            offset: text.len() - rest.len(),
            message: format!("unexpected input starting with {:?}", first_char(rest)),
        });
    }
    Ok(poly)
}

/// Parses the longest polynomial prefix of `text`; returns the byte offset
/// just past the consumed input. Used for the fraction text form, where a
/// polynomial numerator is followed by `/ (1+xK^2)...`.
pub fn parse_poly_prefix(text: &str) -> Result<(Poly, usize)> {
    let mut cur = Cursor::new(text);
    let mut poly = Poly::zero();
    cur.skip_ws();
    let mut sign = match cur.peek() {
        Some(b'-') => {
            cur.advance();
            -1
        }
        Some(b'+') => {
            cur.advance();
            1
        }
        _ => 1,
    };
    loop {
        let (monomial, coef) = parse_term(&mut cur)?;
        let signed = if sign < 0 { -coef } else { coef };
        poly.add_term(monomial, signed);
        let after_term = cur.pos;
        cur.skip_ws();
        match cur.peek() {
            Some(b'+') => {
                cur.advance();
                sign = 1;
            }
            Some(b'-') => {
                cur.advance();
                sign = -1;
            }
            _ => return Ok((poly, after_term)),
        }
    }
}

/// Parses a single monomial in grammar form; the empty string is the unit.
pub fn parse_monomial(text: &str) -> Result<Monomial> {
    if text.trim().is_empty() {
        return Ok(Monomial::unit());
    }
    let poly = parse_poly(text)?;
    let mut terms = poly.terms();
    match (terms.next(), terms.next()) {
        (Some((m, c)), None) if c.is_one() => Ok(m.clone()),
        _ => Err(Error::InvalidInput(format!(
            "expected a single monomial with coefficient 1, got {poly}"
        ))),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn advance(&mut self) {
        self.pos += 1;
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.advance();
        }
    }

    fn syntax(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }
}

/// term := coef { '*' factor } | factor { '*' factor }
fn parse_term(cur: &mut Cursor) -> Result<(Monomial, BigRational)> {
    cur.skip_ws();
    let coef = match cur.peek() {
        Some(b'(') | Some(b'0'..=b'9') => Some(parse_coef(cur)?),
        Some(b'x') => None,
        _ => {
            return Err(cur.syntax("expected a coefficient or variable"));
        }
    };
    let mut exps: BTreeMap<VarIndex, u32> = BTreeMap::new();
    if coef.is_none() {
        let (i, e) = parse_factor(cur)?;
        merge_factor(cur, &mut exps, i, e)?;
    }
    loop {
        let before = cur.pos;
        cur.skip_ws();
        if cur.peek() == Some(b'*') {
            cur.advance();
            let (i, e) = parse_factor(cur)?;
            merge_factor(cur, &mut exps, i, e)?;
        } else {
            cur.pos = before;
            break;
        }
    }
    let monomial = Monomial::from_pairs(exps);
    Ok((monomial, coef.unwrap_or_else(BigRational::one)))
}

fn merge_factor(
    cur: &Cursor,
    exps: &mut BTreeMap<VarIndex, u32>,
    index: VarIndex,
    exp: u32,
) -> Result<()> {
    let entry = exps.entry(index).or_insert(0);
    *entry = entry
        .checked_add(exp)
        .ok_or(Error::ExponentOverflow { offset: cur.pos })?;
    Ok(())
}

/// factor := 'x' uint [ '^' uint ]
fn parse_factor(cur: &mut Cursor) -> Result<(VarIndex, u32)> {
    cur.skip_ws();
    if cur.peek() != Some(b'x') {
        return Err(cur.syntax("expected a variable like x1"));
    }
    cur.advance();
    let index_offset = cur.pos;
    let index = parse_uint(cur, "variable index")?;
    let index = match index {
        ParsedUint::Value(0) => {
            return Err(Error::ZeroVariableIndex {
                offset: index_offset,
            })
        }
        ParsedUint::Value(v) => {
            u32::try_from(v).map_err(|_| cur.syntax("variable index too large"))?
        }
        ParsedUint::Overflow => return Err(cur.syntax("variable index too large")),
    };
    let mut exp = 1u32;
    let before = cur.pos;
    cur.skip_ws();
    if cur.peek() == Some(b'^') {
        cur.advance();
        cur.skip_ws();
        let exp_offset = cur.pos;
        exp = match parse_uint(cur, "exponent")? {
            ParsedUint::Value(v) => {
                u32::try_from(v).map_err(|_| Error::ExponentOverflow { offset: exp_offset })?
            }
            ParsedUint::Overflow => {
                return Err(Error::ExponentOverflow { offset: exp_offset })
            }
        };
    } else {
        cur.pos = before;
    }
    Ok((VarIndex::new(index), exp))
}

enum ParsedUint {
    Value(u64),
    Overflow,
}

fn parse_uint(cur: &mut Cursor, what: &str) -> Result<ParsedUint> {
    let start = cur.pos;
    let mut value: u64 = 0;
    let mut overflow = false;
    while let Some(b @ b'0'..=b'9') = cur.peek() {
        value = match value
            .checked_mul(10)
            .and_then(|v| v.checked_add((b - b'0') as u64))
        {
            Some(v) => v,
            None => {
                overflow = true;
                0
            }
        };
        cur.advance();
    }
    if cur.pos == start {
        return Err(cur.syntax(format!("expected {what} digits")));
    }
    Ok(if overflow {
        ParsedUint::Overflow
    } else {
        ParsedUint::Value(value)
    })
}

/// coef := '(' ws [sign] ratio ws ')' | ratio
fn parse_coef(cur: &mut Cursor) -> Result<BigRational> {
    cur.skip_ws();
    if cur.peek() == Some(b'(') {
        cur.advance();
        cur.skip_ws();
        let negative = match cur.peek() {
            Some(b'-') => {
                cur.advance();
                true
            }
            Some(b'+') => {
                cur.advance();
                false
            }
            _ => false,
        };
        let value = parse_ratio(cur)?;
        cur.skip_ws();
        if cur.peek() != Some(b')') {
            return Err(cur.syntax("expected ')'"));
        }
        cur.advance();
        Ok(if negative { -value } else { value })
    } else {
        parse_ratio(cur)
    }
}

/// ratio := uint [ '/' uint ]
///
/// A '/' not followed by digits is left unconsumed; the fraction text form
/// reuses this parser and `P / (1+xK^2)...` must stop after `P`.
fn parse_ratio(cur: &mut Cursor) -> Result<BigRational> {
    cur.skip_ws();
    let numer = parse_bigint_digits(cur)?;
    let before = cur.pos;
    cur.skip_ws();
    if cur.peek() == Some(b'/') {
        cur.advance();
        cur.skip_ws();
        let denom_offset = cur.pos;
        if !matches!(cur.peek(), Some(b'0'..=b'9')) {
            cur.pos = before;
            return Ok(BigRational::from_integer(numer));
        }
        let denom = parse_bigint_digits(cur)?;
        if denom.is_zero() {
            return Err(Error::Syntax {
                offset: denom_offset,
                message: "zero denominator".into(),
            });
        }
        Ok(BigRational::new(numer, denom))
    } else {
        cur.pos = before;
        Ok(BigRational::from_integer(numer))
    }
}

fn parse_bigint_digits(cur: &mut Cursor) -> Result<BigInt> {
    let start = cur.pos;
    while matches!(cur.peek(), Some(b'0'..=b'9')) {
        cur.advance();
    }
    if cur.pos == start {
        return Err(cur.syntax("expected digits"));
    }
    let digits = std::str::from_utf8(&cur.bytes[start..cur.pos]).expect("ascii digits");
    Ok(digits.parse().expect("digit strings parse as BigInt"))
}

fn first_char(s: &str) -> char {
    s.chars().next().unwrap_or('\u{0}')
}
