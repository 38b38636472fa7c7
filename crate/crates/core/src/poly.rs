//! Sparse multivariate polynomials over a [`Scalar`] field.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vector. The map order is
//! only a storage convention that makes iteration (and therefore float
//! summation order) deterministic; term orders are applied by callers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::field::{Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("arity mismatch: expected {expected} coordinates, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("cannot parse polynomial term {0:?}")]
    Parse(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Exponent vector `α` of a monomial `X^α`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.arity(), other.arity());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.arity() == other.arity() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, divisor: &Monomial) -> Option<Monomial> {
        divisor
            .divides(self)
            .then(|| Monomial(self.0.iter().zip(&divisor.0).map(|(a, b)| a - b).collect()))
    }

    /// Monomials obtained by lowering one exponent by one.
    pub fn immediate_divisors(&self) -> impl Iterator<Item = Monomial> + '_ {
        (0..self.arity()).filter(|&i| self.0[i] > 0).map(move |i| {
            let mut e = self.0.clone();
            e[i] -= 1;
            Monomial(e)
        })
    }

    /// All monomials of total degree `<= degree` in `nvars` variables.
    pub fn all_up_to_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; nvars];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i == cur.len() {
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        if nvars == 0 {
            return vec![Monomial(vec![])];
        }
        rec(0, degree, &mut cur, &mut out);
        out
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Graded lexicographic comparison.
///
/// `varorder` lists variable indices from least to most significant, so
/// `[1, 0]` means `x_1 ≺ x_0` (with variables `[x, y]`, that is `y ≺ x`).
pub fn cmp_graded_lex(a: &Monomial, b: &Monomial, varorder: &[usize]) -> Ordering {
    a.degree()
        .cmp(&b.degree())
        .then_with(|| cmp_lex(a, b, varorder))
}

/// Pure lexicographic comparison; the last entry of `varorder` dominates.
pub fn cmp_lex(a: &Monomial, b: &Monomial, varorder: &[usize]) -> Ordering {
    for &v in varorder.iter().rev() {
        match a.0[v].cmp(&b.0[v]) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

fn binomial(n: u32, k: u32) -> i64 {
    let k = k.min(n - k);
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

fn pow<S: Scalar>(base: &S, e: u32) -> S {
    let mut acc = S::one();
    for _ in 0..e {
        acc = acc * base.clone();
    }
    acc
}

/// Sparse polynomial in a fixed number of variables. No stored coefficient
/// is identically zero.
#[derive(Clone, PartialEq)]
pub struct Poly<S> {
    nvars: usize,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Poly<S> {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn term(mono: Monomial, c: S) -> Self {
        let nvars = mono.arity();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        Poly { nvars, terms }
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        Self::term(Monomial::var(nvars, index), S::one())
    }

    /// Sums repeated monomials; panics on arity mismatch.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, S)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.arity(), nvars, "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    /// `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn max_coeff_magnitude(&self) -> f64 {
        self.terms
            .values()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly::from_terms(
            self.nvars,
            self.terms
                .iter()
                .map(|(m, v)| (m.clone(), v.clone() * c.clone())),
        )
    }

    pub fn mul_monomial(&self, u: &Monomial) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.mul(u), v.clone()))
                .collect(),
        }
    }

    /// `(x_var - c) * self`.
    pub fn mul_linear(&self, var: usize, c: &S) -> Self {
        let shifted = self.mul_monomial(&Monomial::var(self.nvars, var));
        &shifted - &self.scale(c)
    }

    fn check_point(&self, y: &[S]) -> Result<(), PolyError> {
        if y.len() != self.nvars {
            return Err(PolyError::ArityMismatch {
                expected: self.nvars,
                found: y.len(),
            });
        }
        Ok(())
    }

    /// `self(y)` by direct substitution.
    pub fn eval(&self, y: &[S]) -> Result<S, PolyError> {
        self.check_point(y)?;
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (yi, &e) in y.iter().zip(m.exponents()) {
                if e > 0 {
                    t = t * pow(yi, e);
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// The polynomial `q(X) = self(X + y)`.
    pub fn shift(&self, y: &[S]) -> Result<Self, PolyError> {
        self.check_point(y)?;
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            // Expand c * prod_i (x_i + y_i)^{m_i} one variable at a time.
            let mut partial: Vec<(Vec<u32>, S)> = vec![(vec![0; self.nvars], c.clone())];
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                for (exps, v) in &partial {
                    for k in 0..=e {
                        let coef = S::from_i64(binomial(e, k)) * pow(&y[i], e - k);
                        if coef.is_zero() {
                            continue;
                        }
                        let mut ne = exps.clone();
                        ne[i] = k;
                        next.push((ne, v.clone() * coef));
                    }
                }
                partial = next;
            }
            for (exps, v) in partial {
                out.add_term(Monomial(exps), v);
            }
        }
        Ok(out)
    }

    /// Normalized Taylor coefficient `(1/α!) ∂^|α| p / ∂x^α` at `y`, i.e. the
    /// coefficient of `X^α` in `self.shift(y)`.
    pub fn taylor_coeff(&self, y: &[S], alpha: &Monomial) -> Result<S, PolyError> {
        self.taylor_coeff_scaled(y, alpha).map(|(v, _)| v)
    }

    /// Like [`Poly::taylor_coeff`], also returning the sum of the magnitudes
    /// of the individual contributions (a scale for float zero tests).
    pub fn taylor_coeff_scaled(&self, y: &[S], alpha: &Monomial) -> Result<(S, f64), PolyError> {
        self.check_point(y)?;
        if alpha.arity() != self.nvars {
            return Err(PolyError::ArityMismatch {
                expected: self.nvars,
                found: alpha.arity(),
            });
        }
        let mut acc = S::zero();
        let mut scale = 0.0;
        for (m, c) in &self.terms {
            if !alpha.divides(m) {
                continue;
            }
            let mut t = c.clone();
            for (i, (&b, &a)) in m.exponents().iter().zip(alpha.exponents()).enumerate() {
                if b > a {
                    t = t * S::from_i64(binomial(b, a)) * pow(&y[i], b - a);
                } else if b > 0 {
                    t = t * S::from_i64(binomial(b, a));
                }
            }
            scale += t.magnitude();
            acc = acc + t;
        }
        Ok((acc, scale))
    }

    /// Terms sorted descending by graded lex under `varorder`.
    pub fn sorted_terms(&self, varorder: &[usize]) -> Vec<(&Monomial, &S)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| cmp_graded_lex(b.0, a.0, varorder));
        v
    }

    /// Text form `coef*x^i*y^j + ...`, highest graded-lex term first.
    pub fn render(&self, names: &[String], varorder: &[usize]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .sorted_terms(varorder)
            .into_iter()
            .map(|(m, c)| {
                let mut s = c.to_string();
                for (name, &e) in names.iter().zip(m.exponents()) {
                    match e {
                        0 => {}
                        1 => {
                            s.push('*');
                            s.push_str(name);
                        }
                        _ => {
                            s.push_str(&format!("*{name}^{e}"));
                        }
                    }
                }
                s
            })
            .collect();
        parts.join(" + ")
    }

    /// Parses the text form written by [`Poly::render`]. Also accepts ` - `
    /// between terms, a leading `-`, and bare variables (`x*y`).
    pub fn parse(text: &str, names: &[String]) -> Result<Self, PolyError> {
        let nvars = names.len();
        let mut p = Poly::zero(nvars);
        let text = text.trim();
        if text.is_empty() {
            return Err(PolyError::Parse(text.to_string()));
        }
        for (negate, raw) in split_terms(text) {
            let mut coef = S::one();
            let mut exps = vec![0u32; nvars];
            let mut body = raw.trim();
            let mut neg = negate;
            if let Some(rest) = body.strip_prefix('-') {
                if !rest.is_empty() && !rest.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
                    neg = !neg;
                    body = rest;
                }
            }
            if body.is_empty() {
                return Err(PolyError::Parse(raw.to_string()));
            }
            for factor in body.split('*') {
                let factor = factor.trim();
                let (base, exp) = match factor.split_once('^') {
                    Some((b, e)) => (
                        b.trim(),
                        e.trim()
                            .parse::<u32>()
                            .map_err(|_| PolyError::Parse(factor.to_string()))?,
                    ),
                    None => (factor, 1),
                };
                if let Some(i) = names.iter().position(|n| n == base) {
                    exps[i] += exp;
                } else if base
                    .starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '.')
                {
                    let v = S::parse_literal(base)?;
                    coef = coef * pow(&v, exp);
                } else {
                    return Err(PolyError::UnknownVariable(base.to_string()));
                }
            }
            if neg {
                coef = -coef;
            }
            p.add_term(Monomial(exps), coef);
        }
        Ok(p)
    }
}

/// Splits on ` + ` / ` - ` separators; a `-` inside a literal such as
/// `1e-7` is not surrounded by spaces and stays put.
fn split_terms(text: &str) -> Vec<(bool, &str)> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut start = 0;
    let mut neg = false;
    let mut i = 0;
    while i + 2 < bytes.len() {
        if bytes[i] == b' '
            && (bytes[i + 1] == b'+' || bytes[i + 1] == b'-')
            && bytes[i + 2] == b' '
        {
            out.push((neg, &text[start..i]));
            neg = bytes[i + 1] == b'-';
            start = i + 3;
            i += 3;
        } else {
            i += 1;
        }
    }
    out.push((neg, &text[start..]));
    out
}

impl<S: Scalar> fmt::Debug for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        let order: Vec<usize> = (0..self.nvars).rev().collect();
        f.write_str(&self.render(&names, &order))
    }
}

impl<S: Scalar> Add for &Poly<S> {
    type Output = Poly<S>;
    fn add(self, rhs: &Poly<S>) -> Poly<S> {
        assert_eq!(self.nvars, rhs.nvars, "polynomial arity mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<S: Scalar> Sub for &Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: &Poly<S>) -> Poly<S> {
        assert_eq!(self.nvars, rhs.nvars, "polynomial arity mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<S: Scalar> Neg for &Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl<S: Scalar> Mul for &Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: &Poly<S>) -> Poly<S> {
        assert_eq!(self.nvars, rhs.nvars, "polynomial arity mismatch");
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}
