//! Elements of the free module `P²` and the term order `≺_ξ` on it.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::field::Scalar;
use crate::poly::{cmp_graded_lex, Monomial, Poly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    /// Basis vector `(1, 0)`: the numerator slot.
    First,
    /// Basis vector `(0, 1)`: the denominator slot.
    Second,
}

/// A module term `X^α · e_k`.
///
/// The derived `Ord` is structural, for use as a map key; use
/// [`OrderXi::cmp`] for the term order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModTerm {
    pub mono: Monomial,
    pub component: Component,
}

impl ModTerm {
    pub fn new(mono: Monomial, component: Component) -> Self {
        ModTerm { mono, component }
    }

    pub fn mul_monomial(&self, u: &Monomial) -> ModTerm {
        ModTerm {
            mono: self.mono.mul(u),
            component: self.component,
        }
    }

    /// Renders as `(x^2, 0)` or `(0, x*y)`, the style used for leading terms.
    pub fn render(&self, names: &[String]) -> String {
        let mut m = String::new();
        for (name, &e) in names.iter().zip(self.mono.exponents()) {
            if e == 0 {
                continue;
            }
            if !m.is_empty() {
                m.push('*');
            }
            m.push_str(name);
            if e > 1 {
                m.push_str(&format!("^{e}"));
            }
        }
        if m.is_empty() {
            m.push('1');
        }
        match self.component {
            Component::First => format!("({m}, 0)"),
            Component::Second => format!("(0, {m})"),
        }
    }
}

impl fmt::Debug for ModTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}·{:?}", self.mono, self.component)
    }
}

/// The order `≺_ξ`: graded lex inside each component; across components
/// `X^α·First ≺ X^β·Second` iff `|α| <= |β| + ξ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderXi {
    pub xi: i64,
    /// Variable indices from least to most significant for `≺_lex`.
    pub varorder: Vec<usize>,
}

impl OrderXi {
    /// Panics unless `varorder` is a permutation of `0..varorder.len()`.
    pub fn new(xi: i64, varorder: Vec<usize>) -> Self {
        let mut seen = vec![false; varorder.len()];
        for &v in &varorder {
            assert!(v < seen.len() && !seen[v], "varorder is not a permutation");
            seen[v] = true;
        }
        OrderXi { xi, varorder }
    }

    /// Declared variable order with the first variable most significant,
    /// e.g. `x` dominates `y` for variables `[x, y]`.
    pub fn with_default_varorder(xi: i64, nvars: usize) -> Self {
        OrderXi::new(xi, (0..nvars).rev().collect())
    }

    pub fn nvars(&self) -> usize {
        self.varorder.len()
    }

    pub fn cmp_mono(&self, a: &Monomial, b: &Monomial) -> Ordering {
        cmp_graded_lex(a, b, &self.varorder)
    }

    pub fn cmp(&self, s: &ModTerm, t: &ModTerm) -> Ordering {
        cmp_modterm(s, t, self)
    }
}

pub fn cmp_modterm(s: &ModTerm, t: &ModTerm, ord: &OrderXi) -> Ordering {
    use Component::*;
    match (s.component, t.component) {
        (First, First) | (Second, Second) => ord.cmp_mono(&s.mono, &t.mono),
        (First, Second) => {
            if (s.mono.degree() as i64) <= t.mono.degree() as i64 + ord.xi {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
        (Second, First) => cmp_modterm(t, s, ord).reverse(),
    }
}

pub fn modterm_divides(s: &ModTerm, t: &ModTerm) -> bool {
    s.component == t.component && s.mono.divides(&t.mono)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("the zero element has no leading term")]
pub struct ZeroElement;

/// A pair `(a, b)` in `P²`.
#[derive(Clone, PartialEq)]
pub struct PairElement<S> {
    pub a: Poly<S>,
    pub b: Poly<S>,
}

impl<S: Scalar> PairElement<S> {
    pub fn new(a: Poly<S>, b: Poly<S>) -> Self {
        assert_eq!(a.nvars(), b.nvars(), "pair components differ in arity");
        PairElement { a, b }
    }

    /// The standard generators `(1, 0)` and `(0, 1)`.
    pub fn unit(nvars: usize, component: Component) -> Self {
        let one = Poly::constant(nvars, S::one());
        let zero = Poly::zero(nvars);
        match component {
            Component::First => PairElement::new(one, zero),
            Component::Second => PairElement::new(zero, one),
        }
    }

    pub fn nvars(&self) -> usize {
        self.a.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn scale(&self, c: &S) -> Self {
        PairElement::new(self.a.scale(c), self.b.scale(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        PairElement::new(&self.a + &other.a, &self.b + &other.b)
    }

    /// `self - c * other`.
    pub fn sub_scaled(&self, c: &S, other: &Self) -> Self {
        PairElement::new(&self.a - &other.a.scale(c), &self.b - &other.b.scale(c))
    }

    pub fn mul_poly(&self, p: &Poly<S>) -> Self {
        PairElement::new(p * &self.a, p * &self.b)
    }

    pub fn mul_monomial(&self, u: &Monomial) -> Self {
        PairElement::new(self.a.mul_monomial(u), self.b.mul_monomial(u))
    }

    /// `(x_var - c) * self`.
    pub fn mul_linear(&self, var: usize, c: &S) -> Self {
        PairElement::new(self.a.mul_linear(var, c), self.b.mul_linear(var, c))
    }

    /// Evaluates both components at `y`.
    pub fn eval(&self, y: &[S]) -> Result<(S, S), crate::poly::PolyError> {
        Ok((self.a.eval(y)?, self.b.eval(y)?))
    }

    /// Leading term and coefficient under `ord`.
    pub fn leading(&self, ord: &OrderXi) -> Result<(ModTerm, S), ZeroElement> {
        leading(self, ord)
    }

    /// The nonzero `c` with `self == c * other`, if one exists.
    pub fn scalar_ratio(&self, other: &Self) -> Option<S> {
        let c = match other.a.terms().next() {
            Some((m, d)) => self.a.coeff(m) / d.clone(),
            None => {
                let (m, d) = other.b.terms().next()?;
                self.b.coeff(m) / d.clone()
            }
        };
        (!c.is_zero() && other.scale(&c) == *self).then_some(c)
    }

    pub fn render(&self, names: &[String], varorder: &[usize]) -> String {
        format!(
            "({}, {})",
            self.a.render(names, varorder),
            self.b.render(names, varorder)
        )
    }
}

impl<S: Scalar> fmt::Debug for PairElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.a, self.b)
    }
}

pub fn leading<S: Scalar>(e: &PairElement<S>, ord: &OrderXi) -> Result<(ModTerm, S), ZeroElement> {
    let first =
        e.a.terms()
            .map(|(m, c)| (ModTerm::new(m.clone(), Component::First), c));
    let second =
        e.b.terms()
            .map(|(m, c)| (ModTerm::new(m.clone(), Component::Second), c));
    first
        .chain(second)
        .max_by(|x, y| cmp_modterm(&x.0, &y.0, ord))
        .map(|(t, c)| (t, c.clone()))
        .ok_or(ZeroElement)
}

/// Keeps the elements whose leading term is not divisible by the leading
/// term of another retained element, sorted ascending by leading term.
/// Among equal leading terms the earliest input element wins. Zero elements
/// are dropped. Leading coefficients are left as they are.
pub fn minimalize<S: Scalar>(g: Vec<PairElement<S>>, ord: &OrderXi) -> Vec<PairElement<S>> {
    let mut keyed: Vec<(ModTerm, PairElement<S>)> = g
        .into_iter()
        .filter_map(|e| leading(&e, ord).ok().map(|(t, _)| (t, e)))
        .collect();
    // stable: ties keep input order
    keyed.sort_by(|x, y| cmp_modterm(&x.0, &y.0, ord));
    let mut kept: Vec<(ModTerm, PairElement<S>)> = Vec::with_capacity(keyed.len());
    for (t, e) in keyed {
        // Divisors precede their multiples in a term order, so checking the
        // already-kept prefix suffices.
        if kept.iter().all(|(k, _)| !modterm_divides(k, &t)) {
            kept.push((t, e));
        }
    }
    kept.into_iter().map(|(_, e)| e).collect()
}
