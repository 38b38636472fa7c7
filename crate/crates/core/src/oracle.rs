//! Brute-force verifier for the solver, independent of the basis update.
//!
//! Inside a degree box the weak-interpolation conditions are a homogeneous
//! linear system in the coefficients of `a` and `b`; its null space is
//! computed by exact Gaussian elimination and compared against the span of
//! the monomial multiples of a computed basis.

use thiserror::Error;

use crate::field::{Rational, Scalar};
use crate::pairmod::{Component, ModTerm, PairElement};
use crate::poly::{Monomial, Poly};
use crate::problem::{build_h, Problem};

/// Dense solving is capped at this many unknowns.
pub const MAX_UNKNOWNS: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("degree box needs {0} unknowns, more than the limit of {MAX_UNKNOWNS}")]
    BoxTooLarge(usize),
    #[error("degree box ({0}, {1}) is not a lower set of the order with xi = {2}")]
    IncompatibleBox(u32, u32, i64),
}

/// Bound `deg a <= max_deg_a`, `deg b <= max_deg_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeBox {
    pub max_deg_a: u32,
    pub max_deg_b: u32,
}

impl DegreeBox {
    pub fn new(max_deg_a: u32, max_deg_b: u32) -> Self {
        DegreeBox {
            max_deg_a,
            max_deg_b,
        }
    }

    /// True when the box's terms are closed downward under `≺_ξ`, which
    /// holds iff `max_deg_b + ξ <= max_deg_a <= max_deg_b + ξ + 1`. Only
    /// then does the box slice of the module have a basis made of monomial
    /// multiples of Gröbner basis elements.
    pub fn is_compatible(&self, xi: i64) -> bool {
        let (a, b) = (self.max_deg_a as i64, self.max_deg_b as i64);
        b + xi <= a && a <= b + xi + 1
    }

    /// Smallest compatible box containing every term `≼_ξ t`.
    pub fn covering(t: &ModTerm, xi: i64) -> DegreeBox {
        let d = t.mono.degree() as i64;
        let (need_a, need_b) = match t.component {
            Component::First => (d, d - xi - 1),
            Component::Second => (d + xi, d),
        };
        let mut b = need_b.max(0);
        loop {
            let a = need_a.max(b + xi).max(0);
            if a <= b + xi + 1 {
                return DegreeBox::new(a as u32, b as u32);
            }
            b += 1;
        }
    }

    pub fn a_monomials(&self, nvars: usize) -> Vec<Monomial> {
        Monomial::all_up_to_degree(nvars, self.max_deg_a)
    }

    pub fn b_monomials(&self, nvars: usize) -> Vec<Monomial> {
        Monomial::all_up_to_degree(nvars, self.max_deg_b)
    }

    pub fn unknowns(&self, nvars: usize) -> usize {
        self.a_monomials(nvars).len() + self.b_monomials(nvars).len()
    }

    pub fn contains(&self, e: &PairElement<Rational>) -> bool {
        e.a.total_degree().is_none_or(|d| d <= self.max_deg_a)
            && e.b.total_degree().is_none_or(|d| d <= self.max_deg_b)
    }
}

/// Coordinates of pairs inside a box: `a` coefficients then `b` coefficients.
struct Layout {
    nvars: usize,
    a: Vec<Monomial>,
    b: Vec<Monomial>,
}

impl Layout {
    fn new(nvars: usize, dbox: &DegreeBox) -> Result<Self, OracleError> {
        let n = dbox.unknowns(nvars);
        if n > MAX_UNKNOWNS {
            return Err(OracleError::BoxTooLarge(n));
        }
        Ok(Layout {
            nvars,
            a: dbox.a_monomials(nvars),
            b: dbox.b_monomials(nvars),
        })
    }

    fn len(&self) -> usize {
        self.a.len() + self.b.len()
    }

    fn encode(&self, e: &PairElement<Rational>) -> Vec<Rational> {
        self.a
            .iter()
            .map(|m| e.a.coeff(m))
            .chain(self.b.iter().map(|m| e.b.coeff(m)))
            .collect()
    }

    fn decode(&self, v: &[Rational]) -> PairElement<Rational> {
        let (va, vb) = v.split_at(self.a.len());
        PairElement::new(
            Poly::from_terms(self.nvars, self.a.iter().cloned().zip(va.iter().cloned())),
            Poly::from_terms(self.nvars, self.b.iter().cloned().zip(vb.iter().cloned())),
        )
    }
}

/// One row per Taylor condition `D^α(b·h_i − a)(Y_i) = 0`.
fn condition_matrix(p: &Problem<Rational>, layout: &Layout) -> Vec<Vec<Rational>> {
    let mut rows = Vec::with_capacity(p.num_conditions());
    for node in p.nodes() {
        let h = build_h(node);
        let xb: Vec<Poly<Rational>> = layout.b.iter().map(|m| h.mul_monomial(m)).collect();
        for alpha in node.data.keys() {
            let tc = |q: &Poly<Rational>| q.taylor_coeff(&node.point, alpha).expect("arity");
            let row = layout
                .a
                .iter()
                .map(|m| -tc(&Poly::term(m.clone(), Rational::one())))
                .chain(xb.iter().map(tc))
                .collect();
            rows.push(row);
        }
    }
    rows
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (top, rest) = if i < r {
                    let (x, y) = m.split_at_mut(r);
                    (&mut x[i], &y[0])
                } else {
                    let (x, y) = m.split_at_mut(i);
                    (&mut y[0], &x[r])
                };
                for (v, w) in top.iter_mut().zip(rest.iter()) {
                    *v = v.clone() - f.clone() * w.clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(vectors: &[Vec<Rational>], ncols: usize) -> usize {
    let mut m = vectors.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{v : m·v = 0}`.
pub fn nullspace(m: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut r = m.to_vec();
    let pivots = rref(&mut r, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[row][f].clone();
            }
            v
        })
        .collect()
}

/// Linear basis of all weak interpolations inside `dbox`.
pub fn brute_solutions(
    p: &Problem<Rational>,
    dbox: &DegreeBox,
) -> Result<Vec<PairElement<Rational>>, OracleError> {
    let layout = Layout::new(p.nvars(), dbox)?;
    let m = condition_matrix(p, &layout);
    Ok(nullspace(&m, layout.len())
        .iter()
        .map(|v| layout.decode(v))
        .collect())
}

/// Products `u·g` of basis elements with monomials that stay in `dbox`.
pub fn bounded_multiples(
    basis: &[PairElement<Rational>],
    dbox: &DegreeBox,
) -> Vec<PairElement<Rational>> {
    let mut out = Vec::new();
    for g in basis {
        let room_a = g.a.total_degree().map(|d| dbox.max_deg_a as i64 - d as i64);
        let room_b = g.b.total_degree().map(|d| dbox.max_deg_b as i64 - d as i64);
        let room = match (room_a, room_b) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => continue,
        };
        if room < 0 {
            continue;
        }
        for u in Monomial::all_up_to_degree(g.nvars(), room as u32) {
            out.push(g.mul_monomial(&u));
        }
    }
    out
}

/// True iff `e` lies in the span of `gens` (all inside `dbox`).
pub fn in_span(
    gens: &[PairElement<Rational>],
    e: &PairElement<Rational>,
    dbox: &DegreeBox,
) -> Result<bool, OracleError> {
    if !dbox.contains(e) {
        return Ok(false);
    }
    let layout = Layout::new(e.nvars(), dbox)?;
    let mut vs: Vec<Vec<Rational>> = gens.iter().map(|g| layout.encode(g)).collect();
    let before = rank(&vs, layout.len());
    vs.push(layout.encode(e));
    Ok(rank(&vs, layout.len()) == before)
}

/// True iff `e` is a polynomial combination of `basis`, checked inside the
/// smallest compatible box covering `e`'s leading term.
pub fn is_combination(
    basis: &[PairElement<Rational>],
    e: &PairElement<Rational>,
    xi: i64,
    lt: &ModTerm,
) -> Result<bool, OracleError> {
    let dbox = DegreeBox::covering(lt, xi);
    in_span(&bounded_multiples(basis, &dbox), e, &dbox)
}

/// Checks that the monomial multiples of `basis` inside `dbox` all satisfy
/// the problem and span the whole brute-force solution space there.
pub fn dims_match(
    p: &Problem<Rational>,
    basis: &[PairElement<Rational>],
    dbox: &DegreeBox,
) -> Result<bool, OracleError> {
    if !dbox.is_compatible(p.order().xi) {
        return Err(OracleError::IncompatibleBox(
            dbox.max_deg_a,
            dbox.max_deg_b,
            p.order().xi,
        ));
    }
    let layout = Layout::new(p.nvars(), dbox)?;
    let m = condition_matrix(p, &layout);
    let brute_dim = layout.len() - rank(&m, layout.len());
    let multiples = bounded_multiples(basis, dbox);
    let vs: Vec<Vec<Rational>> = multiples.iter().map(|g| layout.encode(g)).collect();
    for v in &vs {
        for row in &m {
            let dot = row
                .iter()
                .zip(v)
                .fold(Rational::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
            if !dot.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(rank(&vs, layout.len()) == brute_dim)
}
