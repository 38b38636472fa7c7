//! Incremental module Gröbner basis solver for osculatory rational
//! interpolation.
//!
//! Starting from `{(1,0), (0,1)}`, each constraint `a ≡ b·h_i mod I(Y_i, A)`
//! is absorbed by a single basis update: compute the residue `ν_t` of every
//! basis element, pivot on the least element with `ν ≠ 0`, eliminate the
//! residue from the larger elements, and replace the pivot by its products
//! with `x_s − y_s`. After all constraints the basis generates every weak
//! interpolation of the problem.

use std::fmt;

use thiserror::Error;

use crate::field::{FieldMode, Scalar, ZeroTest};
use crate::pairmod::{minimalize, Component, ModTerm, OrderXi, PairElement};
use crate::poly::{Monomial, Poly, PolyError};
use crate::problem::{build_h, constraints, Constraint, Node, Problem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A float residue that passed as nonzero but sits within ten times the
/// zero-test threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningWarning {
    /// One-based constraint index.
    pub step: usize,
    pub node: usize,
    pub alpha: Monomial,
    /// Zero-based position in the sorted basis.
    pub element: usize,
    pub residue: f64,
    pub threshold: f64,
}

impl fmt::Display for ConditioningWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ill-conditioned residue at constraint {} (node {}, alpha {:?}), element {}: |nu| = {:e} vs threshold {:e}",
            self.step, self.node, self.alpha, self.element, self.residue, self.threshold
        )
    }
}

/// Minimal Gröbner basis of the current solution module `M_k`, sorted
/// ascending by leading term.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisState<S: Scalar> {
    basis: Vec<PairElement<S>>,
    k: usize,
    order: OrderXi,
    warnings: Vec<ConditioningWarning>,
}

impl<S: Scalar> BasisState<S> {
    /// Basis `{(1,0), (0,1)}` of the whole module, sorted under `order`.
    pub fn initial(nvars: usize, order: OrderXi) -> Self {
        let basis = minimalize(
            vec![
                PairElement::unit(nvars, Component::First),
                PairElement::unit(nvars, Component::Second),
            ],
            &order,
        );
        BasisState {
            basis,
            k: 0,
            order,
            warnings: Vec::new(),
        }
    }

    pub fn basis(&self) -> &[PairElement<S>] {
        &self.basis
    }

    pub fn into_basis(self) -> Vec<PairElement<S>> {
        self.basis
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> &OrderXi {
        &self.order
    }

    pub fn warnings(&self) -> &[ConditioningWarning] {
        &self.warnings
    }

    pub fn leading_terms(&self) -> Vec<ModTerm> {
        self.basis
            .iter()
            .map(|e| {
                e.leading(&self.order)
                    .expect("basis elements are nonzero")
                    .0
            })
            .collect()
    }

    /// `(a, b) = Σ c_j (a_j, b_j)` rendered with the basis spelled out.
    pub fn family_statement(&self, names: &[String]) -> String {
        let mut s = String::from("(a, b) = ");
        let terms: Vec<String> = (1..=self.basis.len())
            .map(|j| format!("c_{j}*(a_{j}, b_{j})"))
            .collect();
        s.push_str(&terms.join(" + "));
        s.push_str(", c_j in ");
        s.push_str(&format!("F[{}]", names.join(",")));
        s
    }
}

/// Residue `ν` of one element against one constraint, with a magnitude
/// scale for float zero tests.
#[derive(Debug, Clone, PartialEq)]
pub struct Residue<S> {
    pub value: S,
    pub scale: f64,
}

/// `ν = D^α (b·h − a) |_Y`. For an element already satisfying the earlier
/// constraints of the chain at this node this is exactly the congruence
/// residue of the new one.
pub fn residue<S: Scalar>(
    e: &PairElement<S>,
    point: &[S],
    alpha: &Monomial,
    h: &Poly<S>,
) -> Result<Residue<S>, PolyError> {
    let bh = &e.b * h;
    let (vb, sb) = bh.taylor_coeff_scaled(point, alpha)?;
    let (va, sa) = e.a.taylor_coeff_scaled(point, alpha)?;
    Ok(Residue {
        value: vb - va,
        scale: sb + sa,
    })
}

/// Absorbs one constraint into the basis.
pub fn update_basis<S: Scalar>(
    st: BasisState<S>,
    c: &Constraint,
    node: &Node<S>,
    h: &Poly<S>,
    zt: &ZeroTest,
) -> Result<BasisState<S>, SolveError> {
    let BasisState {
        basis,
        k,
        order,
        mut warnings,
    } = st;
    let point = &node.point;

    if cfg!(debug_assertions) && S::MODE == FieldMode::Exact {
        for e in &basis {
            for beta in c.prefix.elements().iter().filter(|b| **b != c.alpha) {
                debug_assert!(
                    residue(e, point, beta, h)?.value.is_zero(),
                    "basis element violates an earlier constraint at node {}",
                    c.node
                );
            }
        }
    }

    let residues = basis
        .iter()
        .map(|e| residue(e, point, &c.alpha, h))
        .collect::<Result<Vec<_>, _>>()?;

    for (t, r) in residues.iter().enumerate() {
        if zt.is_ambiguous(&r.value, r.scale) {
            warnings.push(ConditioningWarning {
                step: k + 1,
                node: c.node,
                alpha: c.alpha.clone(),
                element: t,
                residue: r.value.magnitude(),
                threshold: zt.threshold(r.scale),
            });
        }
    }

    let pivot = residues.iter().position(|r| !zt.is_zero(&r.value, r.scale));
    let Some(pivot) = pivot else {
        return Ok(BasisState {
            basis,
            k: k + 1,
            order,
            warnings,
        });
    };

    let nu_pivot = residues[pivot].value.clone();
    let pivot_elem = basis[pivot].clone();
    let mut next = Vec::with_capacity(basis.len() + point.len());
    for (t, e) in basis.into_iter().enumerate() {
        if t < pivot {
            next.push(e);
        } else if t == pivot {
            for &s in &order.varorder {
                next.push(pivot_elem.mul_linear(s, &point[s]));
            }
        } else {
            let ratio = residues[t].value.clone() / nu_pivot.clone();
            next.push(e.sub_scaled(&ratio, &pivot_elem));
        }
    }
    let basis = minimalize(next, &order);
    Ok(BasisState {
        basis,
        k: k + 1,
        order,
        warnings,
    })
}

/// Runs every constraint of `p` in order and returns the final basis.
pub fn solve<S: Scalar>(p: &Problem<S>, zt: &ZeroTest) -> Result<BasisState<S>, SolveError> {
    solve_traced(p, zt, |_, _| {})
}

/// Like [`solve`], calling `observe` with each constraint and the basis
/// that results from absorbing it.
pub fn solve_traced<S: Scalar>(
    p: &Problem<S>,
    zt: &ZeroTest,
    mut observe: impl FnMut(&Constraint, &BasisState<S>),
) -> Result<BasisState<S>, SolveError> {
    let hs: Vec<Poly<S>> = p.nodes().iter().map(build_h).collect();
    let mut st = BasisState::initial(p.nvars(), p.order().clone());
    for c in constraints(p) {
        st = update_basis(st, &c, &p.nodes()[c.node], &hs[c.node], zt)?;
        observe(&c, &st);
    }
    Ok(st)
}

/// Where a representative came from in the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pick {
    Single(usize),
    Sum(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Representative<S: Scalar> {
    pub pair: PairElement<S>,
    pub pick: Pick,
}

impl<S: Scalar> Representative<S> {
    /// `a(x) / b(x)`; `None` where `b` vanishes identically.
    pub fn value_at(&self, x: &[S]) -> Result<Option<S>, PolyError> {
        let (a, b) = self.pair.eval(x)?;
        Ok((!b.is_zero()).then(|| a / b))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("no basis element or pairwise sum has a denominator that is nonzero at every node")]
pub struct NoRepresentative;

fn denominator_ok<S: Scalar>(b: &Poly<S>, pts: &[&[S]], zt: &ZeroTest) -> bool {
    let scale = b.max_coeff_magnitude();
    pts.iter().all(|y| match b.eval(y) {
        Ok(v) => !zt.is_zero(&v, scale),
        Err(_) => false,
    })
}

/// First basis element (ascending) whose `b` is nonzero at every node and
/// at `y0` if given; failing that, the first pairwise sum that is.
pub fn pick_representative<S: Scalar>(
    st: &BasisState<S>,
    p: &Problem<S>,
    y0: Option<&[S]>,
    zt: &ZeroTest,
) -> Result<Representative<S>, NoRepresentative> {
    let mut pts: Vec<&[S]> = p.nodes().iter().map(|n| n.point.as_slice()).collect();
    if let Some(y) = y0 {
        pts.push(y);
    }
    let basis = st.basis();
    for (i, e) in basis.iter().enumerate() {
        if denominator_ok(&e.b, &pts, zt) {
            return Ok(Representative {
                pair: e.clone(),
                pick: Pick::Single(i),
            });
        }
    }
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let sum = basis[i].add(&basis[j]);
            if denominator_ok(&sum.b, &pts, zt) {
                return Ok(Representative {
                    pair: sum,
                    pick: Pick::Sum(i, j),
                });
            }
        }
    }
    Err(NoRepresentative)
}

/// True iff every Taylor condition of every node is met by `b·h_i − a`.
pub fn verify_weak<S: Scalar>(e: &PairElement<S>, p: &Problem<S>, zt: &ZeroTest) -> bool {
    if e.nvars() != p.nvars() {
        return false;
    }
    p.nodes().iter().all(|node| {
        let h = build_h(node);
        node.data
            .keys()
            .all(|alpha| match residue(e, &node.point, alpha, &h) {
                Ok(r) => zt.is_zero(&r.value, r.scale),
                Err(_) => false,
            })
    })
}
