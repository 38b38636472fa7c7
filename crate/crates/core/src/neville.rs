//! Neville-like point evaluation for Cauchy (value-only) data.
//!
//! Runs the same basis update as [`crate::fitzpatrick`], but each basis
//! element `(a_i, b_i)` is represented only by
//!
//! * its residues `W(i, j) = (b_i f_j − a_i)(Y_j)` at every node,
//! * its evaluation pair `(a_i(Y_0), b_i(Y_0))` at the query point,
//! * its leading term.
//!
//! All three transform linearly under the update, so no polynomial is ever
//! built.

use std::fmt;

use thiserror::Error;

use crate::field::{Scalar, ZeroTest};
use crate::pairmod::{modterm_divides, Component, ModTerm, OrderXi};
use crate::poly::Monomial;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NevilleError {
    #[error("{points} points but {values} values")]
    LengthMismatch { points: usize, values: usize },
    #[error("point {index} has {found} coordinates, expected {expected}")]
    Arity {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },
    #[error("all {0} points have already been consumed")]
    Exhausted(usize),
    #[error("the sign-weighted denominator vanishes")]
    DegenerateDenominator,
}

/// One row `(W(i,1), …, W(i,L); (a_i(Y_0), b_i(Y_0)); LT(a_i, b_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct WRow<S> {
    pub residues: Vec<S>,
    pub eval: (S, S),
    pub lt: ModTerm,
}

/// Float residue that passed as nonzero within ten times the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct StepWarning {
    pub step: usize,
    pub row: usize,
    pub residue: f64,
    pub threshold: f64,
}

impl fmt::Display for StepWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ill-conditioned residue at step {}, row {}: |W| = {:e} vs threshold {:e}",
            self.step, self.row, self.residue, self.threshold
        )
    }
}

/// Weight given to a row whose `b(Y_0)` is exactly zero in the estimator.
///
/// Such rows still carry `a(Y_0)` into the numerator, so the choice matters
/// whenever a `(·, 0)` generator survives. `Plus` is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroSign {
    #[default]
    Plus,
    Minus,
}

impl ZeroSign {
    fn weight(self) -> i32 {
        match self {
            ZeroSign::Plus => 1,
            ZeroSign::Minus => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowEstimate<S> {
    pub a: S,
    pub b: S,
    /// `a / b` when `b` passes the nonzero test.
    pub ratio: Option<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate<S> {
    pub value: S,
    pub per_row: Vec<RowEstimate<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NevilleState<S> {
    rows: Vec<WRow<S>>,
    k: usize,
    points: Vec<Vec<S>>,
    values: Vec<S>,
    y0: Vec<S>,
    order: OrderXi,
    zt: ZeroTest,
    zero_sign: ZeroSign,
    warnings: Vec<StepWarning>,
}

fn row_scale<S: Scalar>(row: &WRow<S>) -> f64 {
    row.residues
        .iter()
        .map(Scalar::magnitude)
        .fold(0.0, f64::max)
}

/// Sorts rows ascending by leading term and drops every row whose leading
/// term is a multiple of an earlier (smaller) one.
fn prune<S: Scalar>(mut rows: Vec<WRow<S>>, order: &OrderXi) -> Vec<WRow<S>> {
    rows.sort_by(|x, y| order.cmp(&x.lt, &y.lt));
    let mut kept: Vec<WRow<S>> = Vec::with_capacity(rows.len());
    for r in rows {
        if kept.iter().all(|k| !modterm_divides(&k.lt, &r.lt)) {
            kept.push(r);
        }
    }
    kept
}

impl<S: Scalar> NevilleState<S> {
    /// Rows for the generators `(1, 0)` and `(0, 1)`: residues `−1` and
    /// `f_j` respectively.
    pub fn init(
        points: Vec<Vec<S>>,
        values: Vec<S>,
        y0: Vec<S>,
        order: OrderXi,
        zt: ZeroTest,
    ) -> Result<Self, NevilleError> {
        if points.len() != values.len() {
            return Err(NevilleError::LengthMismatch {
                points: points.len(),
                values: values.len(),
            });
        }
        let n = order.nvars();
        if y0.len() != n {
            return Err(NevilleError::Arity {
                index: 0,
                expected: n,
                found: y0.len(),
            });
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != n {
                return Err(NevilleError::Arity {
                    index: i + 1,
                    expected: n,
                    found: p.len(),
                });
            }
            if let Some(j) = points[..i].iter().position(|q| q == p) {
                return Err(NevilleError::DuplicatePoint {
                    first: j + 1,
                    second: i + 1,
                });
            }
        }
        let l = points.len();
        let rows = vec![
            WRow {
                residues: vec![-S::one(); l],
                eval: (S::one(), S::zero()),
                lt: ModTerm::new(Monomial::one(n), Component::First),
            },
            WRow {
                residues: values.clone(),
                eval: (S::zero(), S::one()),
                lt: ModTerm::new(Monomial::one(n), Component::Second),
            },
        ];
        let rows = prune(rows, &order);
        Ok(NevilleState {
            rows,
            k: 0,
            points,
            values,
            y0,
            order,
            zt,
            zero_sign: ZeroSign::default(),
            warnings: Vec::new(),
        })
    }

    pub fn with_zero_sign(mut self, zero_sign: ZeroSign) -> Self {
        self.zero_sign = zero_sign;
        self
    }

    pub fn zero_sign(&self) -> ZeroSign {
        self.zero_sign
    }

    pub fn rows(&self) -> &[WRow<S>] {
        &self.rows
    }

    /// Number of points consumed.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Vec<S>] {
        &self.points
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn y0(&self) -> &[S] {
        &self.y0
    }

    pub fn order(&self) -> &OrderXi {
        &self.order
    }

    pub fn zero_test(&self) -> &ZeroTest {
        &self.zt
    }

    pub fn warnings(&self) -> &[StepWarning] {
        &self.warnings
    }

    /// Absorbs the next point.
    pub fn step(&mut self) -> Result<(), NevilleError> {
        let l = self.points.len();
        if self.k >= l {
            return Err(NevilleError::Exhausted(l));
        }
        let col = self.k;
        self.k += 1;
        let step = self.k;

        let rows = std::mem::take(&mut self.rows);
        let mut rows = prune(rows, &self.order);

        let mut pivot = None;
        for (i, r) in rows.iter().enumerate() {
            let scale = row_scale(r);
            let w = &r.residues[col];
            if self.zt.is_ambiguous(w, scale) {
                self.warnings.push(StepWarning {
                    step,
                    row: i,
                    residue: w.magnitude(),
                    threshold: self.zt.threshold(scale),
                });
            }
            if pivot.is_none() && !self.zt.is_zero(w, scale) {
                pivot = Some(i);
            }
        }

        let Some(p) = pivot else {
            for r in &mut rows {
                r.residues[col] = S::zero();
            }
            self.rows = rows;
            return Ok(());
        };

        let piv = rows[p].clone();
        let w_piv = piv.residues[col].clone();
        let mut next = Vec::with_capacity(rows.len() + self.order.nvars());
        for (i, mut r) in rows.into_iter().enumerate() {
            if i < p {
                r.residues[col] = S::zero();
                next.push(r);
            } else if i == p {
                let yk = &self.points[col];
                for &s in &self.order.varorder {
                    let residues = self
                        .points
                        .iter()
                        .zip(&piv.residues)
                        .map(|(yj, w)| w.clone() * (yj[s].clone() - yk[s].clone()))
                        .collect();
                    let d0 = self.y0[s].clone() - yk[s].clone();
                    next.push(WRow {
                        residues,
                        eval: (piv.eval.0.clone() * d0.clone(), piv.eval.1.clone() * d0),
                        lt: piv.lt.mul_monomial(&Monomial::var(self.order.nvars(), s)),
                    });
                }
            } else {
                let ratio = r.residues[col].clone() / w_piv.clone();
                for (w, wp) in r.residues.iter_mut().zip(&piv.residues) {
                    *w = w.clone() - ratio.clone() * wp.clone();
                }
                r.residues[col] = S::zero();
                r.eval = (
                    r.eval.0.clone() - ratio.clone() * piv.eval.0.clone(),
                    r.eval.1.clone() - ratio * piv.eval.1.clone(),
                );
                next.push(r);
            }
        }
        self.rows = prune(next, &self.order);
        Ok(())
    }

    /// `Σ sgn(b_i)·a_i / Σ sgn(b_i)·b_i` over the current rows; `sgn(0)`
    /// follows the configured [`ZeroSign`].
    pub fn estimate(&self) -> Result<Estimate<S>, NevilleError> {
        estimate_rows(&self.rows, &self.zt, self.zero_sign)
    }

    /// Consumes all remaining points, returning the estimate after each.
    pub fn run_to_end(&mut self) -> Result<Vec<Estimate<S>>, NevilleError> {
        let mut out = Vec::with_capacity(self.points.len() - self.k);
        while self.k < self.points.len() {
            self.step()?;
            out.push(self.estimate()?);
        }
        Ok(out)
    }
}

pub fn estimate_rows<S: Scalar>(
    rows: &[WRow<S>],
    zt: &ZeroTest,
    zero_sign: ZeroSign,
) -> Result<Estimate<S>, NevilleError> {
    let mut num = S::zero();
    let mut den = S::zero();
    let mut scale = 0.0;
    let mut per_row = Vec::with_capacity(rows.len());
    for r in rows {
        let (a, b) = &r.eval;
        let sign = if b.is_zero() {
            zero_sign.weight()
        } else {
            b.sgn()
        };
        if sign < 0 {
            num = num - a.clone();
            den = den - b.clone();
        } else {
            num = num + a.clone();
            den = den + b.clone();
        }
        scale += b.magnitude();
        let row_scale = a.magnitude().max(b.magnitude());
        let ratio = (!zt.is_zero(b, row_scale)).then(|| a.clone() / b.clone());
        per_row.push(RowEstimate {
            a: a.clone(),
            b: b.clone(),
            ratio,
        });
    }
    if rows.is_empty() || zt.is_zero(&den, scale) {
        return Err(NevilleError::DegenerateDenominator);
    }
    Ok(Estimate {
        value: num / den,
        per_row,
    })
}

/// Initializes, steps through every point and reports the running estimate
/// after each step.
pub fn run<S: Scalar>(
    points: Vec<Vec<S>>,
    values: Vec<S>,
    y0: Vec<S>,
    order: OrderXi,
    zt: ZeroTest,
    zero_sign: ZeroSign,
) -> Result<Vec<Estimate<S>>, NevilleError> {
    NevilleState::init(points, values, y0, order, zt)?
        .with_zero_sign(zero_sign)
        .run_to_end()
}
