//! Multivariate osculatory rational interpolation.
//!
//! Given distinct nodes `Y_i` with prescribed normalized derivatives on a
//! lower set `A_i`, the solver computes a minimal Gröbner basis, under the
//! module order `≺_ξ`, of all pairs `(a, b)` with `a ≡ b·h_i` at every node.
//! Every rational interpolant `a/b` arises as a polynomial combination of
//! that basis. For value-only data, [`neville`] evaluates the interpolant at
//! a single point without building any polynomial.
//!
//! ```
//! use ratinterp::field::{Rational, Scalar, ZeroTest};
//! use ratinterp::fitzpatrick::{pick_representative, solve};
//! use ratinterp::problem::Problem;
//!
//! // samples of 1/(x+1)
//! let xs = [0i64, 1, 2];
//! let p = Problem::cauchy(
//!     vec!["x".into()],
//!     xs.iter().map(|&x| vec![Rational::from_i64(x)]).collect(),
//!     xs.iter().map(|&x| Rational::new(1, x + 1)).collect(),
//!     0,
//! )
//! .unwrap();
//! let zt = ZeroTest::default();
//! let basis = solve(&p, &zt).unwrap();
//! let rep = pick_representative(&basis, &p, None, &zt).unwrap();
//! let v = rep.value_at(&[Rational::from_i64(4)]).unwrap().unwrap();
//! assert_eq!(v, Rational::new(1, 5));
//! ```

pub mod cli;
pub mod field;
pub mod fitzpatrick;
pub mod neville;
pub mod oracle;
pub mod pairmod;
pub mod poly;
pub mod problem;

pub use field::{FieldMode, Rational, Scalar, ZeroTest, F64};
pub use fitzpatrick::{pick_representative, solve, verify_weak, BasisState};
pub use neville::{NevilleState, ZeroSign};
pub use pairmod::{Component, ModTerm, OrderXi, PairElement};
pub use poly::{Monomial, Poly};
pub use problem::{AnyProblem, Problem};
