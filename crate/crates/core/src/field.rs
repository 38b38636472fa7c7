//! Coefficient fields.
//!
//! Every algorithm in the crate is generic over [`Scalar`], which is
//! implemented by two concrete fields:
//!
//! * [`Rational`]: arbitrary-precision rationals, always in lowest terms with
//!   a positive denominator. Zero means identically zero.
//! * [`F64`]: finite binary64 values. Zero is decided by a [`ZeroTest`]
//!   threshold relative to a caller-supplied scale.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldMode {
    Exact,
    Float,
}

impl fmt::Display for FieldMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldMode::Exact => f.write_str("rational"),
            FieldMode::Float => f.write_str("float64"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalarError {
    #[error("cannot parse {0:?} as a number")]
    Parse(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("non-finite value {0}")]
    NonFinite(f64),
}

/// Threshold used to decide whether a float value counts as zero.
///
/// A value `s` is zero iff `|s| <= absolute_tol + relative_tol * scale`.
/// Exact scalars ignore both tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroTest {
    pub absolute_tol: f64,
    pub relative_tol: f64,
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest {
            absolute_tol: 1e-10,
            relative_tol: 1e-9,
        }
    }
}

impl ZeroTest {
    /// Panics if either tolerance is negative or not finite.
    pub fn new(absolute_tol: f64, relative_tol: f64) -> Self {
        assert!(
            absolute_tol.is_finite() && absolute_tol >= 0.0,
            "absolute tolerance must be a nonnegative finite number"
        );
        assert!(
            relative_tol.is_finite() && relative_tol >= 0.0,
            "relative tolerance must be a nonnegative finite number"
        );
        ZeroTest {
            absolute_tol,
            relative_tol,
        }
    }

    pub fn threshold(&self, scale: f64) -> f64 {
        self.absolute_tol + self.relative_tol * scale
    }

    pub fn is_zero<S: Scalar>(&self, s: &S, scale: f64) -> bool {
        scalar_is_zero(s, scale, self)
    }

    /// True for a float value that is nonzero under this test but lies
    /// within ten times the threshold. Exact values are never ambiguous.
    pub fn is_ambiguous<S: Scalar>(&self, s: &S, scale: f64) -> bool {
        match S::MODE {
            FieldMode::Exact => false,
            FieldMode::Float => {
                let t = self.threshold(scale);
                let m = s.magnitude();
                m > t && m <= 10.0 * t
            }
        }
    }
}

/// Zero test: exact scalars must be identically zero; floats must lie within
/// `zt.threshold(scale)` of zero.
pub fn scalar_is_zero<S: Scalar>(s: &S, scale: f64, zt: &ZeroTest) -> bool {
    debug_assert!(scale >= 0.0, "scale must be nonnegative");
    match S::MODE {
        FieldMode::Exact => s.is_zero(),
        FieldMode::Float => s.magnitude() <= zt.threshold(scale),
    }
}

/// Element of a coefficient field.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: FieldMode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;

    /// Parses `"p/q"`, an integer, or a decimal literal such as `"-1.75e-2"`.
    fn parse_literal(s: &str) -> Result<Self, ScalarError>;

    /// Identically zero, with no tolerance.
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;

    /// `|self|` as a float; used for zero-test scales.
    fn magnitude(&self) -> f64;
    fn to_f64(&self) -> f64;

    /// `+1` for `self >= 0`, `-1` otherwise (zero maps to `+1`).
    fn sgn(&self) -> i32 {
        if self.is_negative() {
            -1
        } else {
            1
        }
    }
}

macro_rules! forward_binops {
    ($ty:ident, $($tr:ident :: $m:ident),*) => {
        $(
            impl $tr for $ty {
                type Output = $ty;
                #[inline]
                fn $m(self, rhs: $ty) -> $ty {
                    $ty::from_inner(self.0.$m(rhs.0))
                }
            }
        )*
    };
}

/// Exact rational number in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(r: BigRational) -> Self {
        Rational(r)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    fn from_inner(r: BigRational) -> Self {
        Rational(r)
    }
}

forward_binops!(Rational, Add::add, Sub::sub, Mul::mul, Div::div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rational::parse_literal(s)
    }
}

fn parse_bigint(s: &str) -> Option<BigInt> {
    let t = s.strip_prefix('+').unwrap_or(s);
    if t.is_empty() || t == "-" {
        return None;
    }
    t.parse::<BigInt>().ok()
}

/// Exact value of a decimal literal like `-12.375e-3`.
fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all.parse::<BigInt>().ok()?);
    let shift = exp - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= pow;
    } else {
        value /= pow;
    }
    Some(if neg { -value } else { value })
}

impl Scalar for Rational {
    const MODE: FieldMode = FieldMode::Exact;

    fn zero() -> Self {
        Rational(BigRational::zero())
    }

    fn one() -> Self {
        Rational(BigRational::one())
    }

    fn from_i64(v: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }

    fn parse_literal(s: &str) -> Result<Self, ScalarError> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p = parse_bigint(p.trim()).ok_or_else(|| ScalarError::Parse(s.to_string()))?;
            let q = parse_bigint(q.trim()).ok_or_else(|| ScalarError::Parse(s.to_string()))?;
            if q.is_zero() {
                return Err(ScalarError::ZeroDenominator(s.to_string()));
            }
            return Ok(Rational(BigRational::new(p, q)));
        }
        parse_decimal(s)
            .map(Rational)
            .ok_or_else(|| ScalarError::Parse(s.to_string()))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    fn magnitude(&self) -> f64 {
        self.0.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

/// Finite binary64 value.
#[derive(Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct F64(f64);

impl F64 {
    pub fn new(v: f64) -> Result<Self, ScalarError> {
        if v.is_finite() {
            Ok(F64(v))
        } else {
            Err(ScalarError::NonFinite(v))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    fn from_inner(v: f64) -> Self {
        F64(v)
    }

    pub fn total_cmp(&self, other: &F64) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

forward_binops!(F64, Add::add, Sub::sub, Mul::mul, Div::div);

impl Neg for F64 {
    type Output = F64;
    fn neg(self) -> F64 {
        F64(-self.0)
    }
}

impl fmt::Debug for F64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Display for F64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Rust's float Display is the shortest string that round-trips.
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for F64 {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        F64::parse_literal(s)
    }
}

impl From<F64> for f64 {
    fn from(v: F64) -> f64 {
        v.0
    }
}

impl Scalar for F64 {
    const MODE: FieldMode = FieldMode::Float;

    fn zero() -> Self {
        F64(0.0)
    }

    fn one() -> Self {
        F64(1.0)
    }

    fn from_i64(v: i64) -> Self {
        F64(v as f64)
    }

    fn parse_literal(s: &str) -> Result<Self, ScalarError> {
        let s = s.trim();
        if s.contains('/') {
            let r = Rational::parse_literal(s)?;
            return F64::new(r.to_f64());
        }
        let lower = s.to_ascii_lowercase();
        if lower.contains("inf") || lower.contains("nan") {
            return Err(ScalarError::Parse(s.to_string()));
        }
        let v: f64 = s.parse().map_err(|_| ScalarError::Parse(s.to_string()))?;
        F64::new(v)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }

    fn is_negative(&self) -> bool {
        self.0 < 0.0
    }

    fn magnitude(&self) -> f64 {
        self.0.abs()
    }

    fn to_f64(&self) -> f64 {
        self.0
    }
}
