//! Dual-mode nonnegative-friendly arithmetic: exact rationals or floats.
//!
//! Classification criteria compare squared weights and squared vertex norms.
//! When those are given as rationals every comparison is exact; anything that
//! touches a float becomes a float (contagion) and is compared within a
//! tolerance by the callers that care. Cross-mode ordering is still exact:
//! every finite `f64` is a rational, so `Exact(1/2) == Float(0.5)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

/// Default comparison tolerance for float-mode data.
pub const DEFAULT_EPS: f64 = 1e-9;

/// A real scalar that is either an exact rational or a finite float.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact rational `num/den`. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Float scalar. Panics on NaN or infinity: those never denote a weight,
    /// a norm, or a mass, and admitting them would break total ordering.
    pub fn float(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite scalar: {x}");
        Scalar::Float(x)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or_else(|| {
                // Out-of-range rationals only arise from adversarial input.
                if r.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }),
            Scalar::Float(x) => *x,
        }
    }

    /// The value as an exact rational (floats convert losslessly).
    fn as_rational(&self) -> BigRational {
        match self {
            Scalar::Exact(r) => r.clone(),
            Scalar::Float(x) => BigRational::from_float(*x).expect("finite by construction"),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Float(x) => *x > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    /// Equality up to `eps`; exact when both sides are exact.
    pub fn eq_within(&self, other: &Scalar, eps: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= eps,
        }
    }

    /// Square root; stays exact when the reduced numerator and denominator
    /// are both perfect squares, otherwise falls back to a float.
    pub fn sqrt(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => {
                assert!(!r.is_negative(), "sqrt of negative scalar");
                if let Some(root) = rational_nth_root(r, 2) {
                    Scalar::Exact(root)
                } else {
                    Scalar::Float(self.to_f64().sqrt())
                }
            }
            Scalar::Float(x) => {
                assert!(*x >= 0.0, "sqrt of negative scalar");
                Scalar::Float(x.sqrt())
            }
        }
    }

    /// `self` raised to a rational power. Exact when base and exponent are
    /// exact and the required integer root exists; float otherwise.
    /// Requires a nonnegative base.
    pub fn powr(&self, alpha: &Scalar) -> Scalar {
        assert!(!self.is_negative(), "power of negative base");
        if let (Scalar::Exact(base), Scalar::Exact(expo)) = (self, alpha) {
            if let Some(v) = rational_pow(base, expo) {
                return Scalar::Exact(v);
            }
        }
        Scalar::Float(self.to_f64().powf(alpha.to_f64()))
    }

    /// Decimal rendering with 17 significant digits (used by reports for
    /// float values; exact values print as `p/q`).
    pub fn to_decimal_string(&self) -> String {
        format!("{:.16e}", self.to_f64())
    }
}

/// Exact `n`-th root of a nonnegative rational, if one exists.
fn rational_nth_root(r: &BigRational, n: u32) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer().nth_root(n);
    let den = r.denom().nth_root(n);
    if &num.pow(n) == r.numer() && &den.pow(n) == r.denom() {
        Some(BigRational::new(num, den))
    } else {
        None
    }
}

/// Exact `base^(p/q)` for nonnegative rational base, if representable.
fn rational_pow(base: &BigRational, expo: &BigRational) -> Option<BigRational> {
    if base.is_zero() {
        return if expo.is_positive() {
            Some(BigRational::zero())
        } else if expo.is_zero() {
            Some(BigRational::one())
        } else {
            None
        };
    }
    let p = expo.numer().to_i32()?;
    let q = expo.denom().to_u32()?;
    if p.unsigned_abs() > 256 || q > 256 {
        return None; // keep exact blow-up bounded; callers fall back to floats
    }
    let powed = if p >= 0 {
        base.pow(p)
    } else {
        base.pow(-p).recip()
    };
    if q == 1 {
        Some(powed)
    } else {
        rational_nth_root(&powed, q)
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "scalar division by zero");
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => Scalar::Float(self.to_f64() / rhs.to_f64()),
        }
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            _ => self.as_rational() == other.as_rational(),
        }
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => {
                a.partial_cmp(b).expect("finite by construction")
            }
            _ => self.as_rational().cmp(&other.as_rational()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

/// A nonnegative extended real: a finite scalar or infinity.
///
/// Optimal constants are suprema of ratios and may be unbounded; infinity is
/// a first-class verdict, never an error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extended {
    Finite(Scalar),
    Infinite,
}

impl Extended {
    pub fn zero() -> Self {
        Extended::Finite(Scalar::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn as_finite(&self) -> Option<&Scalar> {
        match self {
            Extended::Finite(s) => Some(s),
            Extended::Infinite => None,
        }
    }

    /// `num / den` with the convention `positive / 0 = ∞`.
    /// Callers must rule out `0 / 0` beforehand.
    pub fn div_or_inf(num: &Scalar, den: &Scalar) -> Extended {
        if den.is_zero() {
            assert!(num.is_positive(), "0/0 has no extended value");
            Extended::Infinite
        } else {
            Extended::Finite(num / den)
        }
    }

    /// Agreement within `eps`: infinities only match infinities.
    pub fn eq_within(&self, other: &Extended, eps: f64) -> bool {
        match (self, other) {
            (Extended::Infinite, Extended::Infinite) => true,
            (Extended::Finite(a), Extended::Finite(b)) => a.eq_within(b, eps),
            _ => false,
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Infinite, Extended::Infinite) => Ordering::Equal,
            (Extended::Infinite, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Finite(_), Extended::Infinite) => Ordering::Less,
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
        }
    }
}

impl From<Scalar> for Extended {
    fn from(s: Scalar) -> Self {
        Extended::Finite(s)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(s) => write!(f, "{s}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}
