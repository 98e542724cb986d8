//! Scalar field abstraction shared by the exact (rational) and floating point code paths.

use std::fmt::Display;
use std::ops::{AddAssign, MulAssign, Neg, SubAssign};

use nalgebra::{DMatrix, DVector};
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Largest denominator accepted when recognizing a float as a rational.
pub const RATIONAL_MAX_DEN: u64 = 1_000_000;
/// Relative error allowed when recognizing a float as a rational.
pub const RATIONAL_TOL: f64 = 1e-12;

/// Arithmetic needed by the algebra, curvature and decomposition code.
///
/// Exact scalars answer zero tests and signs exactly; floating scalars use the
/// caller's tolerance.
pub trait Scalar:
    nalgebra::Scalar
    + PartialOrd
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
{
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Exact binary value for rationals; identity for floats.
    fn from_f64_lossy(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact value for rationals; floats must be recognizably small-denominator rationals.
    fn to_rational(&self) -> Option<Rational>;
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// -1, 0 or 1. Floats within `tol` of zero count as zero.
    fn sign(&self, tol: f64) -> i8;

    fn is_zero_tol(&self, tol: f64) -> bool {
        self.sign(tol) == 0
    }

    /// Square root when it is representable in this field.
    fn try_sqrt(&self) -> Option<Self>;

    /// Basis of the right null space of `m`.
    ///
    /// Rationals use exact row reduction; floats use an SVD and treat singular
    /// values below `rank_tol * sigma_max` as zero.
    fn nullspace(m: &DMatrix<Self>, rank_tol: f64) -> Vec<DVector<Self>>;

    fn abs_val(&self) -> Self {
        if self.sign(0.0) < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn half() -> Self {
        Self::one() / Self::from_i64(2)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_f64_lossy(x: f64) -> Self {
        Rational::from_float(x).unwrap_or_default()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn sign(&self, _tol: f64) -> i8 {
        if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }

    fn try_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        (&n * &n == *self.numer() && &d * &d == *self.denom()).then(|| Rational::new(n, d))
    }

    fn nullspace(m: &DMatrix<Self>, _rank_tol: f64) -> Vec<DVector<Self>> {
        crate::linalg::kernel(m)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        Scalar::to_f64(r)
    }

    fn from_f64_lossy(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<Rational> {
        rationalize(*self, RATIONAL_MAX_DEN, RATIONAL_TOL)
    }

    fn sign(&self, tol: f64) -> i8 {
        if self.abs() <= tol {
            0
        } else if *self > 0.0 {
            1
        } else {
            -1
        }
    }

    fn try_sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn nullspace(m: &DMatrix<Self>, rank_tol: f64) -> Vec<DVector<Self>> {
        crate::linalg::svd_kernel(m, rank_tol)
    }
}

/// Parses `"p/q"`, integers and plain decimals (`"-0.25"`, `"1e-3"`) exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    // Keep the exponent bounded so hostile input cannot request a gigantic power.
    if exponent.unsigned_abs() > 4096 {
        return Err(bad());
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = Rational::from_integer(all);
    if scale >= 0 {
        r *= Rational::from_integer(num::pow(ten, scale as usize));
    } else {
        r /= Rational::from_integer(num::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

/// Best rational approximation with denominator at most `max_den`, accepted only
/// when it reproduces `x` to within `tol * max(1, |x|)`.
pub fn rationalize(x: f64, max_den: u64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let ax = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut frac = ax;
    let mut best: Option<(i128, i128)> = None;
    for _ in 0..64 {
        let a = frac.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 as u64 > max_den {
            break;
        }
        best = Some((p2, q2));
        if ((p2 as f64 / q2 as f64) - ax).abs() <= tol * ax.max(1.0) {
            break;
        }
        let rem = frac - a as f64;
        if rem <= 0.0 {
            break;
        }
        frac = 1.0 / rem;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    let (p, q) = best?;
    if ((p as f64 / q as f64) - ax).abs() > tol * ax.max(1.0) {
        return None;
    }
    let r = Rational::new(BigInt::from(p), BigInt::from(q));
    Some(if neg { -r } else { r })
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn vector_from_i64<S: Scalar>(coords: &[i64]) -> DVector<S> {
    DVector::from_iterator(coords.len(), coords.iter().map(|&c| S::from_i64(c)))
}

pub fn to_float_vector<S: Scalar>(v: &DVector<S>) -> DVector<f64> {
    v.map(|c| c.to_f64())
}

pub fn to_float_matrix<S: Scalar>(m: &DMatrix<S>) -> DMatrix<f64> {
    m.map(|c| c.to_f64())
}

/// Entrywise rationalization of a float vector; fails on the first entry that is not recognizably rational.
pub fn rationalize_vector(v: &DVector<f64>, max_den: u64, tol: f64) -> Result<DVector<Rational>> {
    let entries: Result<Vec<_>> = v
        .iter()
        .map(|&x| rationalize(x, max_den, tol).ok_or(Error::NotRational(x)))
        .collect();
    Ok(DVector::from_vec(entries?))
}
