//! Sign, arbitrary-precision mantissa and unbounded binary exponent.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};

/// Extra bits carried while converting between binary and decimal exponents.
const CONVERSION_GUARD: u32 = 128;

/// A real number `sign · mantissa · 2^exponent2` with `mantissa ∈ [1, 2)`.
///
/// The mantissa is an MPFR float whose own exponent never leaves `[0, 2)`;
/// the scale lives in a separate `i64`, so values such as `q^{-10^6}` are
/// representable without overflow regardless of MPFR's exponent limits.
#[derive(Clone, Debug)]
pub struct ScaledReal {
    // Signed mantissa: zero, or 1 <= |mant| < 2.
    mant: Float,
    exp: i64,
}

impl ScaledReal {
    pub fn zero(prec: u32) -> Self {
        ScaledReal {
            mant: Float::new(prec),
            exp: 0,
        }
    }

    pub fn one(prec: u32) -> Self {
        ScaledReal {
            mant: Float::with_val(prec, 1),
            exp: 0,
        }
    }

    /// Builds `mant · 2^exp` from an arbitrary finite float.
    pub fn from_parts(mant: Float, exp: i64) -> Self {
        assert!(mant.is_finite(), "ScaledReal mantissa must be finite");
        let mut s = ScaledReal { mant, exp };
        s.normalize();
        s
    }

    pub fn from_float(value: Float) -> Self {
        Self::from_parts(value, 0)
    }

    pub fn from_f64(prec: u32, value: f64) -> Self {
        Self::from_float(Float::with_val(prec, value))
    }

    pub fn from_i64(prec: u32, value: i64) -> Self {
        Self::from_float(Float::with_val(prec, value))
    }

    pub fn from_integer(prec: u32, value: &Integer) -> Self {
        // Wide integers exceed the float's exponent only beyond 2^(2^30) bits.
        Self::from_float(Float::with_val(prec, value))
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            // Canonical zero: positive sign, zero exponent.
            self.mant = Float::new(self.mant.prec());
            self.exp = 0;
            return;
        }
        let e = self.mant.get_exp().expect("finite nonzero float has an exponent");
        // MPFR mantissas live in [0.5, 1); shift into [1, 2).
        let shift = e - 1;
        if shift > 0 {
            self.mant >>= shift as u32;
        } else if shift < 0 {
            self.mant <<= (-shift) as u32;
        }
        self.exp = self
            .exp
            .checked_add(i64::from(shift))
            .expect("ScaledReal exponent overflow");
    }

    pub fn prec(&self) -> u32 {
        self.mant.prec()
    }

    /// Returns a copy rounded (or extended) to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self::from_parts(Float::with_val(prec, &self.mant), self.exp)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    /// −1, 0 or +1.
    pub fn signum(&self) -> i32 {
        if self.mant.is_zero() {
            0
        } else if self.mant.is_sign_negative() {
            -1
        } else {
            1
        }
    }

    /// Unsigned mantissa in `[1, 2)`, or zero.
    pub fn mantissa(&self) -> Float {
        Float::with_val(self.prec(), self.mant.abs_ref())
    }

    /// Binary exponent of the normalized representation.
    pub fn exponent2(&self) -> i64 {
        self.exp
    }

    pub fn abs(&self) -> Self {
        ScaledReal {
            mant: Float::with_val(self.prec(), self.mant.abs_ref()),
            exp: self.exp,
        }
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        ScaledReal {
            mant: self.mant.clone(),
            exp: self.exp.checked_add(k).expect("ScaledReal exponent overflow"),
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        let prec = self.prec();
        let m = Float::with_val(prec, 1) / &self.mant;
        Self::from_parts(m, -self.exp)
    }

    pub fn sqrt(&self) -> Self {
        assert!(self.signum() >= 0, "square root of a negative ScaledReal");
        if self.is_zero() {
            return self.clone();
        }
        let prec = self.prec();
        let mut m = Float::with_val(prec, &self.mant);
        let mut e = self.exp;
        if e.rem_euclid(2) != 0 {
            m <<= 1u32;
            e -= 1;
        }
        m.sqrt_mut();
        Self::from_parts(m, e / 2)
    }

    /// Integer power by binary powering; `0^0 = 1`.
    pub fn powi(&self, n: i64) -> Self {
        let prec = self.prec();
        if n == 0 {
            return Self::one(prec);
        }
        if self.is_zero() {
            assert!(n > 0, "negative power of zero");
            return self.clone();
        }
        let mut base = self.clone();
        let mut acc = Self::one(prec);
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    /// Approximate `log2 |x|` as an `f64`; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let m = self.mant.to_f64().abs();
        self.exp as f64 + m.log2()
    }

    /// Natural logarithm of `|x|` at the value's own precision.
    pub fn ln_abs(&self) -> Float {
        assert!(!self.is_zero(), "logarithm of zero");
        let wp = self.prec() + 64;
        let mut l = Float::with_val(wp, self.mant.abs_ref());
        l.ln_mut();
        let ln2 = Float::with_val(wp, rug::float::Constant::Log2);
        l += ln2 * Integer::from(self.exp);
        Float::with_val(self.prec(), l)
    }

    /// `exp(x)` for a plain float argument, with the result's scale carried
    /// in the binary exponent.
    pub fn exp_of(x: &Float) -> Self {
        let prec = x.prec();
        let wp = prec + CONVERSION_GUARD;
        let mut t = Float::with_val(wp, x);
        t /= Float::with_val(wp, rug::float::Constant::Log2);
        Self::exp2_of(&t, prec)
    }

    /// `2^t` for a plain float exponent, rounded to `prec` bits.
    pub fn exp2_of(t: &Float, prec: u32) -> Self {
        let floor = Float::with_val(t.prec(), t.floor_ref());
        let k = floor
            .to_integer()
            .and_then(|i| i.to_i64())
            .expect("ScaledReal exponent overflow");
        let mut frac = Float::with_val(t.prec(), t - &floor);
        frac.exp2_mut();
        Self::from_parts(Float::with_val(prec, &frac), k)
    }

    /// Lossy conversion; saturates to `±inf` or `0`.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let m = self.mant.to_f64();
        if self.exp > 1100 {
            return m.signum() * f64::INFINITY;
        }
        if self.exp < -1100 {
            return 0.0;
        }
        m * (self.exp as f64).exp2()
    }

    /// Converts to a plain float; panics when the scale exceeds MPFR's range.
    pub fn to_float(&self) -> Float {
        let shift = i32::try_from(self.exp).expect("value out of MPFR exponent range");
        let mut f = self.mant.clone();
        if shift >= 0 {
            f <<= shift as u32;
        } else {
            f >>= (-shift) as u32;
        }
        f
    }

    /// Relative difference `|a − b| / |b|` as a value; `0` when both are zero
    /// and `+inf` (as `f64`) semantics are represented by `None`.
    pub fn relative_error(&self, reference: &ScaledReal) -> Option<ScaledReal> {
        if reference.is_zero() {
            return if self.is_zero() {
                Some(ScaledReal::zero(self.prec()))
            } else {
                None
            };
        }
        Some((self - reference).abs() / reference.abs())
    }

    /// `log10` of the relative error, as an `f64` (−inf on exact agreement).
    pub fn relative_error_log10(&self, reference: &ScaledReal) -> f64 {
        match self.relative_error(reference) {
            None => f64::INFINITY,
            Some(r) => r.log2_abs() * std::f64::consts::LOG10_2,
        }
    }

    /// Scientific notation `[-]d.ddd…e[-]E` with `digits` significant digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return "0e0".to_string();
        }
        let prec = self.prec();
        let wp = prec + CONVERSION_GUARD;
        // log10|x| = log10 m + exp * log10 2
        let mut l = Float::with_val(wp, self.mant.abs_ref());
        l.log10_mut();
        let mut log10_2 = Float::with_val(wp, 2);
        log10_2.log10_mut();
        l += log10_2 * Integer::from(self.exp);
        let e10_f = Float::with_val(wp, l.floor_ref());
        let e10 = e10_f
            .to_integer()
            .and_then(|i| i.to_i64())
            .expect("decimal exponent overflow");
        let frac = Float::with_val(wp, &l - &e10_f);
        let scaled = Float::with_val(prec + 32, Float::with_val(wp, 10).pow(&frac));
        let (_, ds, exp) = scaled.to_sign_string_exp_round(10, Some(digits), Round::Nearest);
        let exp = i64::from(exp.unwrap_or(1));
        let e = e10 + exp - 1;
        let sign = if self.signum() < 0 { "-" } else { "" };
        let (head, tail) = ds.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{e}")
        } else {
            format!("{sign}{head}.{tail}e{e}")
        }
    }

    /// Parses the output of [`ScaledReal::to_sci_string`] (and any plain
    /// decimal literal) at `prec` bits.
    pub fn from_sci_string(prec: u32, text: &str) -> Result<Self> {
        let s = text.trim();
        let bad = || Error::MalformedLiteral(text.to_string());
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], &s[i + 1..]),
            None => (s, "0"),
        };
        if mantissa.is_empty()
            || !mantissa
                .chars()
                .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+'))
        {
            return Err(bad());
        }
        let e10: i64 = exponent.parse().map_err(|_| bad())?;
        let wp = prec + CONVERSION_GUARD;
        let parsed = Float::parse(mantissa).map_err(|_| bad())?;
        let m = Float::with_val(wp, parsed);
        if m.is_zero() {
            return Ok(ScaledReal::zero(prec));
        }
        let mut log2_10 = Float::with_val(wp, 10);
        log2_10.log2_mut();
        let t = log2_10 * Integer::from(e10);
        let scale = Self::exp2_of(&t, wp);
        Ok((&Self::from_float(m) * &scale).with_prec(prec))
    }
}

impl fmt::Display for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        f.write_str(&self.to_sci_string(digits))
    }
}

impl PartialEq for ScaledReal {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for ScaledReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return Some(sa.cmp(&sb));
        }
        if sa == 0 {
            return Some(Ordering::Equal);
        }
        let magnitude = self
            .exp
            .cmp(&other.exp)
            .then_with(|| {
                self.mant
                    .as_abs()
                    .partial_cmp(&*other.mant.as_abs())
                    .unwrap_or(Ordering::Equal)
            });
        Some(if sa > 0 { magnitude } else { magnitude.reverse() })
    }
}

fn add_impl(a: &ScaledReal, b: &ScaledReal) -> ScaledReal {
    let prec = a.prec().max(b.prec());
    if a.is_zero() {
        return b.with_prec(prec);
    }
    if b.is_zero() {
        return a.with_prec(prec);
    }
    let (hi, lo) = if a.exp >= b.exp { (a, b) } else { (b, a) };
    let gap = hi.exp - lo.exp;
    if gap > i64::from(prec) + 4 {
        // |lo| is below half an ulp of |hi|.
        return hi.with_prec(prec);
    }
    let mut shifted = lo.mant.clone();
    shifted >>= gap as u32;
    let sum = Float::with_val(prec, &hi.mant + &shifted);
    ScaledReal::from_parts(sum, hi.exp)
}

fn mul_impl(a: &ScaledReal, b: &ScaledReal) -> ScaledReal {
    let prec = a.prec().max(b.prec());
    if a.is_zero() || b.is_zero() {
        return ScaledReal::zero(prec);
    }
    let m = Float::with_val(prec, &a.mant * &b.mant);
    let e = a.exp.checked_add(b.exp).expect("ScaledReal exponent overflow");
    ScaledReal::from_parts(m, e)
}

fn div_impl(a: &ScaledReal, b: &ScaledReal) -> ScaledReal {
    assert!(!b.is_zero(), "ScaledReal division by zero");
    let prec = a.prec().max(b.prec());
    if a.is_zero() {
        return ScaledReal::zero(prec);
    }
    let m = Float::with_val(prec, &a.mant / &b.mant);
    let e = a.exp.checked_sub(b.exp).expect("ScaledReal exponent overflow");
    ScaledReal::from_parts(m, e)
}

impl Neg for &ScaledReal {
    type Output = ScaledReal;
    fn neg(self) -> ScaledReal {
        ScaledReal {
            mant: Float::with_val(self.prec(), -&self.mant),
            exp: self.exp,
        }
    }
}

impl Neg for ScaledReal {
    type Output = ScaledReal;
    fn neg(mut self) -> ScaledReal {
        self.mant = -self.mant;
        self
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<&ScaledReal> for &ScaledReal {
            type Output = ScaledReal;
            fn $method(self, rhs: &ScaledReal) -> ScaledReal {
                $imp(self, rhs)
            }
        }
        impl $trait<ScaledReal> for ScaledReal {
            type Output = ScaledReal;
            fn $method(self, rhs: ScaledReal) -> ScaledReal {
                $imp(&self, &rhs)
            }
        }
        impl $trait<&ScaledReal> for ScaledReal {
            type Output = ScaledReal;
            fn $method(self, rhs: &ScaledReal) -> ScaledReal {
                $imp(&self, rhs)
            }
        }
        impl $trait<ScaledReal> for &ScaledReal {
            type Output = ScaledReal;
            fn $method(self, rhs: ScaledReal) -> ScaledReal {
                $imp(self, &rhs)
            }
        }
    };
}

fn sub_impl(a: &ScaledReal, b: &ScaledReal) -> ScaledReal {
    add_impl(a, &-b)
}

binary_op!(Add, add, add_impl);
binary_op!(Sub, sub, sub_impl);
binary_op!(Mul, mul, mul_impl);
binary_op!(Div, div, div_impl);

impl std::iter::Sum for ScaledReal {
    fn sum<I: Iterator<Item = ScaledReal>>(iter: I) -> ScaledReal {
        iter.fold(ScaledReal::zero(64), |acc, x| acc + x)
    }
}
