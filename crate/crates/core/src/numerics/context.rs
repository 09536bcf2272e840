use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::scaled::ScaledReal;
use crate::error::{Error, Result};

pub const DEFAULT_MANTISSA_BITS: u32 = 256;
pub const DEFAULT_TAIL_TOL: f64 = 1e-40;
pub const MIN_MANTISSA_BITS: u32 = 64;

/// Guard bits for the cached `log2 q` so that `q^{e/d}` stays accurate to
/// working precision for every `i64` exponent.
const LOG_GUARD: u32 = 128;

/// Largest |n| for which `q^n` is formed as an exact rational power.
const EXACT_POWER_LIMIT: u64 = 256;

/// Exact description of a base: `q = rational^(num/den)`.
#[derive(Clone, Debug, PartialEq)]
struct Base {
    rational: Rational,
    num: u32,
    den: u32,
}

impl Base {
    fn reduced(rational: Rational, num: u32, den: u32) -> Base {
        let g = gcd(num, den);
        Base {
            rational,
            num: num / g,
            den: den / g,
        }
    }

    fn evaluate(&self, prec: u32) -> Float {
        let r = Float::with_val(prec + LOG_GUARD, &self.rational);
        if self.num == 1 && self.den == 1 {
            return Float::with_val(prec, &self.rational);
        }
        let mut l = r;
        l.ln_mut();
        l *= self.num;
        l /= self.den;
        l.exp_mut();
        Float::with_val(prec, &l)
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Parses a decimal literal (`0.6`, `.5`, `25e-2`, `-1.5E+3`) exactly.
pub fn parse_decimal(literal: &str) -> Result<Rational> {
    let bad = || Error::MalformedLiteral(literal.to_string());
    let s = literal.trim();
    let (body, exp10) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, body) = match body.as_bytes().first() {
        Some(b'-') => (true, &body[1..]),
        Some(b'+') => (false, &body[1..]),
        _ => (false, body),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if int_part.len() + frac_part.len() == 0 || !all_digits(int_part) || !all_digits(frac_part) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: Integer = digits.parse().map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = exp10 - frac_part.len() as i64;
    let pow = Integer::from(10).pow(u32::try_from(scale.unsigned_abs()).map_err(|_| bad())?);
    Ok(if scale >= 0 {
        Rational::from(numer * pow)
    } else {
        Rational::from((numer, pow))
    })
}

/// Evaluation context: the base `q ∈ (0,1)`, its square root `p` (the
/// exponent lattice unit), working precision and series truncation target.
///
/// Contexts are immutable; sibling contexts for the bases `q²` and `√q` and
/// higher-precision copies are derived from the exact base description, so
/// every precision level sees the same mathematical `q`.
#[derive(Clone, Debug)]
pub struct QContext {
    base: Base,
    literal: String,
    bits: u32,
    tail_tol: f64,
    q: Float,
    p: Float,
    log2_q: Float,
}

/// Validates and builds a context from an exact decimal literal.
pub fn make_context(q_literal: &str, mantissa_bits: u32, tail_tol: f64) -> Result<QContext> {
    let rational = parse_decimal(q_literal)?;
    if rational <= 0 || rational >= 1 {
        return Err(Error::QOutOfRange(q_literal.trim().to_string()));
    }
    if mantissa_bits < MIN_MANTISSA_BITS {
        return Err(Error::PrecisionTooLow(mantissa_bits));
    }
    if !(tail_tol > 0.0 && tail_tol < 2f64.powi(-32)) {
        return Err(Error::InvalidTolerance(tail_tol));
    }
    Ok(QContext::build(
        Base::reduced(rational, 1, 1),
        q_literal.trim().to_string(),
        mantissa_bits,
        tail_tol,
    ))
}

impl QContext {
    fn build(base: Base, literal: String, bits: u32, tail_tol: f64) -> QContext {
        let q = base.evaluate(bits);
        let mut p = Float::with_val(bits + LOG_GUARD, &base.evaluate(bits + LOG_GUARD));
        p.sqrt_mut();
        let p = Float::with_val(bits, &p);
        let mut log2_q = base.evaluate(bits + LOG_GUARD);
        log2_q.log2_mut();
        QContext {
            base,
            literal,
            bits,
            tail_tol,
            q,
            p,
            log2_q,
        }
    }

    /// Same base and tolerance at a different precision.
    pub fn with_bits(&self, bits: u32) -> QContext {
        QContext::build(self.base.clone(), self.literal.clone(), bits, self.tail_tol)
    }

    /// Same base and precision with a different truncation target.
    pub fn with_tail_tol(&self, tail_tol: f64) -> QContext {
        let mut c = self.clone();
        c.tail_tol = tail_tol;
        c
    }

    /// Sibling context with base `q²`.
    pub fn squared(&self) -> QContext {
        let b = &self.base;
        let base = Base::reduced(b.rational.clone(), b.num * 2, b.den);
        QContext::build(base, format!("({})^2", self.literal), self.bits, self.tail_tol)
    }

    /// Sibling context with base `√q`.
    pub fn sqrt_base(&self) -> QContext {
        let b = &self.base;
        let base = Base::reduced(b.rational.clone(), b.num, b.den * 2);
        QContext::build(base, format!("({})^(1/2)", self.literal), self.bits, self.tail_tol)
    }

    pub fn literal(&self) -> &str {
        &self.literal
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn q(&self) -> &Float {
        &self.q
    }

    pub fn p(&self) -> &Float {
        &self.p
    }

    /// Decimal digits carried by the working precision.
    pub fn digits(&self) -> u32 {
        (f64::from(self.bits) * std::f64::consts::LOG10_2).floor() as u32
    }

    pub fn zero(&self) -> ScaledReal {
        ScaledReal::zero(self.bits)
    }

    pub fn one(&self) -> ScaledReal {
        ScaledReal::one(self.bits)
    }

    pub fn real(&self, x: f64) -> ScaledReal {
        ScaledReal::from_f64(self.bits, x)
    }

    pub fn int(&self, x: i64) -> ScaledReal {
        ScaledReal::from_i64(self.bits, x)
    }

    pub fn integer(&self, x: &Integer) -> ScaledReal {
        ScaledReal::from_integer(self.bits, x)
    }

    pub fn float(&self, x: &Float) -> ScaledReal {
        ScaledReal::from_float(Float::with_val(self.bits, x))
    }

    /// Decimal literal rounded to working precision.
    pub fn parse(&self, literal: &str) -> Result<ScaledReal> {
        ScaledReal::from_sci_string(self.bits, literal)
    }

    /// `q` as a scaled value.
    pub fn q_value(&self) -> ScaledReal {
        ScaledReal::from_float(self.q.clone())
    }

    /// `p^e = q^{e/2}` on the integer lattice of half-powers.
    pub fn q_half_power(&self, e: i64) -> ScaledReal {
        self.q_power_frac(e, 2)
    }

    /// `q^{num/den}`.
    pub fn q_power_frac(&self, num: i64, den: u32) -> ScaledReal {
        if num == 0 {
            return self.one();
        }
        // Small integer powers of a rational base are rounded exactly once.
        if self.base.num == 1 && self.base.den == 1 && num % i64::from(den) == 0 {
            let n = num / i64::from(den);
            if n.unsigned_abs() <= EXACT_POWER_LIMIT {
                let r = self.base.rational.clone().pow(n as i32);
                return ScaledReal::from_float(Float::with_val(self.bits, &r));
            }
        }
        let wp = self.bits + LOG_GUARD;
        let mut t = Float::with_val(wp, &self.log2_q * num);
        t /= den;
        ScaledReal::exp2_of(&t, self.bits)
    }

    /// `q^α` for a real exponent given at working precision or better.
    pub fn q_power_real(&self, exponent: &Float) -> ScaledReal {
        let wp = self.bits + LOG_GUARD;
        let t = Float::with_val(wp, &self.log2_q * exponent);
        ScaledReal::exp2_of(&t, self.bits)
    }

    /// `q^α` for an exact rational exponent.
    pub fn q_power_rational(&self, exponent: &Rational) -> ScaledReal {
        let wp = self.bits + LOG_GUARD;
        let e = Float::with_val(wp, exponent);
        self.q_power_real(&e)
    }
}
