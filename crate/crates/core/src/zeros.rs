//! Positive real zeros of q-polynomials, located on a geometric grid and
//! polished in log-x, plus the zero-symmetry diagnostics.

use rayon::prelude::*;
use rug::float::Round;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::numerics::{QContext, ScaledReal};
use crate::qpoly::{differentiate, eval_poly, q_laguerre, stieltjes_wigert, QPolynomial};

/// Target log-width of a bisection bracket before Newton polishing.
const BISECT_BITS: i32 = 80;
const NEWTON_STEPS: usize = 12;
const MAX_BISECTIONS: usize = 400;

/// Mesh steps `1/den` tried in turn on the default range.
const MESH_DENOMINATORS: [i64; 3] = [2, 4, 8];

#[derive(Clone, Debug)]
pub struct ZeroSet {
    pub tag: String,
    /// Ascending zeros.
    pub zeros: Vec<ScaledReal>,
    /// Sign-change brackets `[a_k, b_k]` from the grid scan.
    pub brackets: Vec<(ScaledReal, ScaledReal)>,
    /// `|P(x_k)|` at the returned zeros.
    pub residuals: Vec<ScaledReal>,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

/// Grid point `x = q^{hint − s}` with `s = num/den`.
fn grid_point(ctx: &QContext, hint: &Rational, num: i64, den: i64) -> ScaledReal {
    let e = hint - Rational::from((num, den));
    ctx.q_power_rational(&e)
}

/// `s`-range guaranteed to hold every positive zero, from Fujiwara's bound
/// applied to `P` and to its reversal.
fn root_bound_range(ctx: &QContext, p: &QPolynomial, hint: &Rational) -> (i64, i64) {
    let c = p.coefficients();
    let n = c.len() - 1;
    let log2_ratio = |num: &ScaledReal, den: &ScaledReal| num.log2_abs() - den.log2_abs();
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::NEG_INFINITY;
    for k in 1..=n {
        if !c[n - k].is_zero() {
            hi = hi.max(log2_ratio(&c[n - k], &c[n]) / k as f64);
        }
        if !c[k].is_zero() {
            lo = lo.max(log2_ratio(&c[k], &c[0]) / k as f64);
        }
    }
    // log2 of the largest and smallest possible zero
    let log2_max = hi + 1.0;
    let log2_min = -(lo + 1.0);
    let log2_q = ctx.q().to_f64().log2();
    let h = hint.to_f64();
    let s_of = |log2_x: f64| h - log2_x / log2_q;
    (s_of(log2_min).floor() as i64 - 1, s_of(log2_max).ceil() as i64 + 1)
}

/// Brackets of sign changes on the mesh `s ∈ [s_lo, s_hi]` with step `1/den`.
fn scan(
    ctx: &QContext,
    p: &QPolynomial,
    hint: &Rational,
    den: i64,
    (s_lo, s_hi): (i64, i64),
) -> Vec<(ScaledReal, ScaledReal)> {
    let lo = s_lo * den;
    let hi = s_hi * den;
    let points: Vec<(ScaledReal, i32)> = (lo..=hi)
        .into_par_iter()
        .map(|s| {
            let x = grid_point(ctx, hint, s, den);
            let v = eval_poly(ctx, p, &x);
            (x, v.signum())
        })
        .collect();
    let mut brackets = Vec::new();
    let mut i = 0;
    while i + 1 < points.len() {
        let (xa, sa) = &points[i];
        let (xb, sb) = &points[i + 1];
        if *sa == 0 {
            brackets.push((xa.clone(), xa.clone()));
        } else if *sb != 0 && sa != sb {
            brackets.push((xa.clone(), xb.clone()));
        }
        i += 1;
    }
    if let Some((x, 0)) = points.last() {
        brackets.push((x.clone(), x.clone()));
    }
    brackets
}

/// Bisection in `u = ln x` followed by safeguarded Newton steps.
fn polish(ctx: &QContext, p: &QPolynomial, dp: &QPolynomial, a: &ScaledReal, b: &ScaledReal) -> ScaledReal {
    if a == b {
        return a.clone();
    }
    let prec = ctx.bits();
    let eval = |u: &Float| -> (ScaledReal, ScaledReal) {
        let x = ScaledReal::exp_of(u);
        let v = eval_poly(ctx, p, &x);
        (x, v)
    };
    // A zero sitting on a grid point can land just outside its bracket after
    // rounding; pad by far less than the mesh spacing so the sign change survives.
    let pad_scale = |u: &Float| Float::with_val(prec, u.clone().abs().max(&Float::with_val(prec, 1)));
    let pad = |u: &Float| pad_scale(u) * Float::with_val(prec, Float::i_exp(1, -(prec as i32 / 2)));
    let mut ua = a.ln_abs();
    ua -= pad(&ua);
    let mut ub = b.ln_abs();
    ub += pad(&ub);
    let (lo, hi) = (ua.clone(), ub.clone());
    let sa = eval(&ua).1.signum();
    // 2^-80, or a few ulps of u when the working precision cannot reach that
    let ulps = pad_scale(&ua).max(&pad_scale(&ub)) * Float::with_val(prec, Float::i_exp(1, 8 - prec as i32));
    let stop = ulps.max(&Float::with_val(prec, Float::i_exp(1, -BISECT_BITS)));
    for _ in 0..MAX_BISECTIONS {
        let width = Float::with_val(prec, &ub - &ua);
        if width < stop {
            break;
        }
        let mid = Float::with_val(prec, &ua + &ub) / 2u32;
        let (_, v) = eval(&mid);
        match v.signum() {
            0 => return ScaledReal::exp_of(&mid),
            s if s == sa => ua = mid,
            _ => ub = mid,
        }
    }
    let mut u = Float::with_val(prec, &ua + &ub) / 2u32;
    let tiny = Float::with_val(prec, Float::i_exp(1, 16 - prec as i32));
    for _ in 0..NEWTON_STEPS {
        let (x, v) = eval(&u);
        if v.is_zero() {
            break;
        }
        let slope = eval_poly(ctx, dp, &x) * &x;
        if slope.is_zero() {
            break;
        }
        let step = (v / slope).to_float();
        let next = Float::with_val(prec, &u - &step);
        if next <= lo || next >= hi {
            break;
        }
        u = next;
        if step.abs() < tiny {
            break;
        }
    }
    let x = ScaledReal::exp_of(&u);
    if x < *a {
        a.clone()
    } else if x > *b {
        b.clone()
    } else {
        x
    }
}

fn locate(ctx: &QContext, p: &QPolynomial, hint: &Rational) -> Result<ZeroSet> {
    let n = p.degree().ok_or_else(|| Error::InvalidArgument("zero polynomial has no isolated zeros".into()))?;
    if n == 0 {
        return Ok(ZeroSet {
            tag: p.tag().to_string(),
            zeros: vec![],
            brackets: vec![],
            residuals: vec![],
        });
    }
    if p.coefficient(0).is_none_or(ScaledReal::is_zero) {
        return Err(Error::InvalidArgument("polynomial vanishes at x = 0".into()));
    }
    let default_range = (-1, 2 * n as i64 + 2);
    // Edge zeros can drift off the `q^{1−2k−α}` ansatz; the last pass covers
    // the rigorous root bounds instead.
    let passes = MESH_DENOMINATORS
        .iter()
        .map(|&den| (den, default_range))
        .chain(std::iter::once({
            let (lo, hi) = root_bound_range(ctx, p, hint);
            (8, (lo.min(default_range.0), hi.max(default_range.1)))
        }));
    let mut found = 0;
    for (den, range) in passes {
        let brackets = scan(ctx, p, hint, den, range);
        found = brackets.len();
        if found != n {
            continue;
        }
        let dp = differentiate(p, 1);
        let zeros: Vec<ScaledReal> = brackets.par_iter().map(|(a, b)| polish(ctx, p, &dp, a, b)).collect();
        let residuals = zeros.iter().map(|x| eval_poly(ctx, p, x).abs()).collect();
        return Ok(ZeroSet {
            tag: p.tag().to_string(),
            zeros,
            brackets,
            residuals,
        });
    }
    Err(Error::ZeroCountMismatch { expected: n, found })
}

/// All `n` positive zeros of a degree-`n` polynomial known to have `n` simple
/// positive zeros. `hint_exponent` centers the grid `x = q^{hint − s}`.
pub fn find_positive_zeros(ctx: &QContext, p: &QPolynomial, hint_exponent: &Rational) -> Result<ZeroSet> {
    match locate(ctx, p, hint_exponent) {
        Err(Error::ZeroCountMismatch { .. }) => {
            let hi = ctx.with_bits(ctx.bits() * 2);
            let lifted = QPolynomial::new(p.tag(), p.coefficients().iter().map(|c| c.with_prec(hi.bits())).collect());
            let mut z = locate(&hi, &lifted, hint_exponent)?;
            let b = ctx.bits();
            z.zeros = z.zeros.iter().map(|x| x.with_prec(b)).collect();
            Ok(z)
        }
        other => other,
    }
}

/// Zeros of the monic Stieltjes-Wigert polynomial `S_n`.
pub fn sw_zeros(ctx: &QContext, n: usize) -> Result<ZeroSet> {
    find_positive_zeros(ctx, &stieltjes_wigert(ctx, n), &Rational::new())
}

/// Zeros of `L_n^{(α)}(x; q)`, grid centered per `x_k ∼ q^{1−2k−α}`.
pub fn laguerre_zeros(ctx: &QContext, n: usize, alpha: &Rational) -> Result<ZeroSet> {
    let p = q_laguerre(ctx, n, alpha)?;
    find_positive_zeros(ctx, &p, &Rational::from(-alpha))
}

/// `q^{e} x_k x_{n+1−k}` for `k = 1..⌈n/2⌉`.
pub fn symmetry_products(ctx: &QContext, z: &ZeroSet, lattice_exponent: &Rational) -> Vec<ScaledReal> {
    let n = z.len();
    let scale = ctx.q_power_rational(lattice_exponent);
    (0..n.div_ceil(2)).map(|k| &scale * &z.zeros[k] * &z.zeros[n - 1 - k]).collect()
}

/// Round half to even at three decimals, then drop trailing zeros, keeping
/// the point: `0.970 → "0.97"`, `1.000 → "1."`.
pub fn three_decimal(v: &ScaledReal) -> String {
    let prec = v.prec().max(64) + 32;
    let mut scaled = Float::with_val(prec, &v.with_prec(prec).to_float() * 1000u32);
    scaled.round_even_mut();
    let (i, _) = scaled.to_integer_round(Round::Nearest).expect("finite value");
    let negative = i < 0;
    let abs = Integer::from(i.abs_ref());
    let (whole, frac) = abs.div_rem(Integer::from(1000));
    let mut digits = format!("{:03}", frac.to_u32().expect("remainder below 1000"));
    while digits.ends_with('0') {
        digits.pop();
    }
    let sign = if negative { "-" } else { "" };
    format!("{sign}{whole}.{digits}")
}

/// Comma-separated `three_decimal` list.
pub fn three_decimal_list(values: &[ScaledReal]) -> String {
    values.iter().map(three_decimal).collect::<Vec<_>>().join(",")
}

pub const ZEROS_CSV_HEADER: &str = "k,x_k,x_{n+1-k},normalized_product";

/// CSV rows `k, x_k, x_{n+1−k}, s_k` with `digits` significant digits.
pub fn zeros_csv_lines(z: &ZeroSet, products: &[ScaledReal], digits: usize) -> Vec<String> {
    let n = z.len();
    products
        .iter()
        .enumerate()
        .map(|(k, s)| {
            format!(
                "{},{},{},{}",
                k + 1,
                z.zeros[k].to_sci_string(digits),
                z.zeros[n - 1 - k].to_sci_string(digits),
                s.to_sci_string(digits)
            )
        })
        .collect()
}

/// q⁻¹-Hermite zeros `ξ_1 < … < ξ_n` through `x = q^{−n−1/2} e^{−2ξ}`.
pub fn hermite_zeros(ctx: &QContext, n: usize) -> Result<Vec<ScaledReal>> {
    let z = sw_zeros(ctx, n)?;
    let prec = ctx.bits();
    let mut ln_q = Float::with_val(prec + 32, ctx.q());
    ln_q.ln_mut();
    let shift = Float::with_val(prec + 32, &ln_q * (n as f64 + 0.5));
    // x ascending means ξ descending
    let mut xis: Vec<ScaledReal> = z
        .zeros
        .iter()
        .map(|x| {
            let t = Float::with_val(prec + 32, x.ln_abs() + &shift);
            ScaledReal::from_float(Float::with_val(prec, -t / 2u32))
        })
        .collect();
    xis.reverse();
    Ok(xis)
}

/// `max_j |ξ_j + ξ_{n+1−j}|`.
pub fn hermite_zero_symmetry(ctx: &QContext, n: usize) -> Result<ScaledReal> {
    let xis = hermite_zeros(ctx, n)?;
    let mut worst = ctx.zero();
    for j in 0..n {
        let s = (&xis[j] + &xis[n - 1 - j]).abs();
        if s > worst {
            worst = s;
        }
    }
    Ok(worst)
}
