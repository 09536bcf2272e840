//! The partition function `Ẑ_{L×N}`: exact evaluation by three independent
//! routes, its theta-determinant large-N limit and the convergence study
//! between the two.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::numerics::{determinant, stabilize, QContext, ScaledReal};
use crate::qpoly::{differentiate, eval_poly, stieltjes_wigert};
use crate::qseries::{falling_factorial, q_pochhammer, triple_product_f, x_jm, PochhammerLength, QFactorials, TailPolicy};

/// Significant digits every exact evaluation is confirmed to.
pub const TARGET_DIGITS: u32 = 30;

/// Matrix size `L × N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    pub n: usize,
    pub l: usize,
}

impl PartitionSpec {
    pub fn new(n: usize, l: usize) -> Result<Self> {
        if n == 0 || l == 0 {
            return Err(Error::InvalidArgument(format!("N = {n} and L = {l} must both be positive")));
        }
        Ok(PartitionSpec { n, l })
    }

    /// `⌊N/2⌋`.
    pub fn m(&self) -> usize {
        self.n / 2
    }

    /// `2m − N`: 0 for even `N`, −1 for odd.
    pub fn alpha(&self) -> i64 {
        2 * self.m() as i64 - self.n as i64
    }

    /// `N − 2m + (L−1)/2`.
    pub fn beta(&self) -> Rational {
        Rational::from(self.n as i64 - 2 * self.m() as i64) + Rational::from((self.l as i64 - 1, 2))
    }

    pub fn parity(&self) -> Parity {
        if self.n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Exponent of `λ = −q^{−N−L/2}` on the half-power lattice.
    pub fn lambda_half_exponent(&self) -> i64 {
        -(2 * self.n as i64 + self.l as i64)
    }

    pub fn lambda(&self, ctx: &QContext) -> ScaledReal {
        -ctx.q_half_power(self.lambda_half_exponent())
    }

    /// `q^{5LN²/4 + L²N/2}`.
    pub fn scaling_factor(&self, ctx: &QContext) -> ScaledReal {
        let (n, l) = (self.n as i64, self.l as i64);
        ctx.q_power_frac(5 * l * n * n + 2 * l * l * n, 4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }

    fn alpha(self) -> i64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => -1,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Wronskian,
    DetS,
    SumL1,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Wronskian => "wronskian",
            Method::DetS => "detS",
            Method::SumL1 => "sumL1",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wronskian" => Ok(Method::Wronskian),
            "detS" | "dets" => Ok(Method::DetS),
            "sumL1" | "suml1" => Ok(Method::SumL1),
            _ => Err(Error::InvalidArgument(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PartitionResult {
    pub spec: PartitionSpec,
    pub raw: ScaledReal,
    /// `q^{5LN²/4 + L²N/2} Ẑ`.
    pub scaled: ScaledReal,
    pub method: Method,
    pub verified_digits: u32,
    pub escalations: u32,
}

fn product_of_factorials(l: usize) -> Integer {
    (0..l).fold(Integer::from(1), |acc, j| acc * Integer::from(Integer::factorial(j as u32)))
}

fn sign(negative: bool, v: ScaledReal) -> ScaledReal {
    if negative {
        -v
    } else {
        v
    }
}

/// `(−1)^{LN}/∏ j! · det[S^{(i)}_{N+j}(λ)]`.
fn raw_wronskian(ctx: &QContext, spec: PartitionSpec) -> ScaledReal {
    let lambda = spec.lambda(ctx);
    let mut matrix = vec![Vec::with_capacity(spec.l); spec.l];
    for j in 0..spec.l {
        let s = stieltjes_wigert(ctx, spec.n + j);
        for (i, row) in matrix.iter_mut().enumerate() {
            row.push(eval_poly(ctx, &differentiate(&s, i), &lambda));
        }
    }
    let det = determinant(matrix) / ctx.integer(&product_of_factorials(spec.l));
    sign((spec.l * spec.n) % 2 == 1, det)
}

/// Same value through the column-normalized matrix
/// `S_ij = Σ_{k=i}^{N+j} [N+j,k] q^{k²+k/2−(k−i)(N+L/2)} (−k)_i`.
fn raw_det_s(ctx: &QContext, spec: PartitionSpec) -> ScaledReal {
    let (n, l) = (spec.n as i64, spec.l as i64);
    let t = QFactorials::new(ctx, spec.n + spec.l);
    let mut matrix = vec![Vec::with_capacity(spec.l); spec.l];
    let mut prefactor = ctx.one();
    let mut negative = (spec.l * spec.n) % 2 == 1;
    for j in 0..l {
        let top = n + j;
        for (i, row) in matrix.iter_mut().enumerate() {
            let i = i as i64;
            let mut entry = ctx.zero();
            for k in i..=top {
                // (−k)_i = (−1)^i k^{(i)}
                let w = falling_factorial(k, i as u32);
                let e = 2 * k * k + k - (k - i) * (2 * n + l);
                entry = entry + t.binomial(top as usize, k) * ctx.q_half_power(e) * ctx.integer(&w);
            }
            row.push(sign(i % 2 == 1, entry));
        }
        prefactor = prefactor * ctx.q_half_power(-2 * top * top - top);
        negative ^= top % 2 == 1;
    }
    let det = determinant(matrix) * prefactor / ctx.integer(&product_of_factorials(spec.l));
    sign(negative, det)
}

/// `Ẑ_{1×N} = q^{−N²−N/2} Σ [N k] q^{k²−kN}`.
fn raw_sum_l1(ctx: &QContext, spec: PartitionSpec) -> ScaledReal {
    let n = spec.n as i64;
    let t = QFactorials::new(ctx, spec.n);
    let sum: ScaledReal = (0..=n).map(|k| t.binomial(spec.n, k) * ctx.q_half_power(2 * k * k - 2 * k * n)).sum();
    sum * ctx.q_half_power(-2 * n * n - n)
}

/// Unstabilized single evaluation at the context's precision.
pub fn partition_raw(ctx: &QContext, spec: PartitionSpec, method: Method) -> Result<ScaledReal> {
    match method {
        Method::Wronskian => Ok(raw_wronskian(ctx, spec)),
        Method::DetS => Ok(raw_det_s(ctx, spec)),
        Method::SumL1 => {
            if spec.l != 1 {
                return Err(Error::InvalidArgument(format!("method sumL1 needs L = 1, got L = {}", spec.l)));
            }
            Ok(raw_sum_l1(ctx, spec))
        }
    }
}

/// `Ẑ_{L×N}` confirmed to [`TARGET_DIGITS`] digits by precision escalation.
pub fn partition_exact(ctx: &QContext, spec: PartitionSpec, method: Method) -> Result<PartitionResult> {
    if method == Method::SumL1 && spec.l != 1 {
        return Err(Error::InvalidArgument(format!("method sumL1 needs L = 1, got L = {}", spec.l)));
    }
    let s = stabilize(|c| partition_raw(c, spec, method), ctx, TARGET_DIGITS)?;
    let scaled = &s.value * &spec.scaling_factor(ctx);
    Ok(PartitionResult {
        spec,
        raw: s.value,
        scaled,
        method,
        verified_digits: s.verified_digits,
        escalations: s.escalations,
    })
}

/// `det R` with `R_ij = Θ_i(q^{α−j−(L−1)/2})`.
pub fn det_r(ctx: &QContext, l: usize, alpha: i64) -> Result<ScaledReal> {
    let policy = TailPolicy::from_context(ctx);
    let li = l as i64;
    let mut matrix = Vec::with_capacity(l);
    for i in 0..l {
        let mut row = Vec::with_capacity(l);
        for j in 0..li {
            let z = ctx.q_half_power(2 * alpha - 2 * j - (li - 1));
            row.push(x_jm(ctx, i as u32, 0, &z, &policy)?);
        }
        matrix.push(row);
    }
    Ok(determinant(matrix))
}

fn predicted_once(ctx: &QContext, spec: PartitionSpec) -> Result<ScaledReal> {
    let l = spec.l as i64;
    let alpha = spec.alpha();
    let d = det_r(ctx, spec.l, alpha)?;
    let euler = q_pochhammer(ctx, &ctx.q_value(), PochhammerLength::Infinite);
    let e = l - alpha - 1;
    let pre = ctx.q_power_frac(l * e * e, 4) / (euler.powi(l) * ctx.integer(&product_of_factorials(spec.l)));
    Ok(pre * d)
}

/// The large-N limit of `q^{5LN²/4+L²N/2} Ẑ_{L×N}`:
/// `q^{L(L−α−1)²/4} / ((q;q)_∞^L ∏ j!) · det R`.
pub fn predicted_scaled(ctx: &QContext, spec: PartitionSpec) -> Result<ScaledReal> {
    Ok(stabilize(|c| predicted_once(c, spec), ctx, TARGET_DIGITS)?.value)
}

/// Product forms of the limit for `L = 1, 2`.
pub fn closed_form_limit(ctx: &QContext, l: usize, parity: Parity) -> Result<ScaledReal> {
    let inf = PochhammerLength::Infinite;
    let sq = ctx.squared();
    let q = ctx.q_value();
    let poch = |a: &ScaledReal| q_pochhammer(ctx, a, inf);
    let poch2 = |a: &ScaledReal| q_pochhammer(&sq, a, inf);
    match (l, parity) {
        (1, Parity::Even) => {
            let a = poch2(&-&q);
            Ok(&a * &a / poch2(&q))
        }
        (1, Parity::Odd) => {
            let num = poch2(&-ctx.one()) * poch2(&-(&q * &q));
            Ok(ctx.q_power_frac(1, 4) * num / poch2(&q))
        }
        (2, _) => {
            let alpha = parity.alpha();
            let lo = ctx.q_half_power(2 * alpha - 1);
            let hi = ctx.q_half_power(3 - 2 * alpha);
            let euler = poch(&q);
            let odd = poch2(&q);
            let first = -(&euler * &euler * &odd * &odd * poch(&lo) * poch(&hi));
            let second = poch(&-&lo) * poch(&-&hi);
            let pre = ctx.q_half_power((alpha - 1) * (alpha - 1)) * poch(&-&q) * poch(&-ctx.one()) / ctx.int(4);
            Ok(pre * (first + second))
        }
        _ => Err(Error::InvalidArgument(format!("closed form known only for L = 1, 2; got L = {l}"))),
    }
}

#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub n: usize,
    pub parity: Parity,
    pub scaled_exact: ScaledReal,
    pub predicted: ScaledReal,
    pub ratio: ScaledReal,
    pub abs_err: ScaledReal,
    pub verified_digits: u32,
}

/// Exact (Wronskian) versus predicted scaled partition function for each
/// `N`, computed in parallel.
pub fn convergence_table(ctx: &QContext, l: usize, n_list: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("empty N list".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("N list must be strictly ascending".into()));
    }
    let limits: Vec<(Parity, ScaledReal)> = [Parity::Even, Parity::Odd]
        .into_par_iter()
        .map(|p| {
            let spec = PartitionSpec::new(if p == Parity::Even { 2 } else { 1 }, l)?;
            Ok((p, predicted_scaled(ctx, spec)?))
        })
        .collect::<Result<_>>()?;
    n_list
        .par_iter()
        .map(|&n| {
            let spec = PartitionSpec::new(n, l)?;
            let exact = partition_exact(ctx, spec, Method::Wronskian)?;
            let predicted = limits
                .iter()
                .find(|(p, _)| *p == spec.parity())
                .map(|(_, v)| v.clone())
                .expect("both parities present");
            let ratio = &exact.scaled / &predicted;
            let abs_err = (&ratio - &ctx.one()).abs();
            Ok(ConvergenceRow {
                n,
                parity: spec.parity(),
                scaled_exact: exact.scaled,
                predicted,
                ratio,
                abs_err,
                verified_digits: exact.verified_digits,
            })
        })
        .collect()
}

pub const CONVERGENCE_CSV_HEADER: &str = "N,parity,scaled_exact,predicted,ratio,abs_err";

pub fn convergence_csv_line(row: &ConvergenceRow) -> String {
    let d = row.verified_digits.max(1) as usize;
    format!(
        "{},{},{},{},{},{}",
        row.n,
        row.parity,
        row.scaled_exact.to_sci_string(d),
        row.predicted.to_sci_string(d),
        row.ratio.to_sci_string(d),
        row.abs_err.to_sci_string(d)
    )
}

/// Relative mismatch of `F(q^{−m}u) = F(u) q^{−m²/2} u^m`.
pub fn triple_product_shift_error(ctx: &QContext, m: i64, u: &ScaledReal) -> Result<ScaledReal> {
    if u.is_zero() {
        return Err(Error::ZeroArgument("triple_product_shift_check"));
    }
    let lhs = triple_product_f(ctx, &(ctx.q_half_power(-2 * m) * u))?;
    let rhs = triple_product_f(ctx, u)? * ctx.q_half_power(-m * m) * u.powi(m);
    // on a zero of F both sides vanish; compare absolutely there
    Ok(lhs.relative_error(&rhs).unwrap_or_else(|| lhs.abs()))
}

/// `true` when the shift identity holds to `10 · tail_tol`.
pub fn triple_product_shift_check(ctx: &QContext, m: i64, u: &ScaledReal) -> Result<bool> {
    let e = triple_product_shift_error(ctx, m, u)?;
    Ok(e.to_f64() < 10.0 * ctx.tail_tol())
}
