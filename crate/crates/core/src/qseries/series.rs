use rug::Integer;

use super::coefficients::CoefficientSequence;
use crate::error::{Error, Result};
use crate::numerics::{QContext, ScaledReal};

pub const DEFAULT_MAX_TERMS: usize = 1_000_000;

/// Truncation target for infinite series.
#[derive(Clone, Copy, Debug)]
pub struct TailPolicy {
    /// Absolute bound on the discarded tail.
    pub target_tol: f64,
    pub max_terms: usize,
}

impl TailPolicy {
    pub fn new(target_tol: f64) -> Self {
        TailPolicy {
            target_tol,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }

    pub fn from_context(ctx: &QContext) -> Self {
        Self::new(ctx.tail_tol())
    }
}

/// Falling factorial `x (x−1) ⋯ (x−j+1)` as an exact integer.
pub fn falling_factorial(x: i64, j: u32) -> Integer {
    let mut acc = Integer::from(1);
    for t in 0..i64::from(j) {
        acc *= x - t;
    }
    acc
}

/// The weight `(−k−m)_j (−1)^j` of `X_{j,m}`, i.e. the falling factorial of
/// `k + m`.
fn x_weight(k: i64, m: i64, j: u32) -> Integer {
    falling_factorial(k + m, j)
}

/// Smallest cutoff `K` such that the two-sided tail beyond `|k| > K` of a
/// series dominated by `q^{k²} R^{|k|} (|k| + c)^j` is below `tol`.
///
/// Starts at the index where the term ratio `q^{2k+1} R` drops below one and
/// bounds the tail by its first omitted term over `1 − ratio`.
pub(crate) fn bilateral_cutoff(ln_q: f64, ln_r: f64, c: f64, j: u32, tol: f64, max_terms: usize) -> Result<i64> {
    let j = f64::from(j);
    let k0 = (ln_r / (2.0 * -ln_q)).ceil().max(0.0) as i64 + 1;
    let ln_tol = tol.ln();
    let mut k = k0;
    loop {
        if k as usize > max_terms {
            return Err(Error::TruncationLimit { limit: max_terms });
        }
        let first = (k + 1) as f64;
        let ln_term = first * first * ln_q + first * ln_r + j * (first + c).max(1.0).ln();
        let ln_ratio = (2.0 * first + 1.0) * ln_q
            + ln_r
            + j * ((first + 1.0 + c) / (first + c).max(1.0)).ln();
        if ln_ratio < -1e-3 {
            let ratio = ln_ratio.exp();
            let bound = std::f64::consts::LN_2 + ln_term - (1.0 - ratio).ln();
            if bound < ln_tol {
                return Ok(k);
            }
        }
        k += 1;
    }
}

fn ln_abs_f64(x: &ScaledReal) -> f64 {
    x.log2_abs() * std::f64::consts::LN_2
}

/// Powers `x^k` for `k ∈ [lo, hi]` (with `lo ≤ 0 ≤ hi`), built outward from 1.
fn powers(ctx: &QContext, x: &ScaledReal, lo: i64, hi: i64) -> (Vec<ScaledReal>, Vec<ScaledReal>) {
    let mut pos = vec![ctx.one()];
    for k in 1..=hi.max(0) {
        let next = &pos[k as usize - 1] * x;
        pos.push(next);
    }
    let mut neg = vec![ctx.one()];
    if lo < 0 {
        let inv = x.recip();
        for k in 1..=(-lo) {
            let next = &neg[k as usize - 1] * &inv;
            neg.push(next);
        }
    }
    (pos, neg)
}

/// `Σ_{k=lo}^{hi} q^{k²} x^k (−k−m)_j (−1)^j`, summed in the order
/// `0, −1, 1, −2, 2, …` so that mirror terms meet early.
pub fn bilateral_window_sum(ctx: &QContext, j: u32, m: i64, x: &ScaledReal, lo: i64, hi: i64) -> ScaledReal {
    let mut sum = ctx.zero();
    if lo > hi {
        return sum;
    }
    let (pos, neg) = powers(ctx, x, lo.min(0), hi.max(0));
    let radius = lo.unsigned_abs().max(hi.unsigned_abs()) as i64;
    let term = |k: i64, sum: &mut ScaledReal| {
        if k < lo || k > hi {
            return;
        }
        let w = x_weight(k, m, j);
        if w == 0 {
            return;
        }
        let xk = if k >= 0 { &pos[k as usize] } else { &neg[(-k) as usize] };
        let t = ctx.q_half_power(2 * k * k) * xk * ctx.integer(&w);
        *sum = &*sum + &t;
    };
    term(0, &mut sum);
    for r in 1..=radius {
        term(-r, &mut sum);
        term(r, &mut sum);
    }
    sum
}

/// `X_{j,m}(x) = Σ_{k∈ℤ} q^{k²} x^k (−k−m)_j (−1)^j`.
pub fn x_jm(ctx: &QContext, j: u32, m: i64, x: &ScaledReal, policy: &TailPolicy) -> Result<ScaledReal> {
    if x.is_zero() {
        return Err(Error::ZeroArgument("X_jm"));
    }
    let ln_q = ctx.q().to_f64().ln();
    let ln_r = ln_abs_f64(x).abs();
    let k = bilateral_cutoff(ln_q, ln_r, m.unsigned_abs() as f64 + f64::from(j), j, policy.target_tol, policy.max_terms)?;
    Ok(bilateral_window_sum(ctx, j, m, x, -k, k))
}

/// `X_{j,m}` with every term replaced by its absolute value; the scale
/// against which cancellation in `X_{j,m}` is judged.
pub fn x_jm_abs(ctx: &QContext, j: u32, m: i64, x: &ScaledReal, policy: &TailPolicy) -> Result<ScaledReal> {
    if x.is_zero() {
        return Err(Error::ZeroArgument("X_jm"));
    }
    let ln_q = ctx.q().to_f64().ln();
    let ln_r = ln_abs_f64(x).abs();
    let cutoff = bilateral_cutoff(ln_q, ln_r, m.unsigned_abs() as f64 + f64::from(j), j, policy.target_tol, policy.max_terms)?;
    let ax = x.abs();
    let mut sum = ctx.zero();
    for k in -cutoff..=cutoff {
        let w = x_weight(k, m, j).abs();
        sum = sum + ctx.q_half_power(2 * k * k) * ax.powi(k) * ctx.integer(&w);
    }
    Ok(sum)
}

/// `Θ(z) = X_{0,0}(z)`.
pub fn theta(ctx: &QContext, z: &ScaledReal, policy: &TailPolicy) -> Result<ScaledReal> {
    x_jm(ctx, 0, 0, z, policy)
}

/// `Θ_j(z) = z^j Θ^{(j)}(z) = X_{j,0}(z)`.
pub fn theta_j(ctx: &QContext, j: u32, z: &ScaledReal, policy: &TailPolicy) -> Result<ScaledReal> {
    x_jm(ctx, j, 0, z, policy)
}

/// `Φ_j(z) = Σ_{k≥0} a_k q^{k²} z^k (−k)_j (−1)^j`.
pub fn phi_j(
    ctx: &QContext,
    a: &CoefficientSequence,
    j: u32,
    z: &ScaledReal,
    policy: &TailPolicy,
) -> Result<ScaledReal> {
    let cutoff = if z.is_zero() {
        0
    } else {
        one_sided_cutoff(ctx, a.bound(), ln_abs_f64(z), j, policy)?
    };
    let mut sum = ctx.zero();
    let mut zk = ctx.one();
    for k in 0..=cutoff {
        if k > 0 {
            zk = &zk * z;
        }
        let w = falling_factorial(k, j);
        if w == 0 || zk.is_zero() {
            continue;
        }
        let t = a.coefficient(ctx, k as usize) * ctx.q_half_power(2 * k * k) * &zk * ctx.integer(&w);
        sum = sum + t;
    }
    Ok(sum)
}

/// Cutoff for `Σ_{k>K} bound · q^{k²} |z|^k k^j < tol`.
pub(crate) fn one_sided_cutoff(ctx: &QContext, bound: f64, ln_z: f64, j: u32, policy: &TailPolicy) -> Result<i64> {
    if bound == 0.0 {
        return Ok(0);
    }
    let ln_q = ctx.q().to_f64().ln();
    let jf = f64::from(j);
    let mut k = ((ln_z / (2.0 * -ln_q)).ceil().max(0.0)) as i64;
    let ln_tol = policy.target_tol.ln() - bound.ln();
    loop {
        if k as usize > policy.max_terms {
            return Err(Error::TruncationLimit {
                limit: policy.max_terms,
            });
        }
        let first = (k + 1) as f64;
        let ln_term = first * first * ln_q + first * ln_z + jf * first.ln();
        let ln_ratio = (2.0 * first + 1.0) * ln_q + ln_z + jf * ((first + 1.0) / first).ln();
        if ln_ratio < -1e-3 {
            let bound = ln_term - (1.0 - ln_ratio.exp()).ln();
            if bound < ln_tol {
                return Ok(k);
            }
        }
        k += 1;
    }
}

/// `Ψ_{j,n}(z) = Σ_{k=0}^{n} a_k q^{k²} z^k (−n+k)_j (−1)^j`, an exact finite sum.
pub fn psi_jn(ctx: &QContext, a: &CoefficientSequence, j: u32, n: usize, z: &ScaledReal) -> ScaledReal {
    let mut sum = ctx.zero();
    let mut zk = ctx.one();
    for k in 0..=n as i64 {
        if k > 0 {
            zk = &zk * z;
        }
        let w = falling_factorial(n as i64 - k, j);
        if w == 0 || zk.is_zero() {
            continue;
        }
        let t = a.coefficient(ctx, k as usize) * ctx.q_half_power(2 * k * k) * &zk * ctx.integer(&w);
        sum = sum + t;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_context;

    fn ctx(q: &str) -> QContext {
        make_context(q, 256, 1e-40).unwrap()
    }

    /// Oracle: straight f64 summation over |k| ≤ 12.
    fn theta_f64(q: f64, z: f64) -> f64 {
        (-12..=12).map(|k: i32| q.powi(k * k) * z.powi(k)).sum()
    }

    #[test]
    fn theta_values() {
        let c = ctx("0.5");
        let p = TailPolicy::from_context(&c);
        let t1 = x_jm(&c, 0, 0, &c.one(), &p).unwrap();
        assert!((t1.to_f64() - theta_f64(0.5, 1.0)).abs() < 1e-15);
        let expected = c.parse("2.12893682721187715866945854854495132461251653994").unwrap();
        assert!(t1.relative_error_log10(&expected) < -40.0);

        let zero = x_jm(&c, 0, 0, &-c.q_value(), &p).unwrap();
        // exact pairwise cancellation; only the unpaired window edge survives
        assert!(zero.to_f64().abs() < c.tail_tol(), "{zero}");

        let odd = x_jm(&c, 1, 0, &c.one(), &p).unwrap();
        assert!(odd.log2_abs() < -240.0);

        assert!(matches!(x_jm(&c, 0, 0, &c.zero(), &p), Err(Error::ZeroArgument(_))));
    }

    #[test]
    fn x_jm_independent_of_m_at_j_zero() {
        let c = ctx("0.6");
        let p = TailPolicy::from_context(&c);
        let z = c.real(-1.7);
        let base = x_jm(&c, 0, 0, &z, &p).unwrap();
        for m in [-7, -1, 3, 25] {
            let v = x_jm(&c, 0, m, &z, &p).unwrap();
            assert!(v.relative_error_log10(&base) < -60.0);
        }
    }

    #[test]
    fn truncation_is_honest() {
        let c = ctx("0.7");
        let p = TailPolicy::new(1e-40);
        for &(j, m, x) in &[(0u32, 0i64, 3.5f64), (2, 5, -0.2), (3, -4, 12.0)] {
            let xv = c.real(x);
            let ln_r = x.abs().ln().abs();
            let k = bilateral_cutoff(c.q().to_f64().ln(), ln_r, m.unsigned_abs() as f64 + f64::from(j), j, 1e-40, 1000).unwrap();
            let a = bilateral_window_sum(&c, j, m, &xv, -k, k);
            let b = bilateral_window_sum(&c, j, m, &xv, -k - 5, k + 5);
            assert!((&a - &b).abs().to_f64() < 1e-40, "j={j} m={m} x={x}");
            assert_eq!(x_jm(&c, j, m, &xv, &p).unwrap(), a);
        }
    }

    #[test]
    fn max_terms_guard() {
        let c = ctx("0.99");
        let p = TailPolicy {
            target_tol: 1e-40,
            max_terms: 10,
        };
        assert!(matches!(
            x_jm(&c, 0, 0, &c.real(1e30), &p),
            Err(Error::TruncationLimit { limit: 10 })
        ));
    }

    #[test]
    fn phi_with_unit_coefficients() {
        let c = ctx("0.5");
        let p = TailPolicy::from_context(&c);
        let ones = CoefficientSequence::ones();
        let phi1 = phi_j(&c, &ones, 0, &c.one(), &p).unwrap();
        let doubled = &phi1 + &phi1;
        let expected = c.parse("3.12893682721187715866945854854495132461251653994").unwrap();
        assert!(doubled.relative_error_log10(&expected) < -40.0);
        assert_eq!(phi_j(&c, &ones, 0, &c.zero(), &p).unwrap().to_f64(), 1.0);
        assert!(phi_j(&c, &ones, 2, &c.zero(), &p).unwrap().is_zero());
    }

    #[test]
    fn phi_reflection_against_theta() {
        // Φ(z) + Φ(1/z) = Θ(z) + 1 with a_k ≡ 1
        let c = ctx("0.6");
        let p = TailPolicy::from_context(&c);
        let ones = CoefficientSequence::ones();
        for x in [0.3, -2.5, 7.0] {
            let z = c.real(x);
            let lhs = phi_j(&c, &ones, 0, &z, &p).unwrap() + phi_j(&c, &ones, 0, &z.recip(), &p).unwrap();
            let rhs = x_jm(&c, 0, 0, &z, &p).unwrap() + c.one();
            assert!(lhs.relative_error_log10(&rhs) < -38.0, "x={x}");
        }
    }

    #[test]
    fn q_airy_value() {
        let c = ctx("0.5");
        let p = TailPolicy::from_context(&c);
        let a = CoefficientSequence::q_airy(&c);
        // Oracle: direct alternating summation, k ≤ 20.
        let mut oracle = 0.0f64;
        let mut qfac = 1.0f64;
        for k in 0..=20i32 {
            if k > 0 {
                qfac *= 1.0 - 0.5f64.powi(k);
            }
            oracle += (-1f64).powi(k) / qfac * 0.5f64.powi(k * k);
        }
        let v = phi_j(&c, &a, 0, &c.one(), &p).unwrap();
        assert!((v.to_f64() - oracle).abs() < 1e-15);
        let expected = c.parse("0.160763788932088725715809675889951990861737603295").unwrap();
        assert!(v.relative_error_log10(&expected) < -40.0);
    }

    #[test]
    fn psi_examples() {
        let c = ctx("0.5");
        let ones = CoefficientSequence::ones();
        assert_eq!(psi_jn(&c, &ones, 0, 0, &c.real(3.0)).to_f64(), 1.0);
        assert_eq!(psi_jn(&c, &ones, 1, 2, &c.one()).to_f64(), 2.5);
        // Ψ_{0,n} is the partial sum of Φ.
        let z = c.real(-1.3);
        let partial: ScaledReal = (0..=6i64)
            .map(|k| c.q_half_power(2 * k * k) * z.powi(k))
            .fold(c.zero(), |s, t| s + t);
        assert!(psi_jn(&c, &ones, 0, 6, &z).relative_error_log10(&partial) < -70.0);
    }

    #[test]
    fn psi_matches_windowed_x() {
        let c = ctx("0.4");
        let ones = CoefficientSequence::ones();
        for (j, n, x) in [(1u32, 5usize, 0.8f64), (2, 7, -1.9), (3, 4, 2.2)] {
            let z = c.real(x);
            let psi = psi_jn(&c, &ones, j, n, &z);
            let m = i64::from(j) - n as i64 - 1;
            let mut xw = bilateral_window_sum(&c, j, m, &z, 0, n as i64);
            if j % 2 == 1 {
                xw = -xw;
            }
            assert!(psi.relative_error_log10(&xw) < -70.0, "j={j} n={n}");
        }
    }
}
