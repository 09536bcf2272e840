//! Randomized identity suite over the q-series and q-polynomial layers.
//!
//! Every identity is checked as `|lhs − rhs| / scale`, where `scale` is the
//! same expression with all terms replaced by their absolute values. For
//! sign-definite sums that is the ordinary relative error; near a zero of an
//! alternating sum it measures the error against the size of the terms, which
//! is what the truncation tolerance controls.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::numerics::{make_context, QContext, ScaledReal};
use crate::qpoly::{eval_poly, q_hermite_eval, stieltjes_wigert};
use crate::qseries::{gauss_binomial, q_pochhammer, theta, triple_product_f, x_jm_abs, PochhammerLength, TailPolicy};

pub const DEFAULT_SEED: u64 = 0x5157_4153_594d;
pub const MIN_INSTANCES: usize = 20;

#[derive(Clone, Debug)]
pub struct SelftestConfig {
    pub seed: u64,
    pub instances: usize,
    pub bits: u32,
    pub tail_tol: f64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            seed: DEFAULT_SEED,
            instances: 50,
            bits: 256,
            tail_tol: 1e-40,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub name: &'static str,
    pub instances: usize,
    pub worst_error: f64,
    pub tolerance: f64,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.worst_error < self.tolerance
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} {}: {} instances, worst error {:.3e} (tolerance {:.1e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.instances,
            self.worst_error,
            self.tolerance
        )
    }
}

/// One random draw: a base `q` and a handful of uniform variates.
#[derive(Clone, Debug)]
struct Draw {
    q: String,
    u: [f64; 3],
    k: i64,
}

fn draws(rng: &mut ChaCha8Rng, count: usize, k_range: (i64, i64)) -> Vec<Draw> {
    (0..count)
        .map(|_| Draw {
            q: format!("0.{:02}", rng.gen_range(10..=90)),
            u: [rng.gen(), rng.gen(), rng.gen()],
            k: rng.gen_range(k_range.0..=k_range.1),
        })
        .collect()
}

/// `±10^{2u−1}`, a magnitude in `[0.1, 10]` with random sign.
fn signed_magnitude(ctx: &QContext, u: f64, sign: f64) -> ScaledReal {
    let v = 10f64.powf(2.0 * u - 1.0);
    ctx.real(if sign < 0.5 { -v } else { v })
}

fn scaled_error(lhs: &ScaledReal, rhs: &ScaledReal, scale: &ScaledReal) -> f64 {
    let diff = (lhs - rhs).abs();
    if diff.is_zero() {
        return 0.0;
    }
    (diff / scale).to_f64()
}

/// `F(z) = Σ q^{k²/2} z^k` against its product form.
fn triple_product(ctx: &QContext, d: &Draw) -> Result<f64> {
    let z = signed_magnitude(ctx, d.u[0], d.u[1]);
    let half = ctx.sqrt_base();
    let policy = TailPolicy::from_context(&half);
    let series = theta(&half, &z, &policy)?;
    let product = triple_product_f(ctx, &z)?;
    Ok(scaled_error(&series, &product, &x_jm_abs(&half, 0, 0, &z, &policy)?))
}

/// `Θ(q²z) = q⁻¹ z⁻¹ Θ(z)`.
fn quasi_periodicity(ctx: &QContext, d: &Draw) -> Result<f64> {
    let z = signed_magnitude(ctx, d.u[0], d.u[1]);
    let policy = TailPolicy::from_context(ctx);
    let lhs = theta(ctx, &(ctx.q_half_power(4) * &z), &policy)?;
    let factor = ctx.q_half_power(-2) * z.recip();
    let rhs = theta(ctx, &z, &policy)? * &factor;
    let scale = x_jm_abs(ctx, 0, 0, &z, &policy)? * factor.abs();
    Ok(scaled_error(&lhs, &rhs, &scale))
}

/// `(x;q)_n = Σ_k [n k] q^{k(k−1)/2} (−x)^k`.
fn q_binomial_theorem(ctx: &QContext, d: &Draw) -> Result<f64> {
    let n = d.k as usize;
    let x = ctx.real(6.0 * d.u[0] - 3.0);
    let lhs = q_pochhammer(ctx, &x, PochhammerLength::Finite(n));
    let mut rhs = ctx.zero();
    let mut scale = ctx.zero();
    for k in 0..=n as i64 {
        let t = gauss_binomial(ctx, n, k) * ctx.q_half_power(k * (k - 1)) * (-&x).powi(k);
        scale = scale + t.abs();
        rhs = rhs + t;
    }
    Ok(scaled_error(&lhs, &rhs, &scale))
}

/// `F(q^{−m}u) = F(u) q^{−m²/2} u^m`.
fn shift_identity(ctx: &QContext, d: &Draw) -> Result<f64> {
    let m = d.k;
    let u = signed_magnitude(ctx, d.u[0], d.u[1]);
    let shifted = ctx.q_half_power(-2 * m) * &u;
    let lhs = triple_product_f(ctx, &shifted)?;
    let rhs = triple_product_f(ctx, &u)? * ctx.q_half_power(-m * m) * u.powi(m);
    let half = ctx.sqrt_base();
    let policy = TailPolicy::from_context(&half);
    Ok(scaled_error(&lhs, &rhs, &x_jm_abs(&half, 0, 0, &shifted, &policy)?))
}

fn abs_poly_eval(ctx: &QContext, coeffs: &[ScaledReal], x: &ScaledReal) -> ScaledReal {
    let ax = x.abs();
    coeffs.iter().rev().fold(ctx.zero(), |acc, c| acc * &ax + c.abs())
}

/// `S_n(q^{−2n−1}/x) = q^{−n²−n/2} (−x)^{−n} S_n(x)`.
fn sw_reflection(ctx: &QContext, d: &Draw) -> Result<f64> {
    let n = d.k;
    let s = stieltjes_wigert(ctx, n as usize);
    // x spread over the zero range around q^{−n−1/2}
    let spread = (2.0 * d.u[0] - 1.0) * (n as f64 + 1.0) * ctx.q().to_f64().ln().abs();
    let x = ctx.q_half_power(-2 * n - 1) * ScaledReal::exp_of(&ctx.real(spread).to_float());
    let lhs = eval_poly(ctx, &s, &(ctx.q_half_power(-4 * n - 2) * x.recip()));
    let factor = ctx.q_half_power(-2 * n * n - n) * (-&x).powi(-n);
    let rhs = eval_poly(ctx, &s, &x) * &factor;
    let scale = abs_poly_eval(ctx, s.coefficients(), &x) * factor.abs();
    Ok(scaled_error(&lhs, &rhs, &scale))
}

/// `H_n(ξ) = (−1)^n q^{n²+n/2} e^{nξ} S_n(q^{−n−1/2} e^{−2ξ})`.
fn hermite_bridge(ctx: &QContext, d: &Draw) -> Result<f64> {
    let n = d.k;
    let xi = ctx.real(4.0 * d.u[0] - 2.0);
    let direct = q_hermite_eval(ctx, n as usize, &xi);
    let s = stieltjes_wigert(ctx, n as usize);
    let arg = ctx.q_half_power(-2 * n - 1) * ScaledReal::exp_of(&(-xi.mul_pow2(1)).to_float());
    let mut factor = ctx.q_half_power(2 * n * n + n) * ScaledReal::exp_of(&(&xi * &ctx.int(n)).to_float());
    if n % 2 == 1 {
        factor = -factor;
    }
    let bridged = eval_poly(ctx, &s, &arg) * &factor;
    let scale = abs_poly_eval(ctx, s.coefficients(), &arg) * factor.abs();
    Ok(scaled_error(&direct, &bridged, &scale))
}

type Check = fn(&QContext, &Draw) -> Result<f64>;

const IDENTITIES: [(&str, Check, (i64, i64)); 6] = [
    ("jacobi triple product", triple_product, (0, 0)),
    ("theta quasi-periodicity", quasi_periodicity, (0, 0)),
    ("q-binomial theorem", q_binomial_theorem, (0, 20)),
    ("triple product shift", shift_identity, (-5, 5)),
    ("stieltjes-wigert reflection", sw_reflection, (1, 25)),
    ("hermite / stieltjes-wigert bridge", hermite_bridge, (0, 15)),
];

/// Runs every identity over `config.instances` seeded draws (at least
/// [`MIN_INSTANCES`]); each passes when its worst error is below `10·tail_tol`.
pub fn run_selftest(config: &SelftestConfig) -> Result<Vec<IdentityReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let count = config.instances.max(MIN_INSTANCES);
    let tolerance = 10.0 * config.tail_tol;
    let mut reports = Vec::new();
    for (name, check, k_range) in IDENTITIES {
        let ds = draws(&mut rng, count, k_range);
        let errors = ds
            .par_iter()
            .map(|d| {
                let ctx = make_context(&d.q, config.bits, config.tail_tol)?;
                check(&ctx, d)
            })
            .collect::<Result<Vec<f64>>>()?;
        reports.push(IdentityReport {
            name,
            instances: count,
            worst_error: errors.into_iter().fold(0.0, f64::max),
            tolerance,
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let reports = run_selftest(&SelftestConfig {
            instances: 20,
            ..SelftestConfig::default()
        })
        .unwrap();
        assert_eq!(reports.len(), 6);
        for r in &reports {
            assert!(r.passed(), "{}", r.summary_line());
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = SelftestConfig {
            instances: 20,
            ..SelftestConfig::default()
        };
        let a = run_selftest(&cfg).unwrap();
        let b = run_selftest(&cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.worst_error.to_bits(), y.worst_error.to_bits());
        }
    }

    #[test]
    fn broken_identity_is_caught() {
        let ctx = make_context("0.5", 256, 1e-40).unwrap();
        let one = ctx.one();
        let two = ctx.int(2);
        assert!(scaled_error(&one, &two, &one) > 0.5);
    }
}
