use rug::Rational;

use crate::error::{Error, Result};
use crate::numerics::{QContext, ScaledReal};
use crate::qseries::{q_pochhammer, CoefficientSequence, PochhammerLength, QFactorials};

/// Coefficients `f_n(k)` of `P_n(x) = Σ q^{k²} f_n(k) (−x)^k`, together with
/// the deviation bounds the asymptotic estimates need.
///
/// Only [`name`](Self::name), [`coefficients`](Self::coefficients) and
/// [`uniform_bound`](Self::uniform_bound) are required. The deviation bounds
/// default to an exhaustive maximization over the (finite) index window,
/// which is exact up to rounding and padded to stay an upper bound.
pub trait CoefficientFamily: Send + Sync {
    /// Provenance tag, parameters included.
    fn name(&self) -> String;

    /// `f_n(k)` for `k = 0..=n`.
    fn coefficients(&self, ctx: &QContext, n: usize) -> Vec<ScaledReal>;

    /// `sup |f_n(k)|` over all `n` and `0 ≤ k ≤ n`.
    fn uniform_bound(&self) -> f64;

    /// Upper bound for `max |f_n(k) − 1|` over `k_lo ≤ k ≤ k_hi`.
    fn oscillatory_deviation(&self, ctx: &QContext, n: usize, k_lo: usize, k_hi: usize) -> ScaledReal {
        let f = self.coefficients(ctx, n);
        let one = ctx.one();
        padded_max(ctx, (k_lo..=k_hi.min(n)).map(|k| (&f[k] - &one).abs()))
    }

    /// Limit coefficients `a_k = lim_n f_n(k)` for the right tail.
    fn right_limit(&self, _ctx: &QContext) -> CoefficientSequence {
        CoefficientSequence::ones()
    }

    /// Upper bound for `max_{k<d} |f_n(k) − a_k|`.
    fn right_deviation(&self, ctx: &QContext, n: usize, d: usize, a: &CoefficientSequence) -> ScaledReal {
        let f = self.coefficients(ctx, n);
        padded_max(ctx, (0..d.min(n + 1)).map(|k| (&f[k] - &a.coefficient(ctx, k)).abs()))
    }

    /// Limit coefficients `b_k = lim_n f_n(n − k)` for the left tail.
    fn left_limit(&self, _ctx: &QContext) -> CoefficientSequence {
        CoefficientSequence::ones()
    }

    /// Upper bound for `max_{k<d} |f_n(n − k) − b_k|`.
    fn left_deviation(&self, ctx: &QContext, n: usize, d: usize, b: &CoefficientSequence) -> ScaledReal {
        let f = self.coefficients(ctx, n);
        padded_max(ctx, (0..d.min(n + 1)).map(|k| (&f[n - k] - &b.coefficient(ctx, k)).abs()))
    }
}

/// Maximum of computed magnitudes plus a rounding allowance.
fn padded_max(ctx: &QContext, values: impl Iterator<Item = ScaledReal>) -> ScaledReal {
    let mut best = ctx.zero();
    for v in values {
        if v > best {
            best = v;
        }
    }
    let slack = ctx.one().mul_pow2(-(i64::from(ctx.bits()) - 16));
    &best * &(ctx.one() + &slack) + slack
}

/// `f_n(k) ≡ 1`: `P_n` is the truncated theta series.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnitFamily;

impl CoefficientFamily for UnitFamily {
    fn name(&self) -> String {
        "unit".into()
    }

    fn coefficients(&self, ctx: &QContext, n: usize) -> Vec<ScaledReal> {
        vec![ctx.one(); n + 1]
    }

    fn uniform_bound(&self) -> f64 {
        1.0
    }
}

/// `(q;q)_n [n k] = (q^{k+1};q)_{n−k} (q^{n−k+1};q)_k`, shared by the
/// Stieltjes-Wigert and q⁻¹-Hermite families.
fn sw_coefficients(ctx: &QContext, n: usize) -> Vec<ScaledReal> {
    let t = QFactorials::new(ctx, n);
    let qn = t.get(n);
    (0..=n).map(|k| qn * &t.binomial(n, k as i64)).collect()
}

/// `(q^{k_lo+1} + q^{n−k_hi+1}) / (1 − q)`, the union bound on
/// `1 − (q^{k+1};q)_{n−k}(q^{n−k+1};q)_k` over the window.
fn sw_window_bound(ctx: &QContext, n: usize, k_lo: usize, k_hi: usize) -> ScaledReal {
    let q = ctx.q_value();
    let den = ctx.one() - &q;
    (ctx.q_half_power(2 * (k_lo as i64 + 1)) + ctx.q_half_power(2 * (n as i64 - k_hi as i64 + 1))) / den
}

/// `q^{n−d+2} / (1 − q)`: bound on `|f_n(k) − (q;q)_∞/(q;q)_k|` for `k < d`.
fn sw_limit_bound(ctx: &QContext, n: usize, d: usize) -> ScaledReal {
    if d == 0 {
        return ctx.zero();
    }
    let den = ctx.one() - &ctx.q_value();
    ctx.q_half_power(2 * (n as i64 - d as i64 + 2)) / den
}

/// `a_k = (q;q)_∞ / (q;q)_k`.
fn euler_over_factorial(name: &str) -> CoefficientSequence {
    CoefficientSequence::new(name, 1.0, |ctx, k| {
        let inf = q_pochhammer(ctx, &ctx.q_value(), PochhammerLength::Infinite);
        inf / QFactorials::new(ctx, k).get(k).clone()
    })
}

const EULER_LIMIT: &str = "euler/(q;q)_k";

/// Stieltjes-Wigert family, `f_n(k) = (q;q)_n [n k]`. Its polynomial is
/// `P_n(x) = (−1)^n (q;q)_n q^{n²+n/2} S_n(q^{−1/2} x)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct StieltjesWigertFamily;

/// q⁻¹-Hermite family; same coefficients as Stieltjes-Wigert, with
/// `h_n(sinh ξ) = (−1)^n q^{n²+n/2} e^{nξ} S_n(q^{−n−1/2} e^{−2ξ})`.
#[derive(Clone, Copy, Debug, Default)]
pub struct QHermiteFamily;

macro_rules! sw_like_family {
    ($ty:ty, $name:expr) => {
        impl CoefficientFamily for $ty {
            fn name(&self) -> String {
                $name.into()
            }

            fn coefficients(&self, ctx: &QContext, n: usize) -> Vec<ScaledReal> {
                sw_coefficients(ctx, n)
            }

            fn uniform_bound(&self) -> f64 {
                1.0
            }

            fn oscillatory_deviation(&self, ctx: &QContext, n: usize, k_lo: usize, k_hi: usize) -> ScaledReal {
                sw_window_bound(ctx, n, k_lo, k_hi)
            }

            fn right_limit(&self, _ctx: &QContext) -> CoefficientSequence {
                euler_over_factorial(EULER_LIMIT)
            }

            fn right_deviation(&self, ctx: &QContext, n: usize, d: usize, a: &CoefficientSequence) -> ScaledReal {
                if a.name() == EULER_LIMIT {
                    sw_limit_bound(ctx, n, d)
                } else {
                    let f = sw_coefficients(ctx, n);
                    padded_max(ctx, (0..d.min(n + 1)).map(|k| (&f[k] - &a.coefficient(ctx, k)).abs()))
                }
            }

            fn left_limit(&self, _ctx: &QContext) -> CoefficientSequence {
                euler_over_factorial(EULER_LIMIT)
            }

            fn left_deviation(&self, ctx: &QContext, n: usize, d: usize, b: &CoefficientSequence) -> ScaledReal {
                // f_n(n − k) = f_n(k)
                self.right_deviation(ctx, n, d, b)
            }
        }
    };
}

sw_like_family!(StieltjesWigertFamily, "stieltjes-wigert");
sw_like_family!(QHermiteFamily, "q-hermite");

/// q-Laguerre family with `α > −1`:
/// `f_n(k) = (q^{α+k+1};q)_{n−k} (q;q)_n [n k]`, so that
/// `L_n^{(α)}(x;q) = P_n(q^α x) / (q;q)_n²`.
#[derive(Clone, Debug)]
pub struct QLaguerreFamily {
    alpha: Rational,
}

impl QLaguerreFamily {
    pub fn new(alpha: Rational) -> Result<Self> {
        if alpha <= -1 {
            return Err(Error::InvalidArgument(format!(
                "q-Laguerre parameter alpha = {} must exceed -1",
                alpha.to_f64()
            )));
        }
        Ok(QLaguerreFamily { alpha })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    fn right_limit_name(&self) -> String {
        format!("laguerre-limit(alpha={})", self.alpha)
    }

    fn q_alpha(&self, ctx: &QContext) -> ScaledReal {
        ctx.q_power_rational(&self.alpha)
    }
}

impl CoefficientFamily for QLaguerreFamily {
    fn name(&self) -> String {
        format!("q-laguerre(alpha={})", self.alpha)
    }

    fn coefficients(&self, ctx: &QContext, n: usize) -> Vec<ScaledReal> {
        let sw = sw_coefficients(ctx, n);
        // (q^{α+k+1};q)_{n−k}, built from the top down
        let qa = self.q_alpha(ctx);
        let one = ctx.one();
        let mut tail = vec![ctx.one(); n + 1];
        for k in (0..n).rev() {
            let factor = &one - &(&qa * &ctx.q_half_power(2 * (k as i64 + 1)));
            tail[k] = &tail[k + 1] * &factor;
        }
        sw.iter().zip(tail.iter()).map(|(a, b)| a * b).collect()
    }

    fn uniform_bound(&self) -> f64 {
        1.0
    }

    fn oscillatory_deviation(&self, ctx: &QContext, n: usize, k_lo: usize, k_hi: usize) -> ScaledReal {
        let den = ctx.one() - &ctx.q_value();
        let extra = self.q_alpha(ctx) * ctx.q_half_power(2 * (k_lo as i64 + 1)) / den;
        sw_window_bound(ctx, n, k_lo, k_hi) + extra
    }

    fn right_limit(&self, _ctx: &QContext) -> CoefficientSequence {
        let alpha = self.alpha.clone();
        CoefficientSequence::new(self.right_limit_name(), 1.0, move |ctx, k| {
            let inf = PochhammerLength::Infinite;
            let shifted = ctx.q_power_rational(&alpha) * ctx.q_half_power(2 * (k as i64 + 1));
            let euler = q_pochhammer(ctx, &ctx.q_value(), inf);
            q_pochhammer(ctx, &shifted, inf) * euler / QFactorials::new(ctx, k).get(k).clone()
        })
    }

    fn right_deviation(&self, ctx: &QContext, n: usize, d: usize, a: &CoefficientSequence) -> ScaledReal {
        if d == 0 {
            return ctx.zero();
        }
        if a.name() == self.right_limit_name() {
            let den = ctx.one() - &ctx.q_value();
            let extra = self.q_alpha(ctx) * ctx.q_half_power(2 * (n as i64 + 1)) / den;
            sw_limit_bound(ctx, n, d) + extra
        } else {
            let f = self.coefficients(ctx, n);
            padded_max(ctx, (0..d.min(n + 1)).map(|k| (&f[k] - &a.coefficient(ctx, k)).abs()))
        }
    }

    fn left_limit(&self, _ctx: &QContext) -> CoefficientSequence {
        euler_over_factorial(EULER_LIMIT)
    }

    fn left_deviation(&self, ctx: &QContext, n: usize, d: usize, b: &CoefficientSequence) -> ScaledReal {
        if d == 0 {
            return ctx.zero();
        }
        if b.name() == EULER_LIMIT {
            (ctx.one() + self.q_alpha(ctx)) * sw_limit_bound(ctx, n, d)
        } else {
            let f = self.coefficients(ctx, n);
            padded_max(ctx, (0..d.min(n + 1)).map(|k| (&f[n - k] - &b.coefficient(ctx, k)).abs()))
        }
    }
}
