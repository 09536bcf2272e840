//! Leading-order asymptotics of `P_{n,j}(x) = x^j P_n^{(j)}(x)` with explicit
//! error bounds.
//!
//! Every bound returned here is assembled from quantities computed in the
//! same call: the family's coefficient deviation on the index window, exact
//! window sums of absolute terms and the truncated tail beyond the window.
//! The difference between the exact polynomial value and the leading term
//! is a sum over the same index set, so `|exact − value| ≤ error_bound`
//! holds term by term.

use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{QContext, ScaledReal};
use crate::qpoly::CoefficientFamily;
use crate::qseries::{bilateral_cutoff, falling_factorial, one_sided_cutoff, phi_j, psi_jn, x_jm, CoefficientSequence, TailPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Oscillatory,
    RightTail,
    LeftTail,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Oscillatory => "oscillatory",
            Regime::RightTail => "right_tail",
            Regime::LeftTail => "left_tail",
        }
    }
}

/// Resolved index window: `m = ⌊nl⌋` (oscillatory regime only), half-width
/// `d = ⌊nδ⌋` and the uniformity radius `M`.
#[derive(Clone, Copy, Debug)]
pub struct AsymptoticWindow {
    pub l: Option<f64>,
    pub delta: f64,
    pub m: i64,
    pub d: usize,
    pub radius: f64,
}

/// Caller choices for the window. Unset `delta` picks the half-width that
/// minimizes the reported bound; unset `radius` uses `max(|y|, 1/|y|) + 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct WindowOptions {
    pub delta: Option<f64>,
    pub radius: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct AsymptoticEstimate {
    /// Leading term.
    pub value: ScaledReal,
    /// Absolute bound on `|P_{n,j}(x) − value|`.
    pub error_bound: ScaledReal,
    /// The factor pulled out in front of the bracket (`1` for the right
    /// tail); `error_bound / scale` is the bound relative to the bracket.
    pub scale: ScaledReal,
    pub regime: Regime,
    pub window: AsymptoticWindow,
}

impl AsymptoticEstimate {
    pub fn relative_bound(&self) -> ScaledReal {
        &self.error_bound / &self.scale
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidArgument(msg)
}

/// Rounding allowance relative to the absolute-term sums.
fn rounding_slack(ctx: &QContext) -> ScaledReal {
    ctx.one().mul_pow2(-(i64::from(ctx.bits()) - 16))
}

fn resolve_radius(y: &ScaledReal, radius: Option<f64>, require_lower: bool, require_upper: bool) -> Result<f64> {
    let ay = y.to_f64().abs();
    let radius = match radius {
        Some(r) => {
            if !(r >= 1.0 && r.is_finite()) {
                return Err(invalid(format!("radius M = {r} must be finite and at least 1")));
            }
            r
        }
        None => {
            if ay == 0.0 {
                2.0
            } else {
                ay.max(1.0 / ay) + 1.0
            }
        }
    };
    if require_lower && ay < 1.0 / radius {
        return Err(invalid(format!("|y| = {ay} below 1/M = {}", 1.0 / radius)));
    }
    if require_upper && ay > radius {
        return Err(invalid(format!("|y| = {ay} above M = {radius}")));
    }
    Ok(radius)
}

fn float(ctx: &QContext, x: f64) -> Float {
    Float::with_val(ctx.bits(), x)
}

/// Picks the `d` minimizing `bound(d)` over `candidates`.
fn best_window<F>(candidates: impl Iterator<Item = usize>, mut bound: F) -> Option<(usize, ScaledReal)>
where
    F: FnMut(usize) -> ScaledReal,
{
    let mut best: Option<(usize, ScaledReal)> = None;
    for d in candidates {
        let b = bound(d);
        if best.as_ref().is_none_or(|(_, cur)| b < *cur) {
            best = Some((d, b));
        }
    }
    best
}

/// Oscillatory regime: `P_{n,j}(q^{−2m}y) ≈ q^{−m²}(−y)^m X_{j,m}(−y)` with
/// `m = ⌊nl⌋`.
pub fn oscillatory_estimate(
    ctx: &QContext,
    family: &dyn CoefficientFamily,
    n: usize,
    j: u32,
    l: f64,
    y: &ScaledReal,
    options: WindowOptions,
) -> Result<AsymptoticEstimate> {
    if !(l > 0.0 && l < 1.0) {
        return Err(invalid(format!("l = {l} must lie in (0, 1)")));
    }
    if y.is_zero() {
        return Err(Error::ZeroArgument("oscillatory_estimate"));
    }
    let radius = resolve_radius(y, options.radius, true, true)?;
    let ni = n as i64;
    let m = (n as f64 * l).floor() as i64;
    let half = l.min(1.0 - l);

    let policy = TailPolicy::from_context(ctx);
    let tol = ctx.real(policy.target_tol);
    let neg_y = -y;
    let bracket = x_jm(ctx, j, m, &neg_y, &policy)?;

    // |terms| of the bilateral series, k ∈ [−K, K]
    let ln_r = y.log2_abs().abs() * std::f64::consts::LN_2;
    let cutoff = bilateral_cutoff(ctx.q().to_f64().ln(), ln_r, m as f64 + f64::from(j), j, policy.target_tol, policy.max_terms)?;
    let ay = y.abs();
    let inv = ay.recip();
    let abs_term = |k: i64| -> ScaledReal {
        let w = falling_factorial(k + m, j).abs();
        let pow = if k >= 0 { ay.powi(k) } else { inv.powi(-k) };
        ctx.q_half_power(2 * k * k) * pow * ctx.integer(&w)
    };
    let terms: Vec<ScaledReal> = (-cutoff..=cutoff).map(abs_term).collect();
    let at = |k: i64| &terms[(k + cutoff) as usize];
    let total: ScaledReal = terms.iter().cloned().sum();

    let f_bound = ctx.real(family.uniform_bound());
    let slack = rounding_slack(ctx);
    let outside = &f_bound + &ctx.one();
    let bracket_bound = |d: usize| -> ScaledReal {
        let di = d as i64;
        let mut window = ctx.zero();
        for k in (1 - di)..di {
            if k.abs() <= cutoff {
                window = window + at(k);
            }
        }
        let tail = (&total - &window).abs() + &tol;
        let k_lo = (m - di + 1) as usize;
        let k_hi = (m + di - 1) as usize;
        let eps = family.oscillatory_deviation(ctx, n, k_lo, k_hi);
        eps * window + &outside * tail + &tol + &slack * &total * &outside
    };

    let (d, rel_bound) = match options.delta {
        Some(delta) => {
            if !(delta > 0.0 && delta < half) {
                return Err(invalid(format!("delta = {delta} must lie in (0, min(l, 1-l)) = (0, {half})")));
            }
            let d = (n as f64 * delta).floor() as usize;
            if d == 0 {
                return Err(invalid(format!("window half-width floor(n*delta) is zero for n = {n}")));
            }
            (d, bracket_bound(d))
        }
        None => {
            let d_max = m.min(ni - m);
            if d_max < 1 {
                return Err(invalid(format!("degree n = {n} too small for l = {l}")));
            }
            best_window(1..=d_max as usize, bracket_bound).expect("nonempty window range")
        }
    };

    let scale = ctx.q_half_power(-2 * m * m) * ay.powi(m);
    // (−y)^m = (−1)^m sign(y)^m |y|^m
    let mut value = &scale * &bracket;
    if m % 2 != 0 && y.signum() > 0 {
        value = -value;
    }
    Ok(AsymptoticEstimate {
        value,
        error_bound: &scale * &rel_bound,
        scale,
        regime: Regime::Oscillatory,
        window: AsymptoticWindow {
            l: Some(l),
            delta: options.delta.unwrap_or(d as f64 / n as f64),
            m,
            d,
            radius,
        },
    })
}

/// Right tail `t ≥ 0`: `P_{n,j}(q^{nt}y) ≈ Φ_j(−q^{nt}y)` with coefficients `a`.
#[allow(clippy::too_many_arguments)]
pub fn right_tail_estimate(
    ctx: &QContext,
    family: &dyn CoefficientFamily,
    a: &CoefficientSequence,
    n: usize,
    j: u32,
    t: f64,
    y: &ScaledReal,
    options: WindowOptions,
) -> Result<AsymptoticEstimate> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("right tail needs t >= 0, got {t}")));
    }
    let radius = resolve_radius(y, options.radius, false, true)?;
    let x = ctx.q_power_real(&float(ctx, n as f64 * t)) * y;
    let z = -&x;
    let policy = TailPolicy::from_context(ctx);
    let tol = ctx.real(policy.target_tol);
    let value = phi_j(ctx, a, j, &z, &policy)?;

    // |terms| q^{k²}|x|^k k^{(j)} up to a cutoff past both n and the Φ tail
    let ax = x.abs();
    let cutoff = if ax.is_zero() {
        0
    } else {
        one_sided_cutoff(ctx, 1.0, ax.log2_abs() * std::f64::consts::LN_2, j, &policy)?
    }
    .max(n as i64);
    let mut terms = Vec::with_capacity(cutoff as usize + 1);
    let mut xk = ctx.one();
    for k in 0..=cutoff {
        if k > 0 {
            xk = &xk * &ax;
        }
        let w = falling_factorial(k, j);
        terms.push(ctx.q_half_power(2 * k * k) * &xk * ctx.integer(&w));
    }
    let total: ScaledReal = terms.iter().cloned().sum();
    let mut prefix = vec![ctx.zero()];
    for tk in &terms {
        let next = prefix.last().expect("nonempty") + tk;
        prefix.push(next);
    }

    let fa = ctx.real(family.uniform_bound() + a.bound());
    let slack = rounding_slack(ctx);
    let bound = |d: usize| -> ScaledReal {
        let head = &prefix[d];
        let tail = (&total - head).abs() + &tol;
        family.right_deviation(ctx, n, d, a) * head + &fa * tail + &tol + &slack * &total * &fa
    };
    let (d, error_bound) = match options.delta {
        Some(delta) => {
            if !(delta > 0.0 && delta <= 1.0) {
                return Err(invalid(format!("delta = {delta} must lie in (0, 1]")));
            }
            let d = (n as f64 * delta).floor() as usize;
            (d, bound(d))
        }
        None => best_window(0..=n + 1, bound).expect("nonempty window range"),
    };
    Ok(AsymptoticEstimate {
        value,
        error_bound,
        scale: ctx.one(),
        regime: Regime::RightTail,
        window: AsymptoticWindow {
            l: None,
            delta: options.delta.unwrap_or(d as f64 / n.max(1) as f64),
            m: 0,
            d,
            radius,
        },
    })
}

/// Left tail `t ≤ −2`:
/// `P_{n,j}(q^{nt}y) ≈ (−q^{n+nt}y)^n Ψ_{j,n}(−q^{−2n−nt}/y)` with
/// coefficients `b`.
#[allow(clippy::too_many_arguments)]
pub fn left_tail_estimate(
    ctx: &QContext,
    family: &dyn CoefficientFamily,
    b: &CoefficientSequence,
    n: usize,
    j: u32,
    t: f64,
    y: &ScaledReal,
    options: WindowOptions,
) -> Result<AsymptoticEstimate> {
    if !(t <= -2.0 && t.is_finite()) {
        return Err(invalid(format!("left tail needs t <= -2, got {t}")));
    }
    if y.is_zero() {
        return Err(Error::ZeroArgument("left_tail_estimate"));
    }
    let radius = resolve_radius(y, options.radius, true, false)?;
    let nf = n as f64;
    let pre_base = -(ctx.q_power_real(&float(ctx, nf + nf * t)) * y);
    let prefactor = pre_base.powi(n as i64);
    let z = -(ctx.q_power_real(&float(ctx, -2.0 * nf - nf * t)) / y);
    let value = &prefactor * &psi_jn(ctx, b, j, n, &z);

    let az = z.abs();
    let mut terms = Vec::with_capacity(n + 1);
    let mut zk = ctx.one();
    for k in 0..=n as i64 {
        if k > 0 {
            zk = &zk * &az;
        }
        let w = falling_factorial(n as i64 - k, j);
        terms.push(ctx.q_half_power(2 * k * k) * &zk * ctx.integer(&w));
    }
    let mut prefix = vec![ctx.zero()];
    for tk in &terms {
        let next = prefix.last().expect("nonempty") + tk;
        prefix.push(next);
    }
    let total = prefix[n + 1].clone();
    let fb = ctx.real(family.uniform_bound() + b.bound());
    let slack = rounding_slack(ctx);
    let bound = |d: usize| -> ScaledReal {
        let head = &prefix[d];
        let tail = (&total - head).abs();
        family.left_deviation(ctx, n, d, b) * head + &fb * tail + &slack * &total * &fb
    };
    let (d, rel) = match options.delta {
        Some(delta) => {
            if !(delta > 0.0 && delta <= 1.0) {
                return Err(invalid(format!("delta = {delta} must lie in (0, 1]")));
            }
            let d = ((nf * delta).floor() as usize).min(n + 1);
            (d, bound(d))
        }
        None => best_window(0..=n + 1, bound).expect("nonempty window range"),
    };
    let scale = prefactor.abs();
    Ok(AsymptoticEstimate {
        value,
        error_bound: &scale * &rel,
        scale,
        regime: Regime::LeftTail,
        window: AsymptoticWindow {
            l: None,
            delta: options.delta.unwrap_or(d as f64 / n.max(1) as f64),
            m: 0,
            d,
            radius,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_context;
    use crate::qpoly::{eval_pnj, QHermiteFamily, QLaguerreFamily, StieltjesWigertFamily, UnitFamily};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rug::Rational;

    fn ctx(q: &str) -> QContext {
        make_context(q, 256, 1e-40).unwrap()
    }

    fn deviation(ctx: &QContext, fam: &dyn CoefficientFamily, n: usize, j: u32, x: &ScaledReal, est: &AsymptoticEstimate) -> ScaledReal {
        let exact = eval_pnj(ctx, fam, n, j as usize, x).unwrap();
        (&exact - &est.value).abs()
    }

    #[test]
    fn oscillatory_unit_family_example() {
        let c = ctx("0.5");
        let y = c.one();
        let est = oscillatory_estimate(&c, &UnitFamily, 30, 0, 0.5, &y, WindowOptions::default()).unwrap();
        assert_eq!(est.window.m, 15);
        // q^{−225} Θ(−1) (−1)^{15}
        let theta_m1 = x_jm(&c, 0, 0, &-c.one(), &TailPolicy::from_context(&c)).unwrap();
        let expected = -(c.q_half_power(-450) * theta_m1);
        assert!(est.value.relative_error_log10(&expected) < -70.0);
        let x = c.q_half_power(-60) * &y;
        assert!(deviation(&c, &UnitFamily, 30, 0, &x, &est) <= est.error_bound);
    }

    #[test]
    fn oscillatory_on_theta_zero() {
        // −y = −q makes X_{0,m}(−y) = Θ(−q) = 0
        let c = ctx("0.5");
        let y = c.q_value();
        let est = oscillatory_estimate(&c, &StieltjesWigertFamily, 20, 0, 0.5, &y, WindowOptions::default()).unwrap();
        assert!(est.value.abs() <= c.real(1e-35) * &est.scale);
        assert!(est.error_bound.signum() > 0);
        let x = c.q_half_power(-40) * &y;
        assert!(deviation(&c, &StieltjesWigertFamily, 20, 0, &x, &est) <= est.error_bound);
    }

    #[test]
    fn oscillatory_bound_is_small_at_forty() {
        let c = ctx("0.5");
        let lag = QLaguerreFamily::new(Rational::from((2, 5))).unwrap();
        let fams: [&dyn CoefficientFamily; 3] = [&StieltjesWigertFamily, &QHermiteFamily, &lag];
        for fam in fams {
            for j in 0..=2 {
                let y = -c.one();
                let est = oscillatory_estimate(&c, fam, 40, j, 0.5, &y, WindowOptions::default()).unwrap();
                let ratio = (&est.error_bound / &est.value.abs()).to_f64();
                assert!(ratio < 1e-3, "{} j={j} ratio={ratio}", fam.name());
            }
        }
    }

    #[test]
    fn oscillatory_rejects_bad_windows() {
        let c = ctx("0.5");
        let y = c.one();
        let w = |delta| WindowOptions { delta: Some(delta), radius: None };
        assert!(oscillatory_estimate(&c, &UnitFamily, 20, 0, 0.5, &y, w(0.6)).is_err());
        assert!(oscillatory_estimate(&c, &UnitFamily, 20, 0, 1.2, &y, WindowOptions::default()).is_err());
        let far = WindowOptions { delta: None, radius: Some(2.0) };
        assert!(oscillatory_estimate(&c, &UnitFamily, 20, 0, 0.5, &c.real(3.0), far).is_err());
    }

    #[test]
    fn right_tail_examples() {
        let c = ctx("0.5");
        let ones = CoefficientSequence::ones();
        let est = right_tail_estimate(&c, &UnitFamily, &ones, 25, 0, 0.0, &c.one(), WindowOptions::default()).unwrap();
        assert!(deviation(&c, &UnitFamily, 25, 0, &c.one(), &est) <= est.error_bound);

        let zero = right_tail_estimate(&c, &UnitFamily, &ones, 25, 2, 0.0, &c.zero(), WindowOptions::default()).unwrap();
        assert!(zero.value.is_zero());

        let sw = StieltjesWigertFamily;
        let a = sw.right_limit(&c);
        let y = c.real(1.3);
        let est = right_tail_estimate(&c, &sw, &a, 30, 1, 1.0, &y, WindowOptions::default()).unwrap();
        let x = c.q_half_power(60) * &y;
        assert!(deviation(&c, &sw, 30, 1, &x, &est) <= est.error_bound);
        assert!(right_tail_estimate(&c, &sw, &a, 30, 1, -0.5, &y, WindowOptions::default()).is_err());
    }

    #[test]
    fn left_tail_examples() {
        let c = ctx("0.5");
        let ones = CoefficientSequence::ones();
        let est = left_tail_estimate(&c, &UnitFamily, &ones, 20, 0, -2.0, &c.one(), WindowOptions::default()).unwrap();
        let x = c.q_half_power(-80);
        assert!(deviation(&c, &UnitFamily, 20, 0, &x, &est) <= est.error_bound);

        let sw = StieltjesWigertFamily;
        let b = sw.left_limit(&c);
        let est = left_tail_estimate(&c, &sw, &b, 1, 0, -3.0, &c.one(), WindowOptions::default()).unwrap();
        assert!(deviation(&c, &sw, 1, 0, &c.q_half_power(-6), &est) <= est.error_bound);

        let c6 = ctx("0.6");
        let b6 = sw.left_limit(&c6);
        let y = c6.real(2.0);
        let est = left_tail_estimate(&c6, &sw, &b6, 15, 1, -2.5, &y, WindowOptions::default()).unwrap();
        let x = c6.q_power_real(&Float::with_val(256, -37.5)) * &y;
        assert!(deviation(&c6, &sw, 15, 1, &x, &est) <= est.error_bound);
        assert!(left_tail_estimate(&c, &sw, &b, 15, 1, -1.0, &y, WindowOptions::default()).is_err());
    }

    #[test]
    fn random_honesty_smoke() {
        let c = ctx("0.5");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let fam = QLaguerreFamily::new(Rational::from((7, 10))).unwrap();
        for _ in 0..5 {
            let l: f64 = rng.gen_range(0.2..0.8);
            let y = c.real(rng.gen_range(-3.0..3.0));
            let est = oscillatory_estimate(&c, &fam, 20, 1, l, &y, WindowOptions::default()).unwrap();
            let x = c.q_half_power(-4 * est.window.m) * &y;
            assert!(deviation(&c, &fam, 20, 1, &x, &est) <= est.error_bound, "l={l}");
        }
    }
}
