use super::context::QContext;
use super::scaled::ScaledReal;
use crate::error::{Error, Result};

/// Precision doublings allowed before giving up (256 → 16384 bits).
pub const MAX_ESCALATIONS: u32 = 6;

/// A value whose leading digits have been confirmed by recomputation at
/// doubled precision.
#[derive(Clone, Debug)]
pub struct StabilizedValue {
    pub value: ScaledReal,
    pub verified_digits: u32,
    /// Doublings beyond the first confirming pair of runs.
    pub escalations: u32,
}

/// Number of leading significant decimal digits on which `a` and `b` agree,
/// capped at `cap`.
pub fn agreement_digits(a: &ScaledReal, b: &ScaledReal, cap: u32) -> u32 {
    if a.is_zero() && b.is_zero() {
        return cap;
    }
    if a.is_zero() || b.is_zero() || a.signum() != b.signum() {
        return 0;
    }
    let log10_rel = a.relative_error_log10(b);
    if log10_rel == f64::NEG_INFINITY {
        return cap;
    }
    let d = (-log10_rel).floor();
    if d <= 0.0 {
        0
    } else {
        (d as u32).min(cap)
    }
}

/// Runs `computation` at `ctx.bits()`, `2·bits`, `4·bits`, … until two
/// successive runs agree to `target_digits` significant digits.
pub fn stabilize<F>(computation: F, ctx: &QContext, target_digits: u32) -> Result<StabilizedValue>
where
    F: Fn(&QContext) -> Result<ScaledReal>,
{
    let mut previous = computation(ctx)?;
    let mut previous_ctx_digits = ctx.digits();
    let mut best = 0;
    for doubling in 1..=MAX_ESCALATIONS {
        let hi = ctx.with_bits(ctx.bits() << doubling);
        let current = computation(&hi)?;
        let digits = agreement_digits(&previous, &current, previous_ctx_digits);
        best = best.max(digits);
        if digits >= target_digits {
            return Ok(StabilizedValue {
                value: current.with_prec(ctx.bits()),
                verified_digits: digits,
                escalations: doubling - 1,
            });
        }
        previous = current;
        previous_ctx_digits = hi.digits();
    }
    Err(Error::StabilizationFailed {
        escalations: MAX_ESCALATIONS,
        best_digits: best,
        target_digits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{determinant, make_context};
    use crate::qseries::{x_jm, TailPolicy};

    #[test]
    fn constant_needs_no_escalation() {
        let ctx = make_context("0.5", 256, 1e-40).unwrap();
        let s = stabilize(|c| Ok(c.one()), &ctx, 30).unwrap();
        assert_eq!(s.escalations, 0);
        assert_eq!(s.value.to_f64(), 1.0);
        assert!(s.verified_digits >= 30);
    }

    #[test]
    fn theta_at_one() {
        let ctx = make_context("0.5", 256, 1e-40).unwrap();
        let s = stabilize(
            |c| x_jm(c, 0, 0, &c.one(), &TailPolicy::new(c.tail_tol())),
            &ctx,
            30,
        )
        .unwrap();
        assert_eq!(s.escalations, 0);
        assert!((s.value.to_f64() - 2.128936827211877).abs() < 1e-14);
    }

    #[test]
    fn cancelling_determinant_escalates() {
        let ctx = make_context("0.5", 128, 1e-30).unwrap();
        let det = |c: &QContext| {
            let a = c.parse("1.7")?;
            let tiny = c.parse("1e-60")?;
            let m = vec![
                vec![a.clone(), a.clone()],
                vec![a.clone(), &a + &(&a * &tiny)],
            ];
            Ok(determinant(m))
        };
        let s = stabilize(det, &ctx, 30).unwrap();
        assert!(s.escalations >= 1);
        let expected = ctx.parse("2.89e-60").unwrap();
        assert!(s.value.relative_error_log10(&expected) < -30.0);
    }

    #[test]
    fn ill_posed_request_fails() {
        let ctx = make_context("0.5", 64, 1e-15).unwrap();
        // Pure rounding noise: a value that depends on the precision itself.
        let noise = |c: &QContext| Ok(c.one().mul_pow2(-(c.bits() as i64)));
        let err = stabilize(noise, &ctx, 30).unwrap_err();
        assert!(matches!(err, Error::StabilizationFailed { .. }));
    }

    #[test]
    fn restabilizing_is_idempotent() {
        let ctx = make_context("0.3", 256, 1e-40).unwrap();
        let f = |c: &QContext| Ok(c.q_half_power(-7) + c.q_half_power(3));
        let a = stabilize(f, &ctx, 40).unwrap();
        let frozen = a.value.clone();
        let b = stabilize(|_| Ok(frozen.clone()), &ctx, 40).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(b.escalations, 0);
    }
}
