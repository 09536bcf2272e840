use std::fmt;
use std::sync::Arc;

use super::products::{q_pochhammer, PochhammerLength, QFactorials};
use crate::numerics::{QContext, ScaledReal};

type Generator = dyn Fn(&QContext, usize) -> ScaledReal + Send + Sync;

/// A uniformly bounded coefficient sequence `a_k` for the generalized theta
/// functions `Φ_j` and `Ψ_{j,n}`.
#[derive(Clone)]
pub struct CoefficientSequence {
    name: String,
    bound: f64,
    generator: Arc<Generator>,
}

impl fmt::Debug for CoefficientSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSequence")
            .field("name", &self.name)
            .field("bound", &self.bound)
            .finish()
    }
}

impl CoefficientSequence {
    /// `bound` must dominate `|a_k|` for every `k`.
    pub fn new<F>(name: impl Into<String>, bound: f64, generator: F) -> Self
    where
        F: Fn(&QContext, usize) -> ScaledReal + Send + Sync + 'static,
    {
        assert!(bound.is_finite() && bound >= 0.0, "coefficient bound must be finite");
        CoefficientSequence {
            name: name.into(),
            bound,
            generator: Arc::new(generator),
        }
    }

    /// `a_k ≡ 1`, the choice that turns `Φ` into the one-sided theta series.
    pub fn ones() -> Self {
        Self::new("ones", 1.0, |ctx, _| ctx.one())
    }

    /// `a_k = (−1)^k / (q;q)_k`: `Φ` becomes Ramanujan's q-Airy function.
    pub fn q_airy(ctx: &QContext) -> Self {
        let bound = inverse_euler_bound(ctx);
        Self::new("q-airy", bound, |ctx, k| {
            let t = QFactorials::new(ctx, k);
            let v = t.get(k).recip();
            if k % 2 == 1 {
                -v
            } else {
                v
            }
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn coefficient(&self, ctx: &QContext, k: usize) -> ScaledReal {
        (self.generator)(ctx, k)
    }
}

/// An upper bound for `1 / (q;q)_∞`, padded against rounding.
pub(crate) fn inverse_euler_bound(ctx: &QContext) -> f64 {
    let e = q_pochhammer(ctx, &ctx.q_value(), PochhammerLength::Infinite);
    (1.0 / e.to_f64()) * (1.0 + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_context;

    #[test]
    fn q_airy_coefficients() {
        let ctx = make_context("0.5", 128, 1e-30).unwrap();
        let a = CoefficientSequence::q_airy(&ctx);
        assert_eq!(a.coefficient(&ctx, 0).to_f64(), 1.0);
        assert_eq!(a.coefficient(&ctx, 1).to_f64(), -2.0);
        assert!((a.coefficient(&ctx, 2).to_f64() - 1.0 / 0.375).abs() < 1e-15);
        for k in 0..30 {
            assert!(a.coefficient(&ctx, k).to_f64().abs() <= a.bound());
        }
    }
}
