use crate::error::{Error, Result};
use crate::numerics::{QContext, ScaledReal};

/// Hard cap on factors of an infinite product; unreachable for `q ≤ 0.99`.
const MAX_PRODUCT_FACTORS: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PochhammerLength {
    Finite(usize),
    Infinite,
}

/// `(a; q)_n = ∏_{m<n} (1 − a q^m)`, or the infinite product truncated once
/// `|a| q^m < tail_tol · (1 − q)`.
pub fn q_pochhammer(ctx: &QContext, a: &ScaledReal, n: PochhammerLength) -> ScaledReal {
    let mut prod = ctx.one();
    if a.is_zero() {
        return prod;
    }
    let q = ctx.q_value();
    let one = ctx.one();
    let mut term = a.with_prec(ctx.bits());
    match n {
        PochhammerLength::Finite(n) => {
            for _ in 0..n {
                prod = &prod * &(&one - &term);
                term = &term * &q;
            }
        }
        PochhammerLength::Infinite => {
            let one_minus_q = 1.0 - ctx.q().to_f64();
            let stop = ctx.tail_tol() * one_minus_q;
            let log2_stop = stop.log2();
            for _ in 0..MAX_PRODUCT_FACTORS {
                if term.log2_abs() < log2_stop {
                    return prod;
                }
                prod = &prod * &(&one - &term);
                term = &term * &q;
            }
            panic!("infinite q-Pochhammer product failed to converge");
        }
    }
    prod
}

/// Table of `(q; q)_k` for `k = 0..=n`.
#[derive(Clone, Debug)]
pub struct QFactorials {
    values: Vec<ScaledReal>,
}

impl QFactorials {
    pub fn new(ctx: &QContext, n: usize) -> Self {
        let q = ctx.q_value();
        let one = ctx.one();
        let mut values = Vec::with_capacity(n + 1);
        values.push(ctx.one());
        let mut qk = q.clone();
        for k in 1..=n {
            let next = &values[k - 1] * &(&one - &qk);
            values.push(next);
            qk = &qk * &q;
        }
        QFactorials { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(q; q)_k`.
    pub fn get(&self, k: usize) -> &ScaledReal {
        &self.values[k]
    }

    /// Gaussian binomial `[n k]` from the table; zero outside `0 ≤ k ≤ n`.
    pub fn binomial(&self, n: usize, k: i64) -> ScaledReal {
        if k < 0 || k as usize > n {
            return ScaledReal::zero(self.values[0].prec());
        }
        let k = k as usize;
        &self.values[n] / &(&self.values[k] * &self.values[n - k])
    }
}

/// Gaussian binomial `[n k] = (q;q)_n / ((q;q)_k (q;q)_{n−k})`.
pub fn gauss_binomial(ctx: &QContext, n: usize, k: i64) -> ScaledReal {
    if k < 0 || k as usize > n {
        return ctx.zero();
    }
    QFactorials::new(ctx, n).binomial(n, k)
}

/// `F(z) = Σ q^{k²/2} z^k` through the Jacobi triple product
/// `(q;q)_∞ (−z√q;q)_∞ (−√q/z;q)_∞`.
pub fn triple_product_f(ctx: &QContext, z: &ScaledReal) -> Result<ScaledReal> {
    if z.is_zero() {
        return Err(Error::ZeroArgument("triple_product_f"));
    }
    let p = ctx.q_half_power(1);
    let q = ctx.q_value();
    let inf = PochhammerLength::Infinite;
    let a1 = -(z * &p);
    let a2 = -(&p / z);
    Ok(q_pochhammer(ctx, &q, inf) * q_pochhammer(ctx, &a1, inf) * q_pochhammer(ctx, &a2, inf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_context;
    use crate::qseries::{x_jm, TailPolicy};

    fn ctx(q: &str) -> QContext {
        make_context(q, 256, 1e-40).unwrap()
    }

    /// Independent oracle: plain f64 product.
    fn poch_f64(a: f64, q: f64, n: usize) -> f64 {
        (0..n).map(|m| 1.0 - a * q.powi(m as i32)).product()
    }

    #[test]
    fn finite_products() {
        let c = ctx("0.5");
        let any = c.real(123.0);
        assert_eq!(q_pochhammer(&c, &any, PochhammerLength::Finite(0)).to_f64(), 1.0);
        let half = c.real(0.5);
        assert_eq!(q_pochhammer(&c, &half, PochhammerLength::Finite(2)).to_f64(), 0.375);
        let v = q_pochhammer(&c, &c.real(-1.3), PochhammerLength::Finite(9)).to_f64();
        assert!((v - poch_f64(-1.3, 0.5, 9)).abs() < 1e-13 * v.abs());
    }

    #[test]
    fn euler_function_at_one_half() {
        let c = ctx("0.5");
        let v = q_pochhammer(&c, &c.q_value(), PochhammerLength::Infinite);
        let expected = c
            .parse("0.288788095086602421278899721929230780088911904840685784114741066184902")
            .unwrap();
        assert!(v.relative_error_log10(&expected) < -39.0);
    }

    #[test]
    fn gaussian_binomials() {
        let c = ctx("0.5");
        assert_eq!(gauss_binomial(&c, 2, 1).to_f64(), 1.5);
        assert_eq!(gauss_binomial(&c, 5, 0).to_f64(), 1.0);
        assert_eq!(gauss_binomial(&c, 5, 5).to_f64(), 1.0);
        assert!(gauss_binomial(&c, 5, 6).is_zero());
        assert!(gauss_binomial(&c, 5, -1).is_zero());
        // Pascal-recurrence oracle in exact dyadic f64 arithmetic
        let mut rows = vec![vec![1.0f64]];
        for n in 1..=4usize {
            let prev = &rows[n - 1];
            let row: Vec<f64> = (0..=n)
                .map(|k| {
                    let left = if k >= 1 { prev[k - 1] } else { 0.0 };
                    let right = if k < n { prev[k] } else { 0.0 };
                    left + 0.5f64.powi(k as i32) * right
                })
                .collect();
            rows.push(row);
        }
        assert_eq!(rows[4][2], 2.1875);
        let g = gauss_binomial(&c, 4, 2);
        assert!((g.to_f64() - 2.1875).abs() < 1e-30);
    }

    #[test]
    fn pascal_recurrence_to_working_precision() {
        let c = ctx("0.37");
        let t = QFactorials::new(&c, 30);
        for n in 2..=30usize {
            for k in 1..n as i64 {
                let lhs = t.binomial(n, k);
                let rhs = t.binomial(n - 1, k - 1) + c.q_half_power(2 * k) * t.binomial(n - 1, k);
                assert!(lhs.relative_error_log10(&rhs) < -72.0, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn triple_product_matches_theta_at_quarter() {
        // q = 1/4: q^{k²/2} = (1/2)^{k²}, so F(1) = Θ(1) at base 1/2.
        let c = ctx("0.25");
        let f = triple_product_f(&c, &c.one()).unwrap();
        let c_half = ctx("0.5");
        let theta = x_jm(&c_half, 0, 0, &c_half.one(), &TailPolicy::new(1e-40)).unwrap();
        assert!(f.relative_error_log10(&theta) < -39.0);
        assert!((f.to_f64() - 2.128936827211877).abs() < 1e-14);
    }

    #[test]
    fn triple_product_vanishes_on_its_zero() {
        let c = ctx("0.5");
        let z = -c.q_half_power(-1);
        let f = triple_product_f(&c, &z).unwrap();
        assert!(f.log2_abs() < -200.0, "{f}");
        assert!(triple_product_f(&c, &c.zero()).is_err());
    }

    #[test]
    fn triple_product_against_bilateral_sum() {
        let c = ctx("0.5");
        let z = c.real(2.0);
        let f = triple_product_f(&c, &z).unwrap();
        let rt = c.sqrt_base();
        let sum = x_jm(&rt, 0, 0, &z.with_prec(rt.bits()), &TailPolicy::new(1e-42)).unwrap();
        assert!(f.relative_error_log10(&sum) < -38.0);
    }
}
