use rug::{Integer, Rational};
use serde::Serialize;

use super::family::CoefficientFamily;
use crate::error::{Error, Result};
use crate::numerics::{QContext, ScaledReal};
use crate::qseries::{falling_factorial, QFactorials};

/// Digits used for coefficients in the JSON export.
const EXPORT_DIGITS: usize = 40;

/// A real polynomial `Σ c_k x^k` with scaled coefficients. An empty
/// coefficient list is the zero polynomial.
#[derive(Clone, Debug)]
pub struct QPolynomial {
    tag: String,
    coeffs: Vec<ScaledReal>,
}

#[derive(Serialize)]
struct PolynomialJson<'a> {
    family: &'a str,
    n: Option<usize>,
    q: &'a str,
    coefficients: Vec<String>,
}

impl QPolynomial {
    pub fn new(tag: impl Into<String>, coeffs: Vec<ScaledReal>) -> Self {
        QPolynomial {
            tag: tag.into(),
            coeffs,
        }
    }

    pub fn zero(tag: impl Into<String>) -> Self {
        Self::new(tag, Vec::new())
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficients(&self) -> &[ScaledReal] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: usize) -> Option<&ScaledReal> {
        self.coeffs.get(k)
    }

    pub fn leading_sign(&self) -> i32 {
        self.coeffs.last().map_or(0, ScaledReal::signum)
    }

    pub fn to_json(&self, ctx: &QContext) -> String {
        let doc = PolynomialJson {
            family: &self.tag,
            n: self.degree(),
            q: ctx.literal(),
            coefficients: self.coeffs.iter().map(|c| c.to_sci_string(EXPORT_DIGITS)).collect(),
        };
        serde_json::to_string(&doc).expect("polynomial serializes")
    }
}

/// `P_n(x) = Σ q^{k²} f_n(k) (−x)^k` for a coefficient family.
pub fn build_family_poly(ctx: &QContext, family: &dyn CoefficientFamily, n: usize) -> Result<QPolynomial> {
    let f = family.coefficients(ctx, n);
    if f.len() != n + 1 {
        return Err(Error::InvalidArgument(format!(
            "family {} returned {} coefficients for degree {n}",
            family.name(),
            f.len()
        )));
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    for (k, fk) in f.iter().enumerate() {
        if !fk.mantissa().is_finite() {
            return Err(Error::NonFiniteCoefficient {
                family: family.name(),
                n,
                k,
            });
        }
        let kk = k as i64;
        let c = ctx.q_half_power(2 * kk * kk) * fk;
        coeffs.push(if k % 2 == 1 { -c } else { c });
    }
    Ok(QPolynomial::new(format!("{}(n={n})", family.name()), coeffs))
}

/// Monic Stieltjes-Wigert polynomial
/// `S_n(x) = (−1)^n q^{−n²−n/2} Σ [n k] q^{k²+k/2} (−x)^k`.
pub fn stieltjes_wigert(ctx: &QContext, n: usize) -> QPolynomial {
    let t = QFactorials::new(ctx, n);
    let ni = n as i64;
    let coeffs = (0..=n)
        .map(|k| {
            let kk = k as i64;
            // half-power lattice: 2k² + k − 2n² − n
            let c = t.binomial(n, kk) * ctx.q_half_power(2 * kk * kk + kk - 2 * ni * ni - ni);
            if (n + k) % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect();
    QPolynomial::new(format!("stieltjes-wigert(n={n})"), coeffs)
}

/// `L_n^{(α)}(x;q) = (q^{α+1};q)_n/(q;q)_n Σ [n k] q^{k²+αk} (−x)^k / (q^{α+1};q)_k`.
pub fn q_laguerre(ctx: &QContext, n: usize, alpha: &Rational) -> Result<QPolynomial> {
    if *alpha <= -1 {
        return Err(Error::InvalidArgument(format!(
            "q-Laguerre parameter alpha = {} must exceed -1",
            alpha.to_f64()
        )));
    }
    let t = QFactorials::new(ctx, n);
    let qa1 = ctx.q_power_rational(alpha) * ctx.q_value();
    let one = ctx.one();
    let mut shifted = Vec::with_capacity(n + 1);
    shifted.push(ctx.one());
    let mut term = qa1.clone();
    for k in 1..=n {
        let next = &shifted[k - 1] * &(&one - &term);
        shifted.push(next);
        term = &term * &ctx.q_value();
    }
    let lead = &shifted[n] / t.get(n);
    let coeffs = (0..=n)
        .map(|k| {
            let kk = k as i64;
            let e = Rational::from(kk * kk) + Rational::from(alpha * kk);
            let c = &lead * &t.binomial(n, kk) * ctx.q_power_rational(&e) / &shifted[k];
            if k % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect();
    Ok(QPolynomial::new(format!("q-laguerre(n={n},alpha={alpha})"), coeffs))
}

/// `h_n(sinh ξ) = Σ [n k] q^{k²−nk} (−1)^k e^{(n−2k)ξ}` by direct summation.
pub fn q_hermite_eval(ctx: &QContext, n: usize, xi: &ScaledReal) -> ScaledReal {
    let t = QFactorials::new(ctx, n);
    let e = ScaledReal::exp_of(&xi.with_prec(ctx.bits()).to_float());
    let ni = n as i64;
    let mut sum = ctx.zero();
    for k in 0..=ni {
        let term = t.binomial(n, k) * ctx.q_half_power(2 * (k * k - ni * k)) * e.powi(ni - 2 * k);
        sum = if k % 2 == 1 { sum - term } else { sum + term };
    }
    sum
}

/// `d^j P / dx^j` with exact integer factors; over-differentiation gives the
/// zero polynomial.
pub fn differentiate(p: &QPolynomial, j: usize) -> QPolynomial {
    if j == 0 {
        return p.clone();
    }
    let tag = format!("d^{j}/dx^{j} {}", p.tag);
    if p.coeffs.len() <= j {
        return QPolynomial::zero(tag);
    }
    let prec = p.coeffs[0].prec();
    let coeffs = (0..p.coeffs.len() - j)
        .map(|k| {
            let factor: Integer = falling_factorial((k + j) as i64, j as u32);
            &p.coeffs[k + j] * &ScaledReal::from_integer(prec, &factor)
        })
        .collect();
    QPolynomial::new(tag, coeffs)
}

/// Horner evaluation.
pub fn eval_poly(ctx: &QContext, p: &QPolynomial, x: &ScaledReal) -> ScaledReal {
    let mut acc = ctx.zero();
    for c in p.coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// `P_{n,j}(x) = x^j P_n^{(j)}(x)` for a coefficient family.
pub fn eval_pnj(ctx: &QContext, family: &dyn CoefficientFamily, n: usize, j: usize, x: &ScaledReal) -> Result<ScaledReal> {
    if j > 0 && x.is_zero() {
        return Ok(ctx.zero());
    }
    let p = build_family_poly(ctx, family, n)?;
    let dp = differentiate(&p, j);
    Ok(eval_poly(ctx, &dp, x) * x.powi(j as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_context;
    use crate::qpoly::{QLaguerreFamily, StieltjesWigertFamily, UnitFamily};

    fn ctx(q: &str) -> QContext {
        make_context(q, 256, 1e-40).unwrap()
    }

    fn close(a: &ScaledReal, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn unit_family_polynomials() {
        let c = ctx("0.5");
        let p0 = build_family_poly(&c, &UnitFamily, 0).unwrap();
        assert_eq!(p0.degree(), Some(0));
        assert_eq!(p0.coefficients()[0].to_f64(), 1.0);
        let p2 = build_family_poly(&c, &UnitFamily, 2).unwrap();
        let got: Vec<f64> = p2.coefficients().iter().map(ScaledReal::to_f64).collect();
        assert_eq!(got, vec![1.0, -0.5, 0.0625]);
    }

    #[test]
    fn sw_family_at_degree_one() {
        // P_1(x) = (q;q)_1 (1 − q x) = 0.5 − 0.25x; its root q^{-1} maps to
        // the S_1 root q^{-3/2} under x → q^{1/2} x.
        let c = ctx("0.5");
        let p = build_family_poly(&c, &StieltjesWigertFamily, 1).unwrap();
        assert_eq!(p.coefficients()[0].to_f64(), 0.5);
        assert_eq!(p.coefficients()[1].to_f64(), -0.25);
        let s = stieltjes_wigert(&c, 1);
        let root = c.q_half_power(-3);
        assert!(eval_poly(&c, &s, &root).is_zero() || eval_poly(&c, &s, &root).log2_abs() < -250.0);
    }

    #[test]
    fn sw_small_degrees() {
        let c = ctx("0.5");
        let s0 = stieltjes_wigert(&c, 0);
        assert_eq!(s0.coefficients().len(), 1);
        assert_eq!(s0.coefficients()[0].to_f64(), 1.0);
        let s1 = stieltjes_wigert(&c, 1);
        assert!(close(&s1.coefficients()[0], -2.8284271247461903, 1e-15));
        assert_eq!(s1.coefficients()[1].to_f64(), 1.0);
        let s2 = stieltjes_wigert(&c, 2);
        assert_eq!(s2.coefficients()[0].to_f64(), 32.0);
        assert!(close(&s2.coefficients()[1], -16.970562748477143, 1e-15));
        assert_eq!(s2.coefficients()[2].to_f64(), 1.0);
        assert!(close(&eval_poly(&c, &s2, &c.one()), 16.029437251522857, 1e-15));
    }

    #[test]
    fn sw_is_monic() {
        for q in ["0.3", "0.5", "0.9"] {
            let c = ctx(q);
            for n in [0usize, 3, 17, 40] {
                let s = stieltjes_wigert(&c, n);
                let lead = &s.coefficients()[n];
                assert!(lead.relative_error_log10(&c.one()) < -70.0 || (lead - &c.one()).is_zero());
            }
        }
    }

    #[test]
    fn sw_at_spectral_point() {
        // N = 1: S_1(−q^{−3/2}) = −2 q^{−3/2}
        let c = ctx("0.5");
        let s = stieltjes_wigert(&c, 1);
        let v = eval_poly(&c, &s, &-c.q_half_power(-3));
        assert!(close(&v, -5.656854249492381, 1e-15));
    }

    #[test]
    fn laguerre_small_degrees() {
        let c = ctx("0.5");
        let l0 = q_laguerre(&c, 0, &Rational::from(0)).unwrap();
        assert_eq!(l0.coefficients()[0].to_f64(), 1.0);
        let l1 = q_laguerre(&c, 1, &Rational::from(0)).unwrap();
        assert!(close(&l1.coefficients()[0], 1.0, 1e-15));
        // q x / (1 − q) at q = 1/2
        assert!(close(&l1.coefficients()[1], -1.0, 1e-15));
        assert!(q_laguerre(&c, 3, &Rational::from(-1)).is_err());
    }

    #[test]
    fn laguerre_matches_family_scaling() {
        // L_n^{(α)}(x) = P_n(q^α x) / (q;q)_n²
        let c = ctx("0.6");
        let alpha = Rational::from((2, 5));
        let fam = QLaguerreFamily::new(alpha.clone()).unwrap();
        let n = 12;
        let l = q_laguerre(&c, n, &alpha).unwrap();
        let p = build_family_poly(&c, &fam, n).unwrap();
        let qn = QFactorials::new(&c, n).get(n).clone();
        for x in [0.3, 2.0, 17.5] {
            let xv = c.real(x);
            let lhs = eval_poly(&c, &l, &xv);
            let rhs = eval_poly(&c, &p, &(c.q_power_rational(&alpha) * &xv)) / (&qn * &qn);
            assert!(lhs.relative_error_log10(&rhs) < -60.0, "x={x}");
        }
    }

    #[test]
    fn hermite_direct_sum() {
        let c = ctx("0.5");
        assert_eq!(q_hermite_eval(&c, 0, &c.real(0.3)).to_f64(), 1.0);
        assert!(q_hermite_eval(&c, 1, &c.zero()).is_zero());
        // cross-evaluation through S_3
        let xi = c.parse("0.7").unwrap();
        let direct = q_hermite_eval(&c, 3, &xi);
        let s3 = stieltjes_wigert(&c, 3);
        let arg = c.q_half_power(-7) * ScaledReal::exp_of(&(-(xi.mul_pow2(1))).to_float());
        let bridged = -(c.q_half_power(21) * ScaledReal::exp_of(&(xi.clone() * c.int(3)).to_float()) * eval_poly(&c, &s3, &arg));
        assert!(direct.relative_error_log10(&bridged) < -70.0);
    }

    #[test]
    fn differentiation() {
        let c = ctx("0.5");
        let s2 = stieltjes_wigert(&c, 2);
        assert_eq!(differentiate(&s2, 0).coefficients().len(), 3);
        let d = differentiate(&s2, 1);
        assert_eq!(d.degree(), Some(1));
        assert_eq!(d.coefficients()[1].to_f64(), 2.0);
        assert!(close(&d.coefficients()[0], -16.970562748477143, 1e-15));
        let s5 = stieltjes_wigert(&c, 5);
        let z = differentiate(&s5, 6);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        assert!(eval_poly(&c, &z, &c.real(3.0)).is_zero());
    }

    #[test]
    fn pnj_examples() {
        let c = ctx("0.5");
        let v = eval_pnj(&c, &UnitFamily, 2, 1, &c.one()).unwrap();
        assert_eq!(v.to_f64(), -0.375);
        assert!(eval_pnj(&c, &UnitFamily, 5, 2, &c.zero()).unwrap().is_zero());
        let x = c.real(1.7);
        let p = build_family_poly(&c, &StieltjesWigertFamily, 6).unwrap();
        let direct = eval_poly(&c, &p, &x);
        assert_eq!(eval_pnj(&c, &StieltjesWigertFamily, 6, 0, &x).unwrap(), direct);
    }

    #[test]
    fn json_export() {
        let c = ctx("0.5");
        let s = stieltjes_wigert(&c, 1);
        let v: serde_json::Value = serde_json::from_str(&s.to_json(&c)).unwrap();
        assert_eq!(v["family"], "stieltjes-wigert(n=1)");
        assert_eq!(v["n"], 1);
        assert_eq!(v["q"], "0.5");
        assert_eq!(v["coefficients"][1], "1.000000000000000000000000000000000000000e0");
        assert!(v["coefficients"][0].as_str().unwrap().starts_with("-2.82842712474619009760"));
    }
}
