//! Explicit q-polynomials `Σ q^{k²} f_n(k) (−x)^k`, the Stieltjes-Wigert,
//! q⁻¹-Hermite and q-Laguerre families, differentiation and evaluation.

mod family;
mod poly;

pub use family::{CoefficientFamily, QHermiteFamily, QLaguerreFamily, StieltjesWigertFamily, UnitFamily};
pub use poly::{
    build_family_poly, differentiate, eval_pnj, eval_poly, q_hermite_eval, q_laguerre, stieltjes_wigert,
    QPolynomial,
};
