//! Scaled arbitrary-precision arithmetic, evaluation contexts and the
//! precision-escalation protocol.

mod context;
mod linalg;
mod scaled;
mod stabilize;

pub use context::{
    make_context, parse_decimal, QContext, DEFAULT_MANTISSA_BITS, DEFAULT_TAIL_TOL,
    MIN_MANTISSA_BITS,
};
pub use linalg::determinant;
pub use scaled::ScaledReal;
pub use stabilize::{agreement_digits, stabilize, StabilizedValue, MAX_ESCALATIONS};
