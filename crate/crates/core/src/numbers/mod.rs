//! Exact scalar arithmetic over ℚ and real quadratic extensions, extended
//! values with infinities, and the one-variable piecewise-affine machinery
//! behind every min-plus evaluation in this crate.

mod ext;
mod piecewise;
mod quadint;
mod scalar;

pub use ext::ExtValue;
pub use piecewise::{pa_envelope, solve_fixed, AffineForm, FixedPoints, Interval, PAFunction};
pub use quadint::{quad_from_lattice, QuadraticInt};
pub use scalar::Scalar;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

/// JSON form of a scalar: `{"rat":[num,den]}` or
/// `{"quad":{"p":[..],"q":[..],"D":n}}`, with integer components rendered
/// as decimal strings so arbitrary precision survives, plus an optional
/// `approx` field added by report writers.
pub fn scalar_to_json(s: &Scalar) -> Value {
    fn rat_pair(r: &BigRational) -> Value {
        json!([r.numer().to_string(), r.denom().to_string()])
    }
    match s {
        Scalar::Rat(r) => json!({ "rat": rat_pair(r) }),
        Scalar::Quad { p, q, d } => json!({
            "quad": { "p": rat_pair(p), "q": rat_pair(q), "D": d }
        }),
    }
}

/// Inverse of [`scalar_to_json`].
pub fn scalar_from_json(v: &Value) -> Option<Scalar> {
    fn rat_pair(v: &Value) -> Option<BigRational> {
        let arr = v.as_array()?;
        let num: BigInt = arr.first()?.as_str()?.parse().ok()?;
        let den: BigInt = arr.get(1)?.as_str()?.parse().ok()?;
        Some(BigRational::new(num, den))
    }
    if let Some(r) = v.get("rat") {
        return Some(Scalar::from_big(rat_pair(r)?));
    }
    let q = v.get("quad")?;
    Some(Scalar::quad(
        rat_pair(q.get("p")?)?,
        rat_pair(q.get("q")?)?,
        q.get("D")?.as_u64()?,
    ))
}

/// JSON form of an extended value; infinities map to `"+inf"` / `"-inf"`.
pub fn ext_to_json(v: &ExtValue) -> Value {
    match v {
        ExtValue::PlusInf => json!("+inf"),
        ExtValue::MinusInf => json!("-inf"),
        ExtValue::Finite(s) => scalar_to_json(s),
    }
}
