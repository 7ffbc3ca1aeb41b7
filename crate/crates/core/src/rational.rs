//! Small helpers around `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};

/// A JSON integer of arbitrary size.
pub type JsonInt = serde_json::Number;

fn big_to_json(n: &BigInt) -> JsonInt {
    // `arbitrary_precision` keeps the decimal digits verbatim.
    n.to_string()
        .parse()
        .expect("decimal integer is a valid JSON number")
}

/// `(numerator, denominator)` as JSON integers, denominator positive.
pub fn rational_to_json_pair(q: &BigRational) -> (JsonInt, JsonInt) {
    (big_to_json(q.numer()), big_to_json(q.denom()))
}

pub fn rational_json(q: &BigRational) -> serde_json::Value {
    let (n, d) = rational_to_json_pair(q);
    serde_json::json!([n, d])
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact binary value of a finite double.
pub fn from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_f64(x)
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
