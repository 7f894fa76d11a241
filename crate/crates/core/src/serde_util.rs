//! Serialization helpers: arbitrary-precision integers are emitted as
//! decimal strings so downstream consumers never lose precision.

use num_bigint::BigInt;
use serde::Serializer;

pub fn bigint_string<S: Serializer>(value: &BigInt, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&value.to_string())
}
