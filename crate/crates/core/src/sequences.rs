//! Exact and modular evaluation of Fibonacci, Lucas, and general Lucas-pair
//! sequences U_n(P,Q), V_n(P,Q), with the `SequenceSpec` abstraction
//! (multiplier x base sampled along n^j) and its text grammar.
//!
//! Sequences index from n = 1 at the API surface; n = 0 is supported
//! internally with F_0 = 0, U_0 = 0, V_0 = 2.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::arith::{mul_mod, sub_mod};
use crate::error::{Error, Result};

/// Largest index at which exact (arbitrary-precision) evaluation is attempted
/// by default. Modular evaluation has no such limit.
pub const DEFAULT_EXACT_INDEX_LIMIT: u64 = 10_000_000;

/// `(F_n, F_{n+1})` by fast doubling.
fn fib_pair(n: u64) -> (BigInt, BigInt) {
    if n == 0 {
        return (BigInt::zero(), BigInt::from(1));
    }
    let (a, b) = fib_pair(n >> 1);
    // F_2k = F_k (2 F_{k+1} - F_k), F_{2k+1} = F_k^2 + F_{k+1}^2
    let c = &a * (&b * 2u32 - &a);
    let d = &a * &a + &b * &b;
    if n & 1 == 0 {
        (c, d)
    } else {
        let e = &c + &d;
        (d, e)
    }
}

/// F_n exactly, with F_1 = F_2 = 1.
pub fn fib(n: u64) -> BigInt {
    fib_pair(n).0
}

/// `(F_n mod m, F_{n+1} mod m)` in O(log n) modular multiplications.
pub fn fib_pair_mod(n: u128, m: u64) -> Result<(u64, u64)> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    if m == 1 {
        return Ok((0, 0));
    }
    let (mut a, mut b) = (0u64, 1u64); // (F_0, F_1)
    if n == 0 {
        return Ok((a, b));
    }
    let bits = 128 - n.leading_zeros();
    for i in (0..bits).rev() {
        let two_b = mul_mod(2 % m, b, m);
        let c = mul_mod(a, sub_mod(two_b, a, m), m);
        let d = (mul_mod(a, a, m) as u128 + mul_mod(b, b, m) as u128) % m as u128;
        let d = d as u64;
        if n >> i & 1 == 1 {
            a = d;
            b = (c as u128 + d as u128) as u64 % m;
        } else {
            a = c;
            b = d;
        }
    }
    Ok((a, b))
}

/// F_n mod m, residue in {0, ..., m-1}.
pub fn fib_mod(n: u128, m: u64) -> Result<u64> {
    Ok(fib_pair_mod(n, m)?.0)
}

/// The Lucas companion number L_n = V_n(1,-1), with (L_1, L_2, L_3) = (1, 3, 4).
pub fn lucas_companion(n: u64) -> BigInt {
    let (f_n, f_n1) = fib_pair(n);
    f_n1 * 2u32 - f_n
}

/// L_n mod m, via L_n = 2 F_{n+1} - F_n.
pub fn lucas_companion_mod(n: u128, m: u64) -> Result<u64> {
    let (f_n, f_n1) = fib_pair_mod(n, m)?;
    if m == 1 {
        return Ok(0);
    }
    Ok(sub_mod(mul_mod(2 % m, f_n1, m), f_n, m))
}

/// Parameters of a Lucas pair: U and V satisfy x_{n+1} = P x_n - Q x_{n-1}
/// with seeds (U_0, U_1) = (0, 1) and (V_0, V_1) = (2, P).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LucasParams {
    p: i64,
    q: i64,
    discriminant: i64,
}

impl LucasParams {
    pub fn new(p: i64, q: i64) -> Self {
        LucasParams {
            p,
            q,
            discriminant: p * p - 4 * q,
        }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// P^2 - 4Q, cached at construction.
    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }
}

/// 2x2 matrix power over BigInt; `m = [[p, -q], [1, 0]]` raised to `n` carries
/// `(U_{n+1}, U_n)` in its first column.
fn lucas_matrix_pow(params: &LucasParams, n: u64) -> [BigInt; 4] {
    let mut result = [
        BigInt::from(1),
        BigInt::zero(),
        BigInt::zero(),
        BigInt::from(1),
    ];
    let mut base = [
        BigInt::from(params.p),
        BigInt::from(-params.q),
        BigInt::from(1),
        BigInt::zero(),
    ];
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul_big(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul_big(&base, &base);
        }
    }
    result
}

fn mat_mul_big(a: &[BigInt; 4], b: &[BigInt; 4]) -> [BigInt; 4] {
    [
        &a[0] * &b[0] + &a[1] * &b[2],
        &a[0] * &b[1] + &a[1] * &b[3],
        &a[2] * &b[0] + &a[3] * &b[2],
        &a[2] * &b[1] + &a[3] * &b[3],
    ]
}

/// `(U_n, U_{n+1})` exactly.
fn lucas_u_pair(params: &LucasParams, n: u64) -> (BigInt, BigInt) {
    let m = lucas_matrix_pow(params, n);
    (m[2].clone(), m[0].clone())
}

/// U_n(P, Q) exactly.
pub fn lucas_u(params: &LucasParams, n: u64) -> BigInt {
    lucas_u_pair(params, n).0
}

/// V_n(P, Q) exactly, via V_n = 2 U_{n+1} - P U_n.
pub fn lucas_v(params: &LucasParams, n: u64) -> BigInt {
    let (u_n, u_n1) = lucas_u_pair(params, n);
    u_n1 * 2u32 - BigInt::from(params.p) * u_n
}

fn mat_mul_mod(a: &[u64; 4], b: &[u64; 4], m: u64) -> [u64; 4] {
    let mul = |x: usize, y: usize, z: usize, w: usize| {
        ((mul_mod(a[x], b[y], m) as u128 + mul_mod(a[z], b[w], m) as u128) % m as u128) as u64
    };
    [
        mul(0, 0, 1, 2),
        mul(0, 1, 1, 3),
        mul(2, 0, 3, 2),
        mul(2, 1, 3, 3),
    ]
}

/// `(U_n, U_{n+1})` mod m by 2x2 matrix powering of [[P, -Q], [1, 0]].
///
/// Matrix powering is used instead of (P,Q)-specific doubling identities so
/// the degenerate discriminants (D = 0, Q = 0) take the same code path.
fn lucas_u_pair_mod(params: &LucasParams, n: u128, m: u64) -> Result<(u64, u64)> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    if m == 1 {
        return Ok((0, 0));
    }
    let p = (params.p as i128).rem_euclid(m as i128) as u64;
    let neg_q = (-(params.q as i128)).rem_euclid(m as i128) as u64;
    let mut result = [1u64 % m, 0, 0, 1 % m];
    let mut base = [p, neg_q, 1 % m, 0];
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul_mod(&result, &base, m);
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul_mod(&base, &base, m);
        }
    }
    Ok((result[2], result[0]))
}

/// U_n(P, Q) mod m.
pub fn lucas_u_mod(params: &LucasParams, n: u128, m: u64) -> Result<u64> {
    Ok(lucas_u_pair_mod(params, n, m)?.0)
}

/// V_n(P, Q) mod m.
pub fn lucas_v_mod(params: &LucasParams, n: u128, m: u64) -> Result<u64> {
    let (u_n, u_n1) = lucas_u_pair_mod(params, n, m)?;
    if m == 1 {
        return Ok(0);
    }
    let p = (params.p as i128).rem_euclid(m as i128) as u64;
    Ok(sub_mod(mul_mod(2 % m, u_n1, m), mul_mod(p, u_n, m), m))
}

/// The base family a `SequenceSpec` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SequenceBase {
    /// F_n with F_1 = F_2 = 1.
    Fibonacci,
    /// L_n = V_n(1, -1) with L_1 = 1, L_2 = 3.
    LucasCompanion,
    /// U_n(P, Q).
    LucasU(LucasParams),
    /// V_n(P, Q).
    LucasV(LucasParams),
}

impl SequenceBase {
    fn eval(&self, n: u64) -> BigInt {
        match self {
            SequenceBase::Fibonacci => fib(n),
            SequenceBase::LucasCompanion => lucas_companion(n),
            SequenceBase::LucasU(params) => lucas_u(params, n),
            SequenceBase::LucasV(params) => lucas_v(params, n),
        }
    }

    fn eval_mod(&self, n: u128, m: u64) -> Result<u64> {
        match self {
            SequenceBase::Fibonacci => fib_mod(n, m),
            SequenceBase::LucasCompanion => lucas_companion_mod(n, m),
            SequenceBase::LucasU(params) => lucas_u_mod(params, n, m),
            SequenceBase::LucasV(params) => lucas_v_mod(params, n, m),
        }
    }
}

/// A symbolic sequence family `c * Base_{n^j}`: multiplier, base, and power
/// time-change. Evaluable exactly or modulo m; the modular form never
/// materializes the exact value.
///
/// Text syntax: `fib`, `lucasV`, `lucasU:P=<int>,Q=<int>`,
/// `lucasV:P=<int>,Q=<int>`, with optional prefix `<c>*` for the multiplier
/// and suffix `^<j>` for the power. `5*fib^2` denotes n -> 5 F_{n^2}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SequenceSpec {
    base: SequenceBase,
    power: u32,
    multiplier: i64,
}

impl SequenceSpec {
    pub fn new(base: SequenceBase, power: u32, multiplier: i64) -> Result<Self> {
        if power == 0 {
            return Err(Error::ZeroPower);
        }
        Ok(SequenceSpec {
            base,
            power,
            multiplier,
        })
    }

    pub fn fibonacci() -> Self {
        SequenceSpec {
            base: SequenceBase::Fibonacci,
            power: 1,
            multiplier: 1,
        }
    }

    /// The sequence n -> 5 F_{n^2}.
    pub fn five_fib_squared() -> Self {
        SequenceSpec {
            base: SequenceBase::Fibonacci,
            power: 2,
            multiplier: 5,
        }
    }

    pub fn base(&self) -> &SequenceBase {
        &self.base
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn multiplier(&self) -> i64 {
        self.multiplier
    }

    /// The sampled index n^j, kept in 128-bit range; overflow is an error,
    /// never silent wraparound.
    pub fn index(&self, n: u64) -> Result<u128> {
        if n == 0 {
            return Err(Error::ZeroArgument);
        }
        (n as u128)
            .checked_pow(self.power)
            .ok_or(Error::IndexOverflow {
                base: n,
                exp: self.power,
            })
    }

    /// Exact evaluation `c * Base_{n^j}` under the default index limit.
    pub fn eval(&self, n: u64) -> Result<BigInt> {
        self.eval_with_limit(n, DEFAULT_EXACT_INDEX_LIMIT)
    }

    /// Exact evaluation with an explicit index limit guarding memory use.
    pub fn eval_with_limit(&self, n: u64, limit: u64) -> Result<BigInt> {
        let index = self.index(n)?;
        if index > limit as u128 {
            return Err(Error::ExactLimitExceeded { index, limit });
        }
        Ok(self.base.eval(index as u64) * self.multiplier)
    }

    /// Modular evaluation, residue in {0, ..., m-1}.
    pub fn eval_mod(&self, n: u64, m: u64) -> Result<u64> {
        if m == 0 {
            return Err(Error::ZeroModulus);
        }
        if m == 1 {
            return Ok(0);
        }
        let index = self.index(n)?;
        let base = self.base.eval_mod(index, m)?;
        let c = (self.multiplier as i128).rem_euclid(m as i128) as u64;
        Ok(mul_mod(c, base, m))
    }

    /// Parses the text grammar. Errors carry the byte position of the fault.
    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.multiplier != 1 {
            write!(f, "{}*", self.multiplier)?;
        }
        match &self.base {
            SequenceBase::Fibonacci => write!(f, "fib")?,
            SequenceBase::LucasCompanion => write!(f, "lucasV")?,
            SequenceBase::LucasU(params) => write!(f, "lucasU:P={},Q={}", params.p(), params.q())?,
            SequenceBase::LucasV(params) => write!(f, "lucasV:P={},Q={}", params.p(), params.q())?,
        }
        if self.power != 1 {
            write!(f, "^{}", self.power)?;
        }
        Ok(())
    }
}

impl Serialize for SequenceSpec {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

struct SpecParser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> SpecParser<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::SpecParse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn parse_int(&mut self, what: &str) -> Result<i64> {
        let rest = self.rest();
        let mut len = 0;
        let bytes = rest.as_bytes();
        if len < bytes.len() && (bytes[len] == b'-' || bytes[len] == b'+') {
            len += 1;
        }
        while len < bytes.len() && bytes[len].is_ascii_digit() {
            len += 1;
        }
        let digits = &rest[..len];
        match i64::from_str(digits) {
            Ok(v) => {
                self.pos += len;
                Ok(v)
            }
            Err(_) => Err(self.error(format!("expected {what}"))),
        }
    }

    fn parse_params(&mut self) -> Result<LucasParams> {
        if !self.eat(":P=") {
            return Err(self.error("expected `:P=<int>,Q=<int>`"));
        }
        let p = self.parse_int("integer P")?;
        if !self.eat(",Q=") {
            return Err(self.error("expected `,Q=<int>`"));
        }
        let q = self.parse_int("integer Q")?;
        Ok(LucasParams::new(p, q))
    }

    fn parse_spec(&mut self) -> Result<SequenceSpec> {
        // optional `<c>*` prefix: an integer followed by `*`
        let mut multiplier = 1i64;
        let save = self.pos;
        if let Ok(c) = self.parse_int("multiplier") {
            if self.eat("*") {
                multiplier = c;
            } else {
                self.pos = save;
            }
        }
        let base = if self.eat("fib") {
            SequenceBase::Fibonacci
        } else if self.eat("lucasU") {
            SequenceBase::LucasU(self.parse_params()?)
        } else if self.eat("lucasV") {
            if self.rest().starts_with(':') {
                SequenceBase::LucasV(self.parse_params()?)
            } else {
                SequenceBase::LucasCompanion
            }
        } else {
            return Err(self.error(
                "expected base: `fib`, `lucasV`, `lucasU:P=..,Q=..`, or `lucasV:P=..,Q=..`",
            ));
        };
        let mut power = 1u32;
        if self.eat("^") {
            let j = self.parse_int("positive power")?;
            if j < 1 || j > u32::MAX as i64 {
                return Err(self.error("power must be a positive integer"));
            }
            power = j as u32;
        }
        if !self.rest().is_empty() {
            return Err(self.error("trailing characters after sequence spec"));
        }
        SequenceSpec::new(base, power, multiplier)
    }
}

impl FromStr for SequenceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SpecParser { text: s, pos: 0 }.parse_spec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn fib_known_values() {
        assert_eq!(fib(0), BigInt::zero());
        assert_eq!(fib(1), BigInt::from(1));
        assert_eq!(fib(2), BigInt::from(1));
        assert_eq!(fib(10), BigInt::from(55));
        assert_eq!(fib(25), BigInt::from(75025));
    }

    #[test]
    fn fib_matches_iterative_recurrence() {
        let (mut a, mut b) = (BigInt::zero(), BigInt::from(1));
        for n in 0..=5000u64 {
            assert_eq!(fib(n), a, "n={n}");
            let next = &a + &b;
            a = b;
            b = next;
        }
    }

    #[test]
    fn fib_mod_examples() {
        assert_eq!(fib_mod(25, 5).unwrap(), 0);
        // F_7 = 13 = -1 mod 7, consistent with 7 = +-2 mod 5
        assert_eq!(fib_mod(7, 7).unwrap(), 6);
        for n in [0u128, 1, 17, 1_000_000_007] {
            assert_eq!(fib_mod(n, 1).unwrap(), 0);
        }
        assert_eq!(fib_mod(10, 0), Err(Error::ZeroModulus));
    }

    #[test]
    fn fib_mod_matches_exact() {
        for n in 0..400u64 {
            let exact = fib(n);
            for m in [2u64, 3, 5, 97, 1_000_000_007] {
                let expected = (&exact % m).to_u64().unwrap();
                assert_eq!(fib_mod(n as u128, m).unwrap(), expected, "n={n}, m={m}");
            }
        }
    }

    #[test]
    fn lucas_companion_values() {
        let expected = [2i64, 1, 3, 4, 7, 11, 18, 29, 47, 76, 123];
        for (n, &v) in expected.iter().enumerate() {
            assert_eq!(lucas_companion(n as u64), BigInt::from(v), "n={n}");
        }
        // L_7 = 29 = 1 mod 7
        assert_eq!(lucas_companion_mod(7, 7).unwrap(), 1);
    }

    #[test]
    fn lucas_u_recurrence_and_known_forms() {
        // U_n(1,-1) = F_n
        let fib_params = LucasParams::new(1, -1);
        for n in 0..=30u64 {
            assert_eq!(lucas_u(&fib_params, n), fib(n), "n={n}");
        }
        // U_n(3,2) = 2^n - 1 by partial fractions
        let params = LucasParams::new(3, 2);
        for n in 0..=20usize {
            assert_eq!(
                lucas_u(&params, n as u64),
                (BigInt::from(1) << n) - 1,
                "n={n}"
            );
        }
        assert_eq!(lucas_u(&params, 4), BigInt::from(15));
        // U_2(P,Q) = P
        for p in -5i64..=5 {
            for q in -5i64..=5 {
                assert_eq!(lucas_u(&LucasParams::new(p, q), 2), BigInt::from(p));
            }
        }
    }

    #[test]
    fn lucas_uv_match_direct_recurrence() {
        for p in -4i64..=4 {
            for q in -4i64..=4 {
                let params = LucasParams::new(p, q);
                let (mut u0, mut u1) = (BigInt::zero(), BigInt::from(1));
                let (mut v0, mut v1) = (BigInt::from(2), BigInt::from(p));
                for n in 0..40u64 {
                    assert_eq!(lucas_u(&params, n), u0, "U p={p} q={q} n={n}");
                    assert_eq!(lucas_v(&params, n), v0, "V p={p} q={q} n={n}");
                    let u2 = &u1 * p - &u0 * q;
                    u0 = std::mem::replace(&mut u1, u2);
                    let v2 = &v1 * p - &v0 * q;
                    v0 = std::mem::replace(&mut v1, v2);
                }
            }
        }
    }

    #[test]
    fn lucas_uv_mod_match_exact() {
        use num_integer::Integer;
        for p in [-3i64, 0, 1, 2, 5] {
            for q in [-2i64, -1, 0, 1, 3] {
                let params = LucasParams::new(p, q);
                for n in 0..60u64 {
                    for m in [2u64, 7, 100, 99991] {
                        let m_big = BigInt::from(m);
                        let eu = lucas_u(&params, n).mod_floor(&m_big).to_u64().unwrap();
                        let ev = lucas_v(&params, n).mod_floor(&m_big).to_u64().unwrap();
                        assert_eq!(lucas_u_mod(&params, n as u128, m).unwrap(), eu);
                        assert_eq!(lucas_v_mod(&params, n as u128, m).unwrap(), ev);
                    }
                }
            }
        }
    }

    #[test]
    fn discriminant_cached() {
        assert_eq!(LucasParams::new(1, -1).discriminant(), 5);
        assert_eq!(LucasParams::new(3, 2).discriminant(), 1);
        assert_eq!(LucasParams::new(2, 1).discriminant(), 0);
    }

    #[test]
    fn spec_eval_examples() {
        let phi = SequenceSpec::five_fib_squared();
        // 5 * F_9 = 5 * 34
        assert_eq!(phi.eval(3).unwrap(), BigInt::from(170));
        assert_eq!(phi.eval_mod(5, 5).unwrap(), 0);
        let plain = SequenceSpec::fibonacci();
        for k in 1..20u64 {
            assert_eq!(plain.eval(k).unwrap(), fib(k));
        }
    }

    #[test]
    fn spec_eval_mod_never_materializes() {
        // index 4*10^12 is far past the exact limit but fine modularly
        let spec = SequenceSpec::parse("5*fib^2").unwrap();
        assert!(spec.eval(2_000_000).is_err());
        spec.eval_mod(2_000_000, 97).unwrap();
    }

    #[test]
    fn spec_index_overflow_is_loud() {
        let spec = SequenceSpec::new(SequenceBase::Fibonacci, 3, 1).unwrap();
        assert!(matches!(
            spec.index(u64::MAX),
            Err(Error::IndexOverflow { .. })
        ));
        assert_eq!(spec.index(0), Err(Error::ZeroArgument));
    }

    #[test]
    fn spec_grammar_round_trips() {
        for text in [
            "fib",
            "lucasV",
            "5*fib^2",
            "fib^3",
            "-7*lucasU:P=1,Q=2^2",
            "lucasU:P=3,Q=2",
            "lucasV:P=-5,Q=6",
            "0*lucasU:P=2,Q=1^2",
        ] {
            let spec = SequenceSpec::parse(text).unwrap();
            assert_eq!(spec.to_string(), text, "round trip of {text}");
        }
    }

    #[test]
    fn spec_grammar_rejects_malformed() {
        for text in ["", "fib^0", "fib extra", "lucasU", "lucasU:P=1", "3*", "^2"] {
            let err = SequenceSpec::parse(text).unwrap_err();
            assert!(
                matches!(err, Error::SpecParse { .. } | Error::ZeroPower),
                "{text} gave {err:?}"
            );
        }
    }

    #[test]
    fn addition_law_holds() {
        // F_{r+s} = F_r L_s + (-1)^{s+1} F_{r-s}
        let fibs: Vec<BigInt> = (0..=600u64).map(fib).collect();
        let lucs: Vec<BigInt> = (0..=300u64).map(lucas_companion).collect();
        for r in 1..=300usize {
            for s in 1..=r {
                let sign = if s % 2 == 0 { -1i64 } else { 1 };
                let rhs = &fibs[r] * &lucs[s] + &fibs[r - s] * sign;
                assert_eq!(fibs[r + s], rhs, "r={r}, s={s}");
            }
        }
    }
}
