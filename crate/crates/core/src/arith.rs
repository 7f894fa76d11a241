//! Exact integer foundations: divisors, the Möbius function, deterministic
//! 64-bit factorization, Legendre symbols, reduced rationals, and the
//! Möbius convolution engine used by every congruence scan.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::fmt;

use crate::error::{Error, Result};

/// A reduced fraction with arbitrary-precision parts.
///
/// Stored with `gcd(|numerator|, denominator) = 1` and `denominator >= 1`;
/// the constructor normalizes signs and reduces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactRational {
    numerator: BigInt,
    denominator: BigInt,
}

impl ExactRational {
    /// Builds the reduced fraction `numerator / denominator`.
    pub fn new(numerator: BigInt, denominator: BigInt) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let g = numerator.gcd(&denominator);
        let (mut n, mut d) = (numerator / &g, denominator / g);
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        Ok(ExactRational {
            numerator: n,
            denominator: d,
        })
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn is_integer(&self) -> bool {
        self.denominator == BigInt::from(1)
    }

    pub fn is_non_negative(&self) -> bool {
        !self.numerator.is_negative()
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl Serialize for ExactRational {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Reduces `numerator / denominator`, normalizing the denominator to be positive.
pub fn reduce_fraction(numerator: BigInt, denominator: BigInt) -> Result<ExactRational> {
    ExactRational::new(numerator, denominator)
}

/// Prime factorization of a 64-bit integer, entries ascending by prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    entries: Vec<(u64, u32)>,
}

impl Factorization {
    /// `(prime, exponent)` pairs in ascending prime order.
    pub fn entries(&self) -> &[(u64, u32)] {
        &self.entries
    }

    /// The factored integer, reassembled.
    pub fn value(&self) -> u64 {
        self.entries.iter().map(|&(p, e)| p.pow(e)).product::<u64>()
    }

    pub fn divisor_count(&self) -> u64 {
        self.entries.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    /// Distinct prime divisors.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(p, _)| p)
    }
}

/// Deterministic primality test for 64-bit integers.
///
/// Trial division by a handful of small primes, then Miller-Rabin with the
/// witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}, which decides
/// primality for every n < 3.3e24 and hence for all of u64.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &SMALL {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let r = d.trailing_zeros();
    let d = d >> r;
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub(crate) fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + m as u128 - b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Complete, deterministic prime factorization of `n` (requires `n >= 2`).
///
/// Trial division up to 10^6, then Miller-Rabin plus Brent's cycle-finding
/// variant of Pollard's rho with a fixed parameter schedule, so repeated runs
/// factor identically.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n < 2 {
        return Err(Error::FactorTooSmall(n));
    }
    let mut entries: Vec<(u64, u32)> = Vec::new();
    let mut rest = n;
    let push = |p: u64, e: u32, entries: &mut Vec<(u64, u32)>| {
        if let Some(last) = entries.iter_mut().find(|(q, _)| *q == p) {
            last.1 += e;
        } else {
            entries.push((p, e));
        }
    };
    for p in std::iter::once(2u64).chain((3u64..).step_by(2)) {
        if p > TRIAL_LIMIT || p * p > rest {
            break;
        }
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            push(p, e, &mut entries);
        }
    }
    if rest > 1 {
        if rest <= TRIAL_LIMIT * TRIAL_LIMIT || is_prime(rest) {
            // below the square of the trial bound any survivor is prime
            push(rest, 1, &mut entries);
        } else {
            let mut stack = vec![rest];
            while let Some(m) = stack.pop() {
                if is_prime(m) {
                    push(m, 1, &mut entries);
                    continue;
                }
                let d = pollard_brent(m);
                stack.push(d);
                stack.push(m / d);
            }
        }
    }
    entries.sort_unstable();
    Ok(Factorization { entries })
}

/// Finds a nontrivial factor of an odd composite with no factors <= 10^6.
/// Deterministic: sweeps the polynomial offset c = 1, 2, 3, ... in order.
fn pollard_brent(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime(n) && n % 2 == 1);
    for c in 1.. {
        let f = |x: u64| add_mod(mul_mod(x, x, n), c, n);
        let mut x = 2u64;
        let mut cycle = 2u64;
        loop {
            let saved = x;
            let mut product = 1u64;
            for _ in 0..cycle {
                x = f(x);
                product = mul_mod(product, saved.abs_diff(x), n);
            }
            let g = gcd_u64(product, n);
            if g == n {
                break; // collapsed; retry with the next c
            }
            if g > 1 {
                return g;
            }
            cycle *= 2;
            if cycle > n {
                break;
            }
        }
    }
    unreachable!("factor search sweeps all offsets");
}

pub(crate) fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// All divisors of `n`, ascending, including 1 and n.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    if n == 1 {
        return Ok(vec![1]);
    }
    let fac = factorize(n)?;
    let mut divs = vec![1u64];
    for &(p, e) in fac.entries() {
        let prev = divs.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            divs.extend(prev.iter().map(|d| d * pk));
        }
    }
    divs.sort_unstable();
    Ok(divs)
}

/// The Möbius function: 0 when a squared prime divides `n`, otherwise
/// (-1)^(number of distinct prime factors).
pub fn mobius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    if n == 1 {
        return Ok(1);
    }
    let fac = factorize(n)?;
    if fac.entries().iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if fac.entries().len() % 2 == 0 { 1 } else { -1 })
}

/// The Legendre symbol (a/p) for an odd prime p, by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> Result<i8> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let residue = (a as i128).rem_euclid(p as i128) as u64;
    let e = pow_mod(residue, (p - 1) / 2, p);
    Ok(match e {
        0 => 0,
        1 => 1,
        _ => -1, // for prime p the only remaining value is p - 1
    })
}

/// The Möbius convolution sum over the divisors of `n`, exactly:
/// sum of mu(n/d) * eval(d).
///
/// Only the terms with squarefree cofactor survive, so this enumerates
/// subsets of the distinct primes of n rather than all divisors; the
/// evaluator is queried lazily, once per surviving divisor.
pub fn mobius_convolve<F>(n: u64, mut eval: F) -> Result<BigInt>
where
    F: FnMut(u64) -> Result<BigInt>,
{
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    if n == 1 {
        return eval(1);
    }
    let primes: Vec<u64> = factorize(n)?.primes().collect();
    let mut acc = BigInt::zero();
    for subset in 0u32..(1 << primes.len()) {
        let mut cofactor = 1u64;
        for (i, &p) in primes.iter().enumerate() {
            if subset >> i & 1 == 1 {
                cofactor *= p;
            }
        }
        let term = eval(n / cofactor)?;
        if subset.count_ones() % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// The Möbius convolution sum reduced into {0, ..., modulus-1}.
///
/// The evaluator is queried in modular form and must return residues
/// already reduced modulo `modulus`.
pub fn mobius_convolve_mod<F>(n: u64, modulus: u64, mut eval: F) -> Result<u64>
where
    F: FnMut(u64) -> Result<u64>,
{
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    if modulus == 0 {
        return Err(Error::ZeroModulus);
    }
    if n == 1 {
        return Ok(eval(1)? % modulus);
    }
    let primes: Vec<u64> = factorize(n)?.primes().collect();
    let mut acc = 0u64;
    for subset in 0u32..(1 << primes.len()) {
        let mut cofactor = 1u64;
        for (i, &p) in primes.iter().enumerate() {
            if subset >> i & 1 == 1 {
                cofactor *= p;
            }
        }
        let term = eval(n / cofactor)? % modulus;
        if subset.count_ones() % 2 == 0 {
            acc = add_mod(acc, term, modulus);
        } else {
            acc = sub_mod(acc, term, modulus);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn mobius_small_values() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(12).unwrap(), 0);
        assert_eq!(mobius(30).unwrap(), -1);
        assert_eq!(mobius(0), Err(Error::ZeroArgument));
    }

    #[test]
    fn divisors_small_values() {
        assert_eq!(divisors(1).unwrap(), vec![1]);
        assert_eq!(divisors(7).unwrap(), vec![1, 7]);
        assert_eq!(divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(0), Err(Error::ZeroArgument));
    }

    #[test]
    fn factorize_small_and_large() {
        assert_eq!(factorize(360).unwrap().entries(), &[(2, 3), (3, 2), (5, 1)]);
        // 75025 = 5^2 * 3001, checked against trial division below
        assert_eq!(factorize(75025).unwrap().entries(), &[(5, 2), (3001, 1)]);
        // Mersenne prime 2^61 - 1
        let m61 = (1u64 << 61) - 1;
        assert_eq!(factorize(m61).unwrap().entries(), &[(m61, 1)]);
        assert_eq!(factorize(1), Err(Error::FactorTooSmall(1)));
    }

    #[test]
    fn factorize_agrees_with_trial_division() {
        for n in 2u64..2000 {
            let fac = factorize(n).unwrap();
            assert_eq!(fac.value(), n);
            let mut m = n;
            for &(p, e) in fac.entries() {
                assert!(is_prime(p), "claimed prime {p} fails primality");
                for _ in 0..e {
                    assert_eq!(m % p, 0);
                    m /= p;
                }
            }
            assert_eq!(m, 1);
        }
    }

    #[test]
    fn factorize_semiprime_beyond_trial_range() {
        // both factors exceed the 10^6 trial bound, forcing the rho path
        let (p, q) = (1_000_003u64, 1_000_033u64);
        assert!(is_prime(p) && is_prime(q));
        assert_eq!(factorize(p * q).unwrap().entries(), &[(p, 1), (q, 1)]);
    }

    #[test]
    fn primality_matches_sieve() {
        let mut sieve = vec![true; 10_000];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..10_000 {
            if sieve[i] {
                for j in (i * i..10_000).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for n in 0..10_000u64 {
            assert_eq!(is_prime(n), sieve[n as usize], "disagreement at {n}");
        }
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(5, 5).unwrap(), 0);
        assert_eq!(legendre(11, 5).unwrap(), 1);
        assert_eq!(legendre(3, 5).unwrap(), -1);
        assert_eq!(legendre(3, 2), Err(Error::NotOddPrime(2)));
        assert_eq!(legendre(3, 15), Err(Error::NotOddPrime(15)));
    }

    #[test]
    fn legendre_matches_square_enumeration() {
        for &p in &[3u64, 5, 7, 11, 13, 17] {
            let squares: std::collections::HashSet<u64> = (1..p).map(|x| x * x % p).collect();
            for a in 0..p as i64 {
                let expected = if a == 0 {
                    0
                } else if squares.contains(&(a as u64)) {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre(a, p).unwrap(), expected, "a={a}, p={p}");
            }
        }
    }

    #[test]
    fn convolve_hand_sums() {
        let fib = [0i64, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55];
        let conv = |n: u64| mobius_convolve(n, |d| Ok(BigInt::from(fib[d as usize]))).unwrap();
        // F_5 - F_1 = 4
        assert_eq!(conv(5), BigInt::from(4));
        // single divisor
        assert_eq!(conv(1), BigInt::from(1));
        let lucas = [2i64, 1, 3, 4, 7, 11, 18, 29, 47, 76, 123];
        let conv_l = |n: u64| mobius_convolve(n, |d| Ok(BigInt::from(lucas[d as usize]))).unwrap();
        // L_4 - L_2 = 4
        assert_eq!(conv_l(4), BigInt::from(4));
    }

    #[test]
    fn convolve_matches_naive_divisor_sum() {
        let eval = |d: u64| BigInt::from(d * d + 3);
        for n in 1u64..=200 {
            let fast = mobius_convolve(n, |d| Ok(eval(d))).unwrap();
            let mut naive = BigInt::zero();
            for d in divisors(n).unwrap() {
                naive += BigInt::from(mobius(n / d).unwrap()) * eval(d);
            }
            assert_eq!(fast, naive, "n={n}");
        }
    }

    #[test]
    fn convolve_mod_matches_exact() {
        use num_traits::ToPrimitive;
        let eval = |d: u64| BigInt::from(d) * d * d + 7;
        for n in 1u64..=120 {
            for m in [1u64, 2, 7, 97, 1_000_003] {
                let m_big = BigInt::from(m);
                let exact = mobius_convolve(n, |d| Ok(eval(d))).unwrap();
                let modular =
                    mobius_convolve_mod(n, m, |d| Ok(eval(d).mod_floor(&m_big).to_u64().unwrap()))
                        .unwrap();
                let reduced = exact.mod_floor(&m_big);
                assert_eq!(BigInt::from(modular), reduced, "n={n}, m={m}");
            }
        }
        assert_eq!(
            mobius_convolve_mod(4, 0, |_| Ok(0)),
            Err(Error::ZeroModulus)
        );
    }

    #[test]
    fn reduce_fraction_examples() {
        let r = reduce_fraction(BigInt::from(75024), BigInt::from(5)).unwrap();
        assert_eq!(r.to_string(), "75024/5");
        assert!(!r.is_integer());
        let r = reduce_fraction(BigInt::from(10), BigInt::from(5)).unwrap();
        assert_eq!(r.to_string(), "2/1");
        assert!(r.is_integer());
        let r = reduce_fraction(BigInt::from(-4), BigInt::from(-8)).unwrap();
        assert_eq!(r.to_string(), "1/2");
        assert!(r.is_non_negative());
        assert_eq!(
            reduce_fraction(BigInt::from(3), BigInt::zero()),
            Err(Error::ZeroDenominator)
        );
    }
}
