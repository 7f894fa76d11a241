//! Pisano periods: the period ℓ(m) of the Fibonacci sequence modulo m,
//! computed by direct iteration, by Wall-style divisor-bound search for
//! primes, by the p^s ℓ(p) ladder for prime powers, and by lcm composition
//! for general moduli. Includes the offset congruences of Fibonacci numbers
//! modulo prime powers and a validated on-disk period cache.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use crate::arith::{divisors, factorize, is_prime};
use crate::error::{Error, Result};
use crate::sequences::{fib_mod, fib_pair_mod};

/// How a period was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PeriodMethod {
    #[serde(rename = "brute-force")]
    BruteForce,
    #[serde(rename = "wall-guided")]
    WallGuided,
    #[serde(rename = "crt-combined")]
    CrtCombined,
}

impl fmt::Display for PeriodMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PeriodMethod::BruteForce => "brute-force",
            PeriodMethod::WallGuided => "wall-guided",
            PeriodMethod::CrtCombined => "crt-combined",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for PeriodMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute-force" => Ok(PeriodMethod::BruteForce),
            "wall-guided" => Ok(PeriodMethod::WallGuided),
            "crt-combined" => Ok(PeriodMethod::CrtCombined),
            other => Err(Error::Cache(format!("unknown period method `{other}`"))),
        }
    }
}

/// A modulus together with its Fibonacci period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PisanoRecord {
    pub modulus: u64,
    pub period: u64,
    pub method: PeriodMethod,
}

/// Period of a prime power p^n, expressed as p^s ℓ(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimePowerPeriod {
    pub prime: u64,
    pub exponent: u32,
    pub period: u64,
    /// Exponent with period = p^s ℓ(p); always 0 <= s < exponent.
    pub s: u32,
}

/// Tests whether d is a period of the Fibonacci sequence mod m, by the
/// pair-return criterion (F_{d+1}, F_{d+2}) = (1, 1): the pair recurrence is
/// invertible mod m, so the sequence is purely periodic and the shift by d
/// then propagates to every index.
fn is_period(d: u64, m: u64) -> Result<bool> {
    let (a, b) = fib_pair_mod(d as u128 + 1, m)?;
    Ok(a == 1 % m && b == 1 % m)
}

/// ℓ(m) by direct iteration of the pair (F_n, F_{n+1}) mod m until it
/// returns to (1, 1). Intended for m up to about 10^6.
pub fn pisano_bruteforce(m: u64) -> Result<PisanoRecord> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    if m == 1 {
        return Ok(PisanoRecord {
            modulus: 1,
            period: 1,
            method: PeriodMethod::BruteForce,
        });
    }
    let (mut a, mut b) = (1 % m, 1 % m);
    // ℓ(m) <= 6m, attained along m = 2 * 5^k
    let bound = 6u64.saturating_mul(m);
    for d in 1..=bound {
        let next = ((a as u128 + b as u128) % m as u128) as u64;
        a = b;
        b = next;
        if a == 1 % m && b == 1 % m {
            return Ok(PisanoRecord {
                modulus: m,
                period: d,
                method: PeriodMethod::BruteForce,
            });
        }
    }
    Err(Error::PeriodSearchExhausted(m))
}

/// The divisor bound searched by `pisano_prime`: p-1 when p = +-1 mod 10,
/// 2(p+1) when p = +-3 mod 10, and p(p^2-1) otherwise (p = 2 and p = 5;
/// ℓ(5) = 20 does not divide 5^2 - 1 = 24, but does divide 5(5^2 - 1)).
pub fn wall_search_bound(p: u64) -> u64 {
    match p % 10 {
        1 | 9 => p - 1,
        3 | 7 => 2 * (p + 1),
        _ => p * (p * p - 1),
    }
}

/// ℓ(p) for a prime p, found as the smallest divisor d of the Wall search
/// bound with (F_{d+1}, F_{d+2}) = (1, 1) mod p.
///
/// Every d satisfying the pair-return criterion is a multiple of the true
/// period, so once the period divides the bound the smallest qualifying
/// divisor is minimal, not merely a period multiple.
pub fn pisano_prime(p: u64) -> Result<PisanoRecord> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    for d in divisors(wall_search_bound(p))? {
        if is_period(d, p)? {
            return Ok(PisanoRecord {
                modulus: p,
                period: d,
                method: PeriodMethod::WallGuided,
            });
        }
    }
    Err(Error::PeriodSearchExhausted(p))
}

/// ℓ(p^n) together with the exponent s such that ℓ(p^n) = p^s ℓ(p),
/// found by trying s = 0, 1, ... in order against the pair-return criterion.
pub fn pisano_prime_power(p: u64, exponent: u32) -> Result<PrimePowerPeriod> {
    if exponent == 0 {
        return Err(Error::ZeroArgument);
    }
    let modulus = p
        .checked_pow(exponent)
        .ok_or(Error::ValueOverflow("prime power modulus"))?;
    let base = pisano_prime(p)?.period;
    for s in 0..exponent {
        let candidate = p
            .checked_pow(s)
            .and_then(|ps| ps.checked_mul(base))
            .ok_or(Error::ValueOverflow("prime power period"))?;
        if is_period(candidate, modulus)? {
            return Ok(PrimePowerPeriod {
                prime: p,
                exponent,
                period: candidate,
                s,
            });
        }
    }
    Err(Error::PeriodSearchExhausted(modulus))
}

/// As `pisano_prime_power`, but additionally confirms minimality against the
/// brute-force iteration (so p^n must be within brute-force range).
pub fn pisano_prime_power_verified(p: u64, exponent: u32) -> Result<PrimePowerPeriod> {
    let result = pisano_prime_power(p, exponent)?;
    let modulus = p.pow(exponent);
    let brute = pisano_bruteforce(modulus)?;
    if brute.period != result.period {
        return Err(Error::CrossCheckMismatch {
            n: modulus,
            modular: result.period,
            exact: brute.period,
        });
    }
    Ok(result)
}

/// The largest t <= max_exponent with ℓ(p^t) = ℓ(p), computed rather than
/// assumed: no prime with ℓ(p^2) = ℓ(p) is known, but none is disproven.
pub fn wall_exponent_t(p: u64, max_exponent: u32) -> Result<u32> {
    let base = pisano_prime(p)?.period;
    let mut t = 1;
    for e in 2..=max_exponent {
        if p.checked_pow(e).is_none() {
            break;
        }
        if pisano_prime_power(p, e)?.period == base {
            t = e;
        } else {
            break;
        }
    }
    Ok(t)
}

/// ℓ(m) for arbitrary m >= 1: prime-power periods combined by least common
/// multiple. Cross-validated against brute force in the test suite.
pub fn pisano_general(m: u64) -> Result<PisanoRecord> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    if m == 1 {
        return Ok(PisanoRecord {
            modulus: 1,
            period: 1,
            method: PeriodMethod::CrtCombined,
        });
    }
    let fac = factorize(m)?;
    let mut period = 1u64;
    for &(p, e) in fac.entries() {
        let pp = pisano_prime_power(p, e)?.period;
        period = num_integer::lcm(period, pp);
    }
    let method = if fac.entries().len() == 1 {
        PeriodMethod::WallGuided
    } else {
        PeriodMethod::CrtCombined
    };
    Ok(PisanoRecord {
        modulus: m,
        period,
        method,
    })
}

/// Checks F_{p^{2k}+c} = F_{p^{2(k-1)}+c} (mod p^k); holds for every
/// prime p, integer k >= 2, and offset c >= 0.
pub fn offset_congruence_holds(p: u64, k: u32, c: u64) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Err(Error::ZeroArgument);
    }
    let modulus = p
        .checked_pow(k)
        .ok_or(Error::ValueOverflow("offset congruence modulus"))?;
    let hi = (p as u128)
        .checked_pow(2 * k)
        .and_then(|x| x.checked_add(c as u128))
        .ok_or(Error::ValueOverflow("offset congruence index"))?;
    let lo = (p as u128).pow(2 * (k - 1)) + c as u128;
    Ok(fib_mod(hi, modulus)? == fib_mod(lo, modulus)?)
}

/// Checks the strengthened power-of-two form
/// F_{2^{2k}+c} = F_{2^{2(k-1)}+c} (mod 2^{k+1}); holds for every k >= 3.
pub fn two_power_offset_holds(k: u32, c: u64) -> Result<bool> {
    if k == 0 {
        return Err(Error::ZeroArgument);
    }
    let modulus = 1u64
        .checked_shl(k + 1)
        .filter(|&m| m != 0)
        .ok_or(Error::ValueOverflow("two-power modulus"))?;
    let hi = (1u128 << (2 * k)) + c as u128;
    let lo = (1u128 << (2 * (k - 1))) + c as u128;
    Ok(fib_mod(hi, modulus)? == fib_mod(lo, modulus)?)
}

/// One divisibility or consistency rule checked by `verify_wall`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WallRule {
    /// Wall-guided search must agree with brute-force iteration.
    BruteforceMatch,
    /// ℓ(p) divides p - 1 when p = +-1 (mod 10).
    DividesPMinus1,
    /// ℓ(p) divides 2(p + 1) when p = +-3 (mod 10).
    Divides2PPlus1,
    /// ℓ(p) divides p^2 - 1.
    DividesP2Minus1,
    /// ℓ(p^d) <= ℓ(p^{d+1}).
    MonotonePowers,
    /// ℓ(p^n) divides p^n (p^2 - 1).
    DividesPowerP2Minus1,
    /// ℓ(p^n) = p^s ℓ(p) with 0 <= s < n.
    ExponentRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WallViolation {
    pub prime: u64,
    pub exponent: u32,
    pub rule: WallRule,
    pub period: u64,
    /// The quantity the period was checked against (divisor bound, the
    /// brute-force period, or the next period up the power ladder).
    pub reference: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WallReport {
    pub max_p: u64,
    pub power_modulus_limit: u64,
    pub checked_primes: u64,
    pub checked_prime_powers: u64,
    pub violations: Vec<WallViolation>,
}

/// Verifies the Wall-style period facts for every prime p <= max_p:
/// guided search against brute force, the applicable divisor bounds on
/// ℓ(p), and the power-ladder facts for every p^n <= power_modulus_limit.
/// Violations are reported, not treated as errors; a finding here is a
/// result in its own right.
pub fn verify_wall(max_p: u64, power_modulus_limit: u64) -> Result<WallReport> {
    use rayon::prelude::*;
    let primes: Vec<u64> = (2..=max_p).filter(|&p| is_prime(p)).collect();
    let per_prime: Vec<(u64, Vec<WallViolation>)> = primes
        .par_iter()
        .map(|&p| -> Result<(u64, Vec<WallViolation>)> {
            let mut violations = Vec::new();
            let guided = pisano_prime(p)?.period;
            let brute = pisano_bruteforce(p)?.period;
            let mut violate = |exponent: u32, rule: WallRule, period: u64, reference: u64| {
                violations.push(WallViolation {
                    prime: p,
                    exponent,
                    rule,
                    period,
                    reference,
                });
            };
            if guided != brute {
                violate(1, WallRule::BruteforceMatch, guided, brute);
            }
            match p % 10 {
                1 | 9 => {
                    if (p - 1) % guided != 0 {
                        violate(1, WallRule::DividesPMinus1, guided, p - 1);
                    }
                }
                3 | 7 => {
                    if (2 * (p + 1)) % guided != 0 {
                        violate(1, WallRule::Divides2PPlus1, guided, 2 * (p + 1));
                    }
                }
                _ => {}
            }
            if (p * p - 1) % guided != 0 {
                violate(1, WallRule::DividesP2Minus1, guided, p * p - 1);
            }
            let mut powers = 0u64;
            let mut previous = guided;
            for e in 2.. {
                let modulus = match p.checked_pow(e) {
                    Some(m) if m <= power_modulus_limit => m,
                    _ => break,
                };
                let record = pisano_prime_power(p, e)?;
                powers += 1;
                if record.period < previous {
                    violate(e, WallRule::MonotonePowers, record.period, previous);
                }
                let product = modulus as u128 * (p as u128 * p as u128 - 1);
                if product % record.period as u128 != 0 {
                    violate(e, WallRule::DividesPowerP2Minus1, record.period, modulus);
                }
                if record.s >= e {
                    violate(e, WallRule::ExponentRange, record.period, record.s as u64);
                }
                previous = record.period;
            }
            Ok((powers, violations))
        })
        .collect::<Result<_>>()?;
    let mut violations = Vec::new();
    let mut checked_prime_powers = 0;
    for (powers, mut v) in per_prime {
        checked_prime_powers += powers;
        violations.append(&mut v);
    }
    Ok(WallReport {
        max_p,
        power_modulus_limit,
        checked_primes: primes.len() as u64,
        checked_prime_powers,
        violations,
    })
}

/// Largest modulus the cache loader will brute-force when spot-checking.
const CACHE_SPOT_CHECK_LIMIT: u64 = 1_000_000;

/// An on-disk period cache: text lines `modulus<TAB>period<TAB>method`,
/// sorted by modulus, no duplicates.
#[derive(Debug, Clone, Default)]
pub struct PeriodCache {
    entries: BTreeMap<u64, (u64, PeriodMethod)>,
}

impl PeriodCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, modulus: u64) -> Option<PisanoRecord> {
        self.entries
            .get(&modulus)
            .map(|&(period, method)| PisanoRecord {
                modulus,
                period,
                method,
            })
    }

    pub fn insert(&mut self, record: PisanoRecord) {
        self.entries
            .insert(record.modulus, (record.period, record.method));
    }

    /// Loads and validates a cache file: enforces the sorted no-duplicate
    /// line format and spot-checks 1% of the entries (every hundredth, and
    /// always the first) against brute-force iteration.
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Cache(format!("open {}: {e}", path.display())))?;
        let reader = std::io::BufReader::new(file);
        let mut entries = BTreeMap::new();
        let mut last_modulus = 0u64;
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Cache(format!("read line {}: {e}", idx + 1)))?;
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split('\t');
            let (Some(m_field), Some(p_field), Some(method_field), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::Cache(format!(
                    "line {}: expected `modulus<TAB>period<TAB>method`",
                    idx + 1
                )));
            };
            let modulus: u64 = m_field
                .parse()
                .map_err(|e| Error::Cache(format!("line {}: modulus: {e}", idx + 1)))?;
            let period: u64 = p_field
                .parse()
                .map_err(|e| Error::Cache(format!("line {}: period: {e}", idx + 1)))?;
            let method: PeriodMethod = method_field.parse()?;
            if modulus <= last_modulus {
                return Err(Error::Cache(format!(
                    "line {}: moduli must be strictly increasing",
                    idx + 1
                )));
            }
            last_modulus = modulus;
            entries.insert(modulus, (period, method));
        }
        let cache = PeriodCache { entries };
        cache.spot_check()?;
        Ok(cache)
    }

    fn spot_check(&self) -> Result<()> {
        for (i, (&modulus, &(period, _))) in self.entries.iter().enumerate() {
            if i % 100 != 0 || modulus > CACHE_SPOT_CHECK_LIMIT {
                continue;
            }
            let brute = pisano_bruteforce(modulus)?;
            if brute.period != period {
                return Err(Error::Cache(format!(
                    "entry for modulus {modulus} claims period {period}, brute force gives {}",
                    brute.period
                )));
            }
        }
        Ok(())
    }

    /// Writes the cache in its canonical sorted line format.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)
            .map_err(|e| Error::Cache(format!("create {}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        for (&modulus, &(period, method)) in &self.entries {
            writeln!(w, "{modulus}\t{period}\t{method}")
                .map_err(|e| Error::Cache(format!("write: {e}")))?;
        }
        w.flush().map_err(|e| Error::Cache(format!("flush: {e}")))?;
        Ok(())
    }
}
