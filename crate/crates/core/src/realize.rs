//! Realizability analysis: Dold-congruence scanning, orbit counts as exact
//! rationals, sign certificates, denominator-prime witnesses, congruence
//! checks, and the golden-mean enumeration oracle.
//!
//! A sequence (U_n) is realizable as a periodic-point count iff for all n the
//! convolution (mu*U)_n = sum_{d|n} mu(n/d) U_d is divisible by n and
//! non-negative; the orbit count O(n) = (mu*U)_n / n is then a non-negative
//! integer. Scans work modulo n so terms like F_{d^2} never have to be
//! materialized exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{
    factorize, is_prime, mobius_convolve, mobius_convolve_mod, mul_mod, ExactRational,
};
use crate::error::{Error, Result};
use crate::sequences::{fib, fib_mod, SequenceBase, SequenceSpec, DEFAULT_EXACT_INDEX_LIMIT};

/// One scanned index of a Dold-condition report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DoldRow {
    pub n: u64,
    /// (mu*U)_n reduced into {0, ..., n-1}.
    pub residue: u64,
    /// n / gcd(n, residue); equals 1 exactly when the row passes.
    pub denominator: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoldSummary {
    pub pass_count: u64,
    pub fail_count: u64,
    /// Sorted primes dividing at least one row denominator.
    pub denominator_primes: Vec<u64>,
}

/// Result of scanning the Dold condition for n = 1, ..., max_n.
#[derive(Debug, Clone, Serialize)]
pub struct DoldReport {
    pub spec: SequenceSpec,
    pub max_n: u64,
    pub rows: Vec<DoldRow>,
    pub summary: DoldSummary,
}

impl DoldReport {
    pub fn all_pass(&self) -> bool {
        self.summary.fail_count == 0
    }

    pub fn first_failure(&self) -> Option<&DoldRow> {
        self.rows.iter().find(|row| !row.pass)
    }
}

/// Tuning for `dold_scan_with`.
#[derive(Debug, Clone, Copy)]
pub struct DoldOptions {
    /// Rows with n at or below this bound are re-derived with exact
    /// arbitrary-precision arithmetic and must agree with the modular
    /// residue. Rows whose sampled indices exceed the exact index limit are
    /// skipped by the cross-check rather than failing it.
    pub exact_cross_check_bound: u64,
    /// Index ceiling for the exact side of the cross-check.
    pub exact_index_limit: u64,
}

impl Default for DoldOptions {
    fn default() -> Self {
        DoldOptions {
            exact_cross_check_bound: 50,
            exact_index_limit: DEFAULT_EXACT_INDEX_LIMIT,
        }
    }
}

fn dold_row(spec: &SequenceSpec, n: u64, opts: &DoldOptions) -> Result<DoldRow> {
    let residue = mobius_convolve_mod(n, n, |d| spec.eval_mod(d, n))?;
    if n <= opts.exact_cross_check_bound && spec.index(n)? <= opts.exact_index_limit as u128 {
        let exact = mobius_convolve(n, |d| spec.eval_with_limit(d, opts.exact_index_limit))?;
        let exact_residue = exact
            .mod_floor(&BigInt::from(n))
            .to_u64()
            .expect("residue < n");
        if exact_residue != residue {
            return Err(Error::CrossCheckMismatch {
                n,
                modular: residue,
                exact: exact_residue,
            });
        }
    }
    let denominator = n / n.gcd(&residue);
    Ok(DoldRow {
        n,
        residue,
        denominator,
        pass: residue == 0,
    })
}

fn summarize(rows: &[DoldRow]) -> Result<DoldSummary> {
    let pass_count = rows.iter().filter(|r| r.pass).count() as u64;
    let mut primes: Vec<u64> = Vec::new();
    for row in rows.iter().filter(|r| r.denominator > 1) {
        primes.extend(factorize(row.denominator)?.primes());
    }
    primes.sort_unstable();
    primes.dedup();
    Ok(DoldSummary {
        pass_count,
        fail_count: rows.len() as u64 - pass_count,
        denominator_primes: primes,
    })
}

/// Scans the Dold condition for n = 1, ..., max_n with default options.
///
/// Each row is computed modulo its own n, failing rows do not abort the scan
/// (the full denominator-prime set is part of the report), and rows are
/// independent, so the scan parallelizes over n with deterministic output.
pub fn dold_scan(spec: &SequenceSpec, max_n: u64) -> Result<DoldReport> {
    dold_scan_with(spec, max_n, &DoldOptions::default())
}

/// `dold_scan` with explicit cross-check tuning.
pub fn dold_scan_with(spec: &SequenceSpec, max_n: u64, opts: &DoldOptions) -> Result<DoldReport> {
    let rows: Vec<DoldRow> = (1..=max_n)
        .into_par_iter()
        .map(|n| dold_row(spec, n, opts))
        .collect::<Result<_>>()?;
    let summary = summarize(&rows)?;
    Ok(DoldReport {
        spec: spec.clone(),
        max_n,
        rows,
        summary,
    })
}

/// The number of closed orbits of length n: (1/n) sum_{d|n} mu(n/d) U_d,
/// as an exact reduced rational. Integer and non-negative iff the sequence
/// is realizable at this index.
pub fn orbit_count(spec: &SequenceSpec, n: u64) -> Result<ExactRational> {
    let conv = mobius_convolve(n, |d| spec.eval(d))?;
    ExactRational::new(conv, BigInt::from(n))
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitRow {
    pub n: u64,
    pub count: ExactRational,
    pub integral: bool,
    pub non_negative: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitSummary {
    /// True when every orbit count in the scanned range is a non-negative
    /// integer.
    pub realizable_prefix: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub spec: SequenceSpec,
    pub max_n: u64,
    pub rows: Vec<OrbitRow>,
    pub summary: OrbitSummary,
}

/// Exact orbit counts for n = 1, ..., max_n.
pub fn orbit_scan(spec: &SequenceSpec, max_n: u64) -> Result<OrbitReport> {
    let rows: Vec<OrbitRow> = (1..=max_n)
        .into_par_iter()
        .map(|n| {
            let count = orbit_count(spec, n)?;
            let integral = count.is_integer();
            let non_negative = count.is_non_negative();
            Ok(OrbitRow {
                n,
                count,
                integral,
                non_negative,
            })
        })
        .collect::<Result<_>>()?;
    let realizable_prefix = rows.iter().all(|r| r.integral && r.non_negative);
    Ok(OrbitReport {
        spec: spec.clone(),
        max_n,
        rows,
        summary: OrbitSummary { realizable_prefix },
    })
}

/// How a sign verdict was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignCertificate {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "growth-lemma")]
    GrowthLemma,
}

#[derive(Debug, Clone, Serialize)]
pub struct SignRow {
    pub n: u64,
    #[serde(serialize_with = "crate::serde_util::bigint_string")]
    pub value: BigInt,
    pub non_negative: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SignReport {
    pub spec: SequenceSpec,
    pub max_n: u64,
    pub certificate: SignCertificate,
    pub rows: Vec<SignRow>,
}

impl SignReport {
    pub fn all_non_negative(&self) -> bool {
        self.rows.iter().all(|r| r.non_negative)
    }
}

/// Exact sign check: (mu*U)_n computed with arbitrary-precision integers for
/// every n up to max_n.
pub fn sign_check_exact(spec: &SequenceSpec, max_n: u64) -> Result<SignReport> {
    let values: Vec<BigInt> = (1..=max_n).map(|n| spec.eval(n)).collect::<Result<_>>()?;
    let rows: Vec<SignRow> = (1..=max_n)
        .map(|n| {
            let value = mobius_convolve(n, |d| Ok(values[(d - 1) as usize].clone()))?;
            let non_negative = !value.is_negative();
            Ok(SignRow {
                n,
                value,
                non_negative,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SignReport {
        spec: spec.clone(),
        max_n,
        certificate: SignCertificate::Exact,
        rows,
    })
}

/// The hypothesis a growth certificate found violated first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthFailureKind {
    /// A_n < 0 at the reported index.
    NegativeValue,
    /// A_n > A_{n+1}; reported at the larger index.
    Decrease,
    /// A_{2n} < n * A_n at the reported n.
    Shortfall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GrowthFailure {
    pub n: u64,
    pub kind: GrowthFailureKind,
}

/// Pass/fail verdict of the growth hypotheses: A non-decreasing on
/// [1, 2 max_n] and A_{2n} >= n A_n for n <= max_n. A pass certifies
/// (mu*A)_n >= 0 on the checked range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GrowthOutcome {
    pub passed: bool,
    pub first_failure: Option<GrowthFailure>,
}

impl GrowthOutcome {
    fn pass() -> Self {
        GrowthOutcome {
            passed: true,
            first_failure: None,
        }
    }

    fn fail(n: u64, kind: GrowthFailureKind) -> Self {
        GrowthOutcome {
            passed: false,
            first_failure: Some(GrowthFailure { n, kind }),
        }
    }
}

/// Checks the growth hypotheses on exact values supplied by an evaluator
/// defined up to 2 max_n. Failures report the smallest offending n.
pub fn growth_certificate<F>(mut values: F, max_n: u64) -> Result<GrowthOutcome>
where
    F: FnMut(u64) -> Result<BigInt>,
{
    if max_n == 0 {
        return Err(Error::ZeroArgument);
    }
    let table: Vec<BigInt> = (1..=2 * max_n).map(&mut values).collect::<Result<_>>()?;
    let a = |n: u64| &table[(n - 1) as usize];
    if a(1).is_negative() {
        return Ok(GrowthOutcome::fail(1, GrowthFailureKind::NegativeValue));
    }
    for n in 1..=2 * max_n {
        if n < 2 * max_n && a(n) > a(n + 1) {
            return Ok(GrowthOutcome::fail(n + 1, GrowthFailureKind::Decrease));
        }
        if n <= max_n && a(2 * n) < &(a(n) * n) {
            return Ok(GrowthOutcome::fail(n, GrowthFailureKind::Shortfall));
        }
    }
    Ok(GrowthOutcome::pass())
}

/// Exact predicate F_k >= t, by walking the Fibonacci sequence until it
/// reaches t or the index runs out. At most ~94 steps since t fits in u64.
fn fib_at_least(k: u128, t: u64) -> bool {
    if t == 0 {
        return true;
    }
    if k == 0 {
        return false; // F_0 = 0 < t
    }
    let (mut value, mut next) = (1u128, 1u128); // (F_1, F_2)
    let mut idx = 1u128;
    while value < t as u128 && idx < k {
        let sum = value + next;
        value = next;
        next = sum;
        idx += 1;
    }
    value >= t as u128
}

/// Exact decision of F_a >= t * F_b for a >= b >= 1, without materializing
/// either side, via F_{b+g} = F_b F_{g+1} + F_{b-1} F_g:
/// F_g >= t forces yes, F_{g+2} < t forces no. Returns None in the narrow
/// indeterminate band, where the caller falls back to exact values.
fn fib_ge_scaled(a: u128, b: u128, t: u64) -> Option<bool> {
    debug_assert!(b >= 1);
    if a == b {
        return Some(t <= 1);
    }
    if a < b {
        return None;
    }
    let gap = a - b;
    if fib_at_least(gap, t) {
        Some(true)
    } else if !fib_at_least(gap + 2, t) {
        Some(false)
    } else {
        None
    }
}

/// Growth certificate for a Fibonacci-based spec (c F_{n^j} with c >= 0),
/// deciding the comparisons by exact index arithmetic instead of
/// materializing terms, so ranges like max_n = 10^4 (indices near 4x10^8)
/// stay cheap. Other bases fall back to the generic exact certificate.
pub fn growth_certificate_for_spec(spec: &SequenceSpec, max_n: u64) -> Result<GrowthOutcome> {
    if max_n == 0 {
        return Err(Error::ZeroArgument);
    }
    let fib_based = match spec.base() {
        SequenceBase::Fibonacci => true,
        SequenceBase::LucasU(params) => params.p() == 1 && params.q() == -1,
        _ => false,
    };
    if !fib_based {
        return growth_certificate(|n| spec.eval(n), max_n);
    }
    let c = spec.multiplier();
    if c < 0 {
        // A_1 = c * F_1 = c
        return Ok(GrowthOutcome::fail(1, GrowthFailureKind::NegativeValue));
    }
    if c == 0 {
        return Ok(GrowthOutcome::pass());
    }
    for n in 1..=2 * max_n {
        if n < 2 * max_n {
            // monotone: indices strictly increase and F is non-decreasing
            let below = spec.index(n)?;
            let above = spec.index(n + 1)?;
            if !fib_ge_scaled(above, below, 1).unwrap_or(false) {
                return Ok(GrowthOutcome::fail(n + 1, GrowthFailureKind::Decrease));
            }
        }
        if n <= max_n {
            let doubled = spec.index(2 * n)?;
            let single = spec.index(n)?;
            let ok = match fib_ge_scaled(doubled, single, n) {
                Some(v) => v,
                None => {
                    // indeterminate band: settle with exact values
                    if doubled > DEFAULT_EXACT_INDEX_LIMIT as u128 {
                        return Err(Error::CertificateInconclusive { n });
                    }
                    fib(doubled as u64) >= fib(single as u64) * n
                }
            };
            if !ok {
                return Ok(GrowthOutcome::fail(n, GrowthFailureKind::Shortfall));
            }
        }
    }
    Ok(GrowthOutcome::pass())
}

/// A prime p certified to divide the reduced denominator of the orbit count
/// of `spec` at index n.
#[derive(Debug, Clone, Serialize)]
pub struct DenominatorWitness {
    pub prime: u64,
    pub n: u64,
    /// (mu*U)_n mod n at the witnessing index.
    pub residue: u64,
    pub spec: SequenceSpec,
}

/// Scans odd primes p <= prime_bound with p = +-2 (mod 5) and emits a
/// witness for each one where the orbit-count denominator at index p is
/// exactly p. For F_{n^j} with odd j every candidate qualifies, since
/// F_{p^j} = F_p = -1 (mod p) for such primes; the returned set grows
/// without bound as the prime bound does.
pub fn denominator_prime_witnesses(
    spec: &SequenceSpec,
    prime_bound: u64,
) -> Result<Vec<DenominatorWitness>> {
    let candidates: Vec<u64> = (3..=prime_bound)
        .step_by(2)
        .filter(|&p| (p % 5 == 2 || p % 5 == 3) && is_prime(p))
        .collect();
    candidates
        .into_par_iter()
        .map(|p| {
            let residue = mobius_convolve_mod(p, p, |d| spec.eval_mod(d, p))?;
            Ok((p, residue))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&(_, residue)| residue != 0)
        .map(|(p, residue)| {
            Ok(DenominatorWitness {
                prime: p,
                n: p,
                residue,
                spec: spec.clone(),
            })
        })
        .collect()
}

/// Report wrapper for witness scans.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub spec: SequenceSpec,
    pub prime_bound: u64,
    pub witnesses: Vec<DenominatorWitness>,
    pub count: usize,
}

pub fn witness_report(spec: &SequenceSpec, prime_bound: u64) -> Result<WitnessReport> {
    let witnesses = denominator_prime_witnesses(spec, prime_bound)?;
    Ok(WitnessReport {
        spec: spec.clone(),
        prime_bound,
        count: witnesses.len(),
        witnesses,
    })
}

/// Checks 5 F_{n p^{2k}} = 5 F_{n p^{2(k-1)}} (mod p^k) by modular
/// evaluation of both sides; holds for every prime p, k >= 1, n >= 0.
pub fn five_fib_prime_power_congruence(p: u64, k: u32, n: u64) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Err(Error::ZeroArgument);
    }
    let modulus = p
        .checked_pow(k)
        .ok_or(Error::ValueOverflow("congruence modulus"))?;
    let hi = (p as u128)
        .checked_pow(2 * k)
        .and_then(|x| x.checked_mul(n as u128))
        .ok_or(Error::ValueOverflow("congruence index"))?;
    let lo = (p as u128).pow(2 * (k - 1)) * n as u128;
    let five = 5 % modulus;
    let lhs = mul_mod(five, fib_mod(hi, modulus)?, modulus);
    let rhs = mul_mod(five, fib_mod(lo, modulus)?, modulus);
    Ok(lhs == rhs)
}

/// Default ceiling for the golden-mean enumeration (2^25 words).
pub const GOLDEN_ENUMERATION_BOUND: u64 = 25;

/// The two independently computed fixed-point counts of the golden-mean
/// shift at word length n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GoldenMeanCount {
    pub n: u64,
    /// Cyclic binary words of length n with no two adjacent ones.
    pub enumeration: u64,
    /// Trace of [[1,1],[1,0]]^n.
    pub trace: u64,
}

/// Counts fixed points of the n-th power of the golden-mean shift two ways:
/// explicit enumeration over cyclic binary words, and the transfer-matrix
/// trace. Both equal the Lucas number L_n.
pub fn golden_mean_fix_count(n: u64) -> Result<GoldenMeanCount> {
    golden_mean_fix_count_bounded(n, GOLDEN_ENUMERATION_BOUND)
}

pub fn golden_mean_fix_count_bounded(n: u64, bound: u64) -> Result<GoldenMeanCount> {
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    if n > bound || bound > 62 {
        return Err(Error::EnumerationBound { n, bound });
    }
    let mask = (1u64 << n) - 1;
    let mut enumeration = 0u64;
    for word in 0..=mask {
        let rotated = ((word << 1) | (word >> (n - 1))) & mask;
        if word & rotated == 0 {
            enumeration += 1;
        }
    }
    // [[1,1],[1,0]]^n; 128-bit intermediates keep every enumerable n exact
    let (mut m, mut base) = ([1u128, 0, 0, 1], [1u128, 1, 1, 0]);
    let mut e = n;
    while e > 0 {
        let mul = |x: &[u128; 4], y: &[u128; 4]| {
            [
                x[0] * y[0] + x[1] * y[2],
                x[0] * y[1] + x[1] * y[3],
                x[2] * y[0] + x[3] * y[2],
                x[2] * y[1] + x[3] * y[3],
            ]
        };
        if e & 1 == 1 {
            m = mul(&m, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base);
        }
    }
    let trace = u64::try_from(m[0] + m[3]).map_err(|_| Error::ValueOverflow("matrix trace"))?;
    Ok(GoldenMeanCount {
        n,
        enumeration,
        trace,
    })
}

/// Rebuilds the fixed-point count from orbit counts: sum_{d|n} d * o_d.
/// Composed with `orbit_count` this inverts the Möbius transform.
pub fn orbits_to_fix<F>(mut orbits: F, n: u64) -> Result<BigInt>
where
    F: FnMut(u64) -> Result<BigInt>,
{
    let mut total = BigInt::zero();
    for d in crate::arith::divisors(n)? {
        total += orbits(d)? * d;
    }
    Ok(total)
}
