//! Cross-module invariants tying the scanners, the exact arithmetic, and
//! the sequence evaluators together.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use fixcount_core::arith::{is_prime, legendre};
use fixcount_core::conjecture::{conjecture_check, CellStatus};
use fixcount_core::realize::{dold_scan, orbit_count};
use fixcount_core::sequences::{
    fib_mod, lucas_companion_mod, lucas_u, lucas_u_mod, lucas_v, lucas_v_mod, LucasParams,
    SequenceBase, SequenceSpec,
};

#[test]
fn conjecture_fibonacci_instance_matches_dold_rows() {
    // the (P,Q) = (1,-1) cell is the sequence 5 F_{n^2} in disguise
    assert_eq!(
        conjecture_check(&LucasParams::new(1, -1), 200).unwrap(),
        CellStatus::Pass
    );
    let as_cell = SequenceSpec::parse("5*lucasU:P=1,Q=-1^2").unwrap();
    let as_phi = SequenceSpec::parse("5*fib^2").unwrap();
    let left = dold_scan(&as_cell, 200).unwrap();
    let right = dold_scan(&as_phi, 200).unwrap();
    for (a, b) in left.rows.iter().zip(right.rows.iter()) {
        assert_eq!((a.n, a.residue, a.pass), (b.n, b.residue, b.pass));
    }
}

#[test]
fn unit_discriminant_family_passes_undilated() {
    // U_n(+-(2k+1), k^2+k) has discriminant 1 and satisfies the Dold
    // condition without any multiplier or time change
    for k in -3i64..=3 {
        for p in [2 * k + 1, -(2 * k + 1)] {
            let params = LucasParams::new(p, k * k + k);
            assert_eq!(params.discriminant(), 1, "k={k}, P={p}");
            let spec = SequenceSpec::new(SequenceBase::LucasU(params), 1, 1).unwrap();
            let report = dold_scan(&spec, 100).unwrap();
            assert!(
                report.all_pass(),
                "k={k}, P={p}: {:?}",
                report.first_failure()
            );
        }
    }
}

#[test]
fn companion_sequences_always_satisfy_dold() {
    // V_n(P,Q) needs no discriminant repair
    for p in -5i64..=5 {
        for q in -5i64..=5 {
            let spec =
                SequenceSpec::new(SequenceBase::LucasV(LucasParams::new(p, q)), 1, 1).unwrap();
            let report = dold_scan(&spec, 100).unwrap();
            assert!(
                report.all_pass(),
                "P={p}, Q={q}: {:?}",
                report.first_failure()
            );
        }
    }
}

#[test]
fn dold_denominator_equals_exact_orbit_denominator_to_100() {
    for text in ["fib", "fib^2", "5*fib^2"] {
        let spec = SequenceSpec::parse(text).unwrap();
        let report = dold_scan(&spec, 100).unwrap();
        for row in &report.rows {
            let exact = orbit_count(&spec, row.n).unwrap();
            assert_eq!(
                &BigInt::from(row.denominator),
                exact.denominator(),
                "spec={text}, n={}",
                row.n
            );
        }
    }
}

#[test]
fn fib_at_prime_indices_matches_legendre_symbol() {
    // F_p = (p/5) (mod p): the mechanism behind the denominator witnesses
    for p in (3u64..=1000).filter(|&p| is_prime(p)) {
        let symbol = legendre(p as i64, 5).unwrap();
        let expected = match symbol {
            1 => 1 % p,
            0 => 0,
            _ => p - 1,
        };
        assert_eq!(fib_mod(p as u128, p).unwrap(), expected, "p={p}");
    }
}

#[test]
fn lucas_companion_dold_congruence_at_primes_to_10000() {
    for p in (2u64..=10_000).filter(|&p| is_prime(p)) {
        assert_eq!(lucas_companion_mod(p as u128, p).unwrap(), 1 % p, "p={p}");
    }
}

#[test]
fn modular_exact_coherence_all_bases_to_1000() {
    let params = LucasParams::new(2, -3);
    let moduli = [2u64, 97, 1_000_003];
    let mut fib_exact = (BigInt::from(0), BigInt::from(1));
    let (mut u, mut v) = (
        (BigInt::from(0), BigInt::from(1)),
        (BigInt::from(2), BigInt::from(params.p())),
    );
    for n in 0..=1000u64 {
        for &m in &moduli {
            let m_big = BigInt::from(m);
            assert_eq!(
                fib_mod(n as u128, m).unwrap(),
                fib_exact.0.mod_floor(&m_big).to_u64().unwrap(),
                "fib n={n} m={m}"
            );
            assert_eq!(
                lucas_u_mod(&params, n as u128, m).unwrap(),
                u.0.mod_floor(&m_big).to_u64().unwrap(),
                "U n={n} m={m}"
            );
            assert_eq!(
                lucas_v_mod(&params, n as u128, m).unwrap(),
                v.0.mod_floor(&m_big).to_u64().unwrap(),
                "V n={n} m={m}"
            );
        }
        let next = &fib_exact.0 + &fib_exact.1;
        fib_exact.0 = std::mem::replace(&mut fib_exact.1, next);
        let next = &u.1 * params.p() - &u.0 * params.q();
        u.0 = std::mem::replace(&mut u.1, next);
        let next = &v.1 * params.p() - &v.0 * params.q();
        v.0 = std::mem::replace(&mut v.1, next);
    }
    // spot anchors against the closed forms U_4 = P^3 - 2PQ, V_2 = P^2 - 2Q
    let (p, q) = (BigInt::from(params.p()), BigInt::from(params.q()));
    assert_eq!(lucas_u(&params, 4), &p * &p * &p - &p * &q * 2);
    assert_eq!(lucas_v(&params, 2), &p * &p - &q * 2);
}
