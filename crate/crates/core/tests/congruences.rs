//! Exhaustive medium-scale congruence suites for the Fibonacci and Lucas
//! families. The acceptance suite reruns these at their full stated ranges;
//! here the ranges are trimmed for routine test runs.

use fixcount_core::arith::is_prime;
use fixcount_core::pisano::{offset_congruence_holds, two_power_offset_holds};
use fixcount_core::realize::five_fib_prime_power_congruence;
use fixcount_core::sequences::fib_mod;

fn primes_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&p| is_prime(p)).collect()
}

#[test]
fn fib_index_multiplication_mod_p() {
    // F_{np} = F_n F_p (mod p)
    for p in primes_to(60) {
        for n in 0..=120u64 {
            let lhs = fib_mod((n * p) as u128, p).unwrap();
            let rhs = fib_mod(n as u128, p).unwrap() * fib_mod(p as u128, p).unwrap() % p;
            assert_eq!(lhs, rhs, "p={p}, n={n}");
        }
    }
}

#[test]
fn five_fib_square_shift_mod_p() {
    // 5 F_{n p^2} = 5 F_n (mod p), including the ramified prime p = 5
    for p in primes_to(60) {
        for n in 0..=120u64 {
            let idx = n as u128 * (p as u128 * p as u128);
            let lhs = 5 * fib_mod(idx, p).unwrap() % p;
            let rhs = 5 * fib_mod(n as u128, p).unwrap() % p;
            assert_eq!(lhs, rhs, "p={p}, n={n}");
        }
    }
}

#[test]
fn five_fib_prime_power_congruence_grid() {
    for p in primes_to(20) {
        for k in 1..=3u32 {
            for n in 0..=20u64 {
                assert!(
                    five_fib_prime_power_congruence(p, k, n).unwrap(),
                    "p={p}, k={k}, n={n}"
                );
            }
        }
    }
}

#[test]
fn offset_congruence_grid() {
    for p in [2u64, 3, 5, 7] {
        for k in 2..=3u32 {
            for c in 0..=50u64 {
                assert!(
                    offset_congruence_holds(p, k, c).unwrap(),
                    "p={p} k={k} c={c}"
                );
            }
        }
    }
}

#[test]
fn two_power_offset_grid() {
    for k in 3..=5u32 {
        for c in 0..=50u64 {
            assert!(two_power_offset_holds(k, c).unwrap(), "k={k} c={c}");
        }
    }
}
