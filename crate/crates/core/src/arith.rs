//! Small rational-integer helpers: primality, factorization, Kronecker symbols.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

const TRIAL_LIMIT: u64 = 100_000;

/// Deterministic primality test for machine integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    // Miller-Rabin with the first twelve prime bases is exact below 3.3e24.
    let (d, s) = odd_part(n - 1);
    [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        .iter()
        .all(|&a| mr_round(n, a, d, s))
}

fn odd_part(mut d: u64) -> (u64, u32) {
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    (d, s)
}

fn mr_round(n: u64, a: u64, d: u64, s: u32) -> bool {
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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

/// All primes `<= bound` in increasing order.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &p)| p.then_some(k as u64))
        .collect()
}

/// Kronecker symbol `(a / n)` for `n >= 1`.
pub fn kronecker(a: i64, n: u64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut a = a as i128;
    let mut n = n as i128;
    let mut result = 1;
    while n % 2 == 0 {
        n /= 2;
        match a.rem_euclid(8) {
            0 | 2 | 4 | 6 => return 0,
            3 | 5 => result = -result,
            _ => {}
        }
    }
    // Jacobi symbol for odd n.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// `floor(sqrt(n))`.
pub fn isqrt(n: u64) -> u64 {
    n.sqrt()
}

/// Largest integer `a` with `a^2 <= 4n`, i.e. `floor(2 sqrt(n))`.
pub fn hasse_bound(norm: u64) -> i64 {
    isqrt(4 * norm) as i64
}

/// Prime factorization of a machine integer by trial division; `n >= 1`.
pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Distinct prime divisors of `|n|` in increasing order. Zero has none.
///
/// Trial division handles small factors; the cofactor is split with
/// Pollard-Brent and Miller-Rabin.
pub fn prime_divisors(n: &BigInt) -> Vec<BigUint> {
    let mut n = n.magnitude().clone();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let bp = BigUint::from(p);
        if (&n % &bp).is_zero() {
            out.push(bp.clone());
            while (&n % &bp).is_zero() {
                n /= &bp;
            }
        }
        if &bp * &bp > n {
            break;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigUint::one() {
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if is_probable_prime(&m) {
                out.push(m);
                continue;
            }
            let f = pollard_brent(&m);
            let other = &m / &f;
            stack.push(f);
            stack.push(other);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Miller-Rabin over a fixed base set; exact below 3.3e24 and overwhelmingly
/// reliable beyond.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'bases: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let one = BigUint::one();
    for c in 1u32.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = one.clone();
        let mut g = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..r.min(128) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += 128;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
    }
    unreachable!("pollard-brent exhausts u32 constants")
}

/// Converts to `BigInt` with the given sign convention (for magnitudes).
pub fn to_signed(n: BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, n)
}

/// Absolute value of a `BigInt` as a `u64`, if it fits.
pub fn abs_u64(n: &BigInt) -> Option<u64> {
    n.abs().to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_sieve() {
        let sieve = primes_up_to(10_000);
        let tested: Vec<u64> = (0..=10_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, tested);
        assert!(is_prime(44483));
        assert!(is_prime(44497));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2, 3, 5, 7
    }

    #[test]
    fn kronecker_small_table() {
        // Legendre symbols mod 5: squares are 1 and 4.
        let legendre: Vec<i32> = (0..5).map(|a| kronecker(a, 5)).collect();
        assert_eq!(legendre, vec![0, 1, -1, -1, 1]);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-19, 2), -1);
        assert_eq!(kronecker(-4, 2), 0);
    }

    #[test]
    fn factorization_recombines() {
        for n in [1u64, 2, 5184, 5499, 282_433_598_784, 999_983 * 1_000_003] {
            let f = factorize_u64(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            assert!(f.iter().all(|&(p, _)| is_prime(p)));
        }
    }

    #[test]
    fn prime_divisors_of_large_semiprime() {
        let p = BigInt::from(1_000_000_007u64);
        let q = BigInt::from(998_244_353u64);
        let n = &p * &q * BigInt::from(-12);
        let ds: Vec<String> = prime_divisors(&n).iter().map(|d| d.to_string()).collect();
        assert_eq!(ds, vec!["2", "3", "998244353", "1000000007"]);
        assert!(prime_divisors(&BigInt::zero()).is_empty());
    }

    #[test]
    fn hasse_bound_is_floor() {
        assert_eq!(hasse_bound(2), 2);
        assert_eq!(hasse_bound(5), 4);
        assert_eq!(hasse_bound(9), 6);
        assert_eq!(hasse_bound(49), 14);
    }
}
