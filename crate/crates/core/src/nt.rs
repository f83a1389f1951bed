//! Small number-theory helpers on machine integers.
//!
//! Everything here operates on orders of roots of unity and index sets of
//! Galois groups, all desk-scale; no big-integer arithmetic is needed.

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn euler_phi(n: usize) -> usize {
    assert!(n >= 1);
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Residues k in 1..=n with gcd(k, n) = 1, ascending. For n = 1 this is {1},
/// the identity acting trivially.
pub fn units_mod(n: usize) -> Vec<usize> {
    if n == 1 {
        return vec![1];
    }
    (1..=n).filter(|&k| gcd(k, n) == 1).collect()
}

/// Divisors of n, ascending.
pub fn divisors(n: usize) -> Vec<usize> {
    let mut ds: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
    ds.sort_unstable();
    ds
}

/// Prime factorization as (prime, exponent) pairs, ascending primes.
pub fn factorize(mut n: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
