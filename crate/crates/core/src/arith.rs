//! Small exact integer helpers shared across the crate.

use num_integer::Integer;

/// p-adic valuation of a nonzero integer. Returns `None` for zero.
pub fn valuation(n: i128, p: i128) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut n = n.abs();
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Some(v)
}

/// Valuation of `n` capped at `cap`; zero has valuation `cap`.
pub fn valuation_capped(n: i128, p: i128, cap: u32) -> u32 {
    match valuation(n, p) {
        Some(v) => v.min(cap),
        None => cap,
    }
}

pub fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    a.gcd(&b).gcd(&c)
}

/// Largest `r` with `r * r <= n`.
pub fn isqrt(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn primes_up_to(bound: i64) -> Vec<i64> {
    (2..=bound).filter(|&n| is_prime(n)).collect()
}

/// Distinct prime divisors of `|n|`, ascending. Empty for 0 and ±1.
pub fn prime_divisors(n: i64) -> Vec<i64> {
    let mut n = n.unsigned_abs();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d as i64);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n as i64);
    }
    out
}

pub fn mod_pow(mut base: i128, mut exp: u64, m: i128) -> i128 {
    let mut acc = 1i128;
    base = base.rem_euclid(m);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo a prime `p`; `a` must be a unit.
pub fn inv_mod_prime(a: i128, p: i128) -> i128 {
    mod_pow(a, (p - 2) as u64, p)
}

/// Inverse of `a` modulo `m` when `gcd(a, m) = 1`.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

/// Exact determinant of a small integer matrix by fraction-free elimination (Bareiss).
pub fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(3, 32), Some(11));
        assert_eq!(inv_mod(-1, 27), Some(26));
        assert_eq!(inv_mod(6, 27), None);
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(48, 2), Some(4));
        assert_eq!(valuation(-45, 3), Some(2));
        assert_eq!(valuation(0, 5), None);
        assert_eq!(valuation_capped(0, 2, 7), 7);
        assert_eq!(valuation_capped(64, 2, 3), 3);
    }

    #[test]
    fn sqrt_and_primes() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
        assert_eq!(isqrt(1 << 60), 1 << 30);
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(prime_divisors(-360), vec![2, 3, 5]);
        assert_eq!(prime_divisors(1), Vec::<i64>::new());
    }

    #[test]
    fn determinants() {
        assert_eq!(det(&[vec![2, 1], vec![1, 3]]), 5);
        let k = vec![vec![2, 1, 0], vec![1, 2, 1], vec![0, 1, 3]];
        assert_eq!(det(&k), 7);
        assert_eq!(det(&[vec![0, 1], vec![1, 0]]), -1);
    }
}
