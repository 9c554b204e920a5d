//! Decimal digits of π by three unrelated methods.
//!
//! [`chudnovsky`] is the bulk engine (binary splitting, quasi-linear in the
//! number of digits); [`machin`] and [`spigot`] are quadratic and only serve
//! to cross-check it.

use num_bigint::BigInt;
use num_traits::{One, Zero};

const GUARD_DIGITS: usize = 12;

/// Digits after the decimal point, `digits` of them.
fn truncate_scaled(pi_scaled: &BigInt, digits: usize) -> String {
    let s = pi_scaled.to_string();
    // leading "3", then digits + GUARD_DIGITS decimals
    s[1..1 + digits].to_string()
}

struct Split {
    p: BigInt,
    q: BigInt,
    t: BigInt,
}

const C3_OVER_24: u64 = 10_939_058_860_032_000;

fn split(a: u64, b: u64) -> Split {
    if b - a == 1 {
        let (p, q) = if a == 0 {
            (BigInt::one(), BigInt::one())
        } else {
            let p = BigInt::from(6 * a - 5) * BigInt::from(2 * a - 1) * BigInt::from(6 * a - 1);
            let q = BigInt::from(a) * BigInt::from(a) * BigInt::from(a) * BigInt::from(C3_OVER_24);
            (p, q)
        };
        let mut t = &p * BigInt::from(13_591_409u64 + 545_140_134u64 * a);
        if a % 2 == 1 {
            t = -t;
        }
        return Split { p, q, t };
    }
    let m = (a + b) / 2;
    let left = split(a, m);
    let right = split(m, b);
    Split {
        t: &right.q * left.t + &left.p * right.t,
        p: left.p * right.p,
        q: left.q * right.q,
    }
}

/// Integer square root by precision doubling: solve for the top half of the
/// bits first, then refine with one Newton step and a final correction.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(n.sign() != num_bigint::Sign::Minus, "isqrt of a negative number");
    let bits = n.bits();
    if bits <= 128 {
        return num_integer::Roots::sqrt(n);
    }
    // n = hi * 4^k with hi keeping the top bits
    let k = bits / 4;
    let hi = n >> (2 * k);
    let mut x: BigInt = (isqrt(&hi) + 1) << k;
    x = (&x + n / &x) >> 1;
    while &x * &x > *n {
        x -= 1;
    }
    while (&x + 1) * (&x + 1) <= *n {
        x += 1;
    }
    x
}

/// The first `digits` decimals of π (after the point).
pub fn chudnovsky(digits: usize) -> String {
    let total = digits + GUARD_DIGITS;
    let terms = (total as f64 / 14.181_647_462) as u64 + 2;
    let s = split(0, terms);
    let scale = BigInt::from(10u32).pow(total as u32);
    let root = isqrt(&(BigInt::from(10_005u32) * &scale * &scale));
    let pi = BigInt::from(426_880u32) * root * s.q / s.t;
    truncate_scaled(&pi, digits)
}

/// `scale · arctan(1/x)` by the alternating Taylor series.
fn arctan_inv(x: u64, scale: &BigInt) -> BigInt {
    let x2 = BigInt::from(x * x);
    let mut power = scale / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

/// π = 16·arctan(1/5) − 4·arctan(1/239).
pub fn machin(digits: usize) -> String {
    let total = digits + GUARD_DIGITS;
    let scale = BigInt::from(10u32).pow(total as u32);
    let pi = arctan_inv(5, &scale) * 16 - arctan_inv(239, &scale) * 4;
    truncate_scaled(&pi, digits)
}

/// Bounded mixed-radix spigot with delayed release of runs of nines.
pub fn spigot(digits: usize) -> String {
    let n = digits + GUARD_DIGITS + 1;
    let len = 10 * n / 3 + 1;
    let mut a = vec![2u64; len];
    let mut out = String::with_capacity(n + 1);
    let mut nines = 0usize;
    let mut predigit = 0u64;
    for j in 1..=n {
        let mut q = 0u64;
        for i in (1..=len).rev() {
            let x = 10 * a[i - 1] + q * i as u64;
            let m = 2 * i as u64 - 1;
            a[i - 1] = x % m;
            q = x / m;
        }
        a[0] = q % 10;
        q /= 10;
        if q == 9 {
            nines += 1;
        } else if q == 10 {
            out.push(char::from(b'0' + predigit as u8 + 1));
            out.push_str(&"0".repeat(nines));
            predigit = 0;
            nines = 0;
        } else {
            if j > 1 {
                out.push(char::from(b'0' + predigit as u8));
            }
            predigit = q;
            out.push_str(&"9".repeat(nines));
            nines = 0;
        }
    }
    out[1..=digits].to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_digits_agree() {
        for d in [1, 5, 10, 50] {
            let c = chudnovsky(d);
            assert_eq!(c, machin(d));
            assert_eq!(c, spigot(d));
        }
        assert_eq!(chudnovsky(5), "14159");
    }

    #[test]
    fn methods_agree_on_a_thousand_digits() {
        let c = chudnovsky(1000);
        assert_eq!(c, machin(1000));
        assert_eq!(c, spigot(1000));
    }

    #[test]
    fn bulk_engine_matches_arctan_further_out() {
        assert_eq!(chudnovsky(6000), machin(6000));
    }

    #[test]
    fn isqrt_is_exact() {
        let mut n = BigInt::from(7u32);
        for _ in 0..12 {
            n = &n * &n + 12345;
            let r = isqrt(&n);
            assert!(&r * &r <= n && (&r + 1) * (&r + 1) > n);
            let sq = &n * &n;
            assert_eq!(isqrt(&sq), n);
            assert_eq!(isqrt(&(&sq - 1)), &n - 1);
        }
    }
}
