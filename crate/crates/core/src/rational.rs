//! Exact rational and integer helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, SvolError};

pub type Rational = BigRational;

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"n"`, `"n/d"`, `"-n/d"` or `"−n/d"` (U+2212 minus).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || SvolError::MalformedRational(text.to_string());
    let trimmed = text.trim();
    let (negative, body) = if let Some(rest) = trimmed.strip_prefix('−') {
        (true, rest)
    } else if let Some(rest) = trimmed.strip_prefix('-') {
        (true, rest)
    } else {
        (false, trimmed)
    };
    if body.is_empty() || body.starts_with(['-', '+']) {
        return Err(bad());
    }
    let value = match body.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() || n.is_negative() || d.is_negative() {
                return Err(bad());
            }
            Rational::new(n, d)
        }
        None => Rational::from_integer(body.parse().map_err(|_| bad())?),
    };
    Ok(if negative { -value } else { value })
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Deterministic primality by trial division; ring primes are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn pow(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Exponent of `p` in a nonzero integer.
pub fn int_valuation(x: &BigInt, p: u64) -> u32 {
    debug_assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// Nonnegative representative of `x mod m`.
pub fn modulo(x: &BigInt, m: &BigInt) -> BigInt {
    x.mod_floor(m)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Reduces a rational with denominator invertible modulo `m` into `[0, m)`.
pub fn reduce_mod(q: &Rational, m: &BigInt) -> Option<BigInt> {
    let inv = mod_inverse(q.denom(), m)?;
    Some((q.numer() * inv).mod_floor(m))
}

/// Prime factors of a nonzero integer, ascending, without multiplicity.
pub fn prime_factors(x: &BigInt) -> Vec<u64> {
    let mut x = x.abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    while BigInt::from(d) * BigInt::from(d) <= x {
        let bd = BigInt::from(d);
        if (&x % &bd).is_zero() {
            out.push(d);
            while (&x % &bd).is_zero() {
                x /= &bd;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if x > BigInt::one() {
        // desk-scale divisors stay far below u64::MAX
        out.push(u64::try_from(x).expect("prime factor exceeds u64"));
    }
    out
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    let k = k.min(n - k.min(n));
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
