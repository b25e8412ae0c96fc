//! Integer factorization: trial division up to a bound, deterministic
//! Miller-Rabin primality, and a Brent-cycle Pollard rho fallback with a
//! fixed iteration budget. Incomplete factorization is a hard error.

use super::ArithError;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default trial-division bound used when callers do not supply one.
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

/// Signed prime factorization: sign * prod p_i^e_i with primes strictly
/// increasing and every e_i >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    pub factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    /// Multiply the factorization back out.
    pub fn reconstruct(&self) -> BigInt {
        let mut acc = BigUint::one();
        for (p, e) in &self.factors {
            acc *= p.pow(*e);
        }
        let n = BigInt::from(acc);
        if self.sign < 0 {
            -n
        } else {
            n
        }
    }

    pub fn odd_exponent_primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors
            .iter()
            .filter(|(_, e)| e % 2 == 1)
            .map(|(p, _)| p)
    }
}

fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    // m < 2^64 so the product of two reduced residues fits in u128.
    (a * b) % m
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b: u128 = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u128(acc, b, m128);
        }
        b = mul_mod_u128(b, b, m128);
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Deterministic Miller-Rabin for u64 (the standard 12-witness set is exact
/// for all inputs below 3.3 * 10^24, in particular for every u64).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u128(x as u128, x as u128, n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn big_pow_mod(a: &BigUint, e: &BigUint, m: &BigUint) -> BigUint {
    a.modpow(e, m)
}

/// Miller-Rabin with the fixed witness set. Exact below 3.3 * 10^24 and a
/// deterministic strong pseudoprime test beyond; inputs here are desk scale.
fn is_prime_big(n: &BigUint) -> bool {
    if let Some(n64) = n.to_u64() {
        return is_prime_u64(n64);
    }
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigUint::from(a);
        let mut x = big_pow_mod(&a, &d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = big_pow_mod(&x, &two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent-variant Pollard rho with fixed deterministic parameters. Returns a
/// nontrivial factor of odd composite n, or None when the budget runs out.
fn pollard_rho(n: &BigUint, budget: u64) -> Option<BigUint> {
    let one = BigUint::one();
    for c in 1u64..20 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = one.clone();
        let mut steps = 0u64;
        while d.is_one() {
            if steps > budget {
                break;
            }
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break; // cycle for this c, try the next one
            }
            d = diff.gcd(n);
            steps += 1;
        }
        if !d.is_one() && &d != n {
            return Some(d);
        }
    }
    None
}

fn push_factor(acc: &mut Vec<(BigUint, u32)>, p: BigUint, e: u32) {
    acc.push((p, e));
}

/// Complete prime factorization of n != 0, or an error naming the cofactor
/// that could not be split within the deterministic budget.
pub fn factorize(n: &BigInt, bound: u64) -> Result<Factorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroInput);
    }
    let sign: i8 = if n.is_negative() { -1 } else { 1 };
    let mut m = n.magnitude().clone();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();

    // Trial division by 2, 3, then 6k +/- 1 up to the bound.
    let try_divide = |m: &mut BigUint, d: u64, factors: &mut Vec<(BigUint, u32)>| {
        let db = BigUint::from(d);
        let mut e = 0u32;
        loop {
            let (q, r) = m.div_rem(&db);
            if !r.is_zero() {
                break;
            }
            *m = q;
            e += 1;
        }
        if e > 0 {
            push_factor(factors, db, e);
        }
    };
    try_divide(&mut m, 2, &mut factors);
    try_divide(&mut m, 3, &mut factors);
    let mut d = 5u64;
    while d <= bound && BigUint::from(d) * BigUint::from(d) <= m {
        try_divide(&mut m, d, &mut factors);
        try_divide(&mut m, d + 2, &mut factors);
        d += 6;
    }
    if let Some(small) = m.to_u64() {
        if small > 1 && small <= bound.saturating_mul(bound) {
            // Remaining cofactor below bound^2 with no divisor <= bound is prime.
            push_factor(&mut factors, m.clone(), 1);
            m = BigUint::one();
        }
    }

    // Recursive rho splitting of what is left.
    let mut stack = Vec::new();
    if !m.is_one() {
        stack.push(m);
    }
    while let Some(c) = stack.pop() {
        if is_prime_big(&c) {
            push_factor(&mut factors, c, 1);
            continue;
        }
        match pollard_rho(&c, 2_000_000) {
            Some(f) => {
                let q = &c / &f;
                stack.push(f);
                stack.push(q);
            }
            None => {
                return Err(ArithError::IncompleteFactorization {
                    cofactor: c.to_string(),
                })
            }
        }
    }

    // Merge repeated primes and sort.
    factors.sort();
    let mut merged: Vec<(BigUint, u32)> = Vec::new();
    for (p, e) in factors {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    Ok(Factorization {
        sign,
        factors: merged,
    })
}
