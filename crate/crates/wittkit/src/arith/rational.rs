//! Arbitrary-precision rationals and the handful of number-theoretic
//! helpers on them that the rest of the crate leans on.

use super::ArithError;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number. `BigRational` keeps gcd(num, den) = 1 and den >= 1,
/// which is exactly the canonical form we need.
pub type Rat = BigRational;

/// Shorthand for small integer rationals.
pub fn rat_i64(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parse "num/den" (denominator omitted when 1). Whitespace is not accepted.
pub fn rat_from_str(s: &str) -> Result<Rat, ArithError> {
    let bad = || ArithError::BadRational(s.to_string());
    // Cap absurdly long literals so untrusted input cannot stall the parser.
    if s.is_empty() || s.len() > 100_000 {
        return Err(bad());
    }
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num: BigInt = num_str.parse().map_err(|_| bad())?;
    let den: BigInt = match den_str {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(num, den))
}

/// Render as "num/den", omitting "/1".
pub fn rat_to_string(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn int_valuation(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut m = n.abs();
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        m = q;
    }
}

/// p-adic valuation v_p(x) = v_p(num) - v_p(den) of a nonzero rational.
pub fn padic_valuation(x: &Rat, p: u64) -> Result<i64, ArithError> {
    if x.is_zero() {
        return Err(ArithError::ZeroInput);
    }
    if p < 2 || !super::is_prime_u64(p) {
        return Err(ArithError::NotOddPrime(p));
    }
    Ok(int_valuation(x.numer(), p) - int_valuation(x.denom(), p))
}

fn is_square_biguint(n: &BigUint) -> bool {
    let r = n.sqrt();
    &r.clone() * &r == *n
}

/// Whether x is a square in Q. Exact; no factorization involved.
pub fn is_square_rat(x: &Rat) -> bool {
    if x.is_negative() {
        return false;
    }
    if x.is_zero() {
        return true;
    }
    is_square_biguint(x.numer().magnitude()) && is_square_biguint(x.denom().magnitude())
}
