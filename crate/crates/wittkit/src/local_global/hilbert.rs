//! Hilbert symbols (x, y)_v over the completions of Q, by the standard
//! prime-decomposition formulas, and local squareness tests.

use super::LocalError;
use crate::arith::{is_prime_u64, padic_valuation, PrimeField, Rat, Ring};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// A place of Q: the real place or a finite prime (2 allowed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlaceQ {
    Real,
    Finite(u64),
}

impl PlaceQ {
    pub fn finite(p: u64) -> Result<Self, LocalError> {
        if is_prime_u64(p) {
            Ok(PlaceQ::Finite(p))
        } else {
            Err(LocalError::NotPrime(p))
        }
    }
}

impl std::fmt::Display for PlaceQ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlaceQ::Real => write!(f, "real"),
            PlaceQ::Finite(p) => write!(f, "{p}"),
        }
    }
}

fn int_mod_u64(n: &BigInt, m: u64) -> u64 {
    use num_traits::ToPrimitive;
    n.mod_floor(&BigInt::from(m)).to_u64().expect("< m")
}

/// p-unit part of x reduced mod p (odd p): (x / p^v) mod p.
fn unit_part_mod_p(x: &Rat, p: u64) -> u64 {
    let strip = |n: &BigInt| -> BigInt {
        let p = BigInt::from(p);
        let mut m = n.clone();
        loop {
            let (q, r) = m.div_rem(&p);
            if !r.is_zero() {
                return m;
            }
            m = q;
        }
    };
    let num = strip(x.numer());
    let den = strip(x.denom());
    let f = PrimeField::new(p);
    let inv = f
        .inverse(&int_mod_u64(&den, p))
        .expect("stripped denominator is a p-unit");
    f.mul(&int_mod_u64(&num, p), &inv)
}

/// Odd part of x reduced mod 8.
fn odd_part_mod_8(x: &Rat) -> u64 {
    let strip = |n: &BigInt| -> BigInt {
        let two = BigInt::from(2);
        let mut m = n.clone();
        loop {
            let (q, r) = m.div_rem(&two);
            if !r.is_zero() {
                return m;
            }
            m = q;
        }
    };
    let num = int_mod_u64(&strip(x.numer()), 8);
    let den = int_mod_u64(&strip(x.denom()), 8);
    // d^2 = 1 mod 8 for odd d, so the inverse of d mod 8 is d itself.
    (num * den) % 8
}

fn eps_mod2(u: u64) -> u32 {
    // (u - 1)/2 mod 2 for odd u mod 8.
    if u % 4 == 1 {
        0
    } else {
        1
    }
}

fn omega_mod2(u: u64) -> u32 {
    // (u^2 - 1)/8 mod 2 for odd u mod 8.
    if u % 8 == 1 || u % 8 == 7 {
        0
    } else {
        1
    }
}

/// Whether x is a square in the completion at the place.
pub fn is_local_square(x: &Rat, place: PlaceQ) -> Result<bool, LocalError> {
    if x.is_zero() {
        return Err(LocalError::ZeroInput);
    }
    match place {
        PlaceQ::Real => Ok(x.is_positive()),
        PlaceQ::Finite(2) => {
            let v = padic_valuation(x, 2)?;
            Ok(v % 2 == 0 && odd_part_mod_8(x) == 1)
        }
        PlaceQ::Finite(p) => {
            let v = padic_valuation(x, p)?;
            let f = PrimeField::new(p);
            Ok(v % 2 == 0 && f.legendre(unit_part_mod_p(x, p)) == 1)
        }
    }
}

/// The Hilbert symbol (x, y)_v: +1 iff z^2 = x u^2 + y w^2 has a
/// nontrivial solution over the completion.
pub fn hilbert_symbol(x: &Rat, y: &Rat, place: PlaceQ) -> Result<i32, LocalError> {
    if x.is_zero() || y.is_zero() {
        return Err(LocalError::ZeroInput);
    }
    match place {
        PlaceQ::Real => Ok(if x.is_negative() && y.is_negative() {
            -1
        } else {
            1
        }),
        PlaceQ::Finite(2) => {
            let alpha = padic_valuation(x, 2)? as i128;
            let beta = padic_valuation(y, 2)? as i128;
            let u = odd_part_mod_8(x);
            let w = odd_part_mod_8(y);
            let exponent = eps_mod2(u) as i128 * eps_mod2(w) as i128
                + alpha * omega_mod2(w) as i128
                + beta * omega_mod2(u) as i128;
            Ok(if exponent % 2 == 0 { 1 } else { -1 })
        }
        PlaceQ::Finite(p) => {
            if !is_prime_u64(p) {
                return Err(LocalError::NotPrime(p));
            }
            let alpha = padic_valuation(x, p)? as i128;
            let beta = padic_valuation(y, p)? as i128;
            let f = PrimeField::new(p);
            let u = unit_part_mod_p(x, p);
            let w = unit_part_mod_p(y, p);
            let mut sym = 1i32;
            if (alpha * beta) % 2 != 0 && (p - 1) / 2 % 2 == 1 {
                sym = -sym;
            }
            if beta % 2 != 0 && f.legendre(u) == -1 {
                sym = -sym;
            }
            if alpha % 2 != 0 && f.legendre(w) == -1 {
                sym = -sym;
            }
            Ok(sym)
        }
    }
}

/// The places where (x, y)_v can be nontrivial: real, 2 and the odd
/// primes dividing a numerator or denominator. The product of the symbols
/// over this list is the full product over all places.
pub fn relevant_symbol_places(
    x: &Rat,
    y: &Rat,
    factor_bound: u64,
) -> Result<Vec<PlaceQ>, LocalError> {
    use num_traits::ToPrimitive;
    if x.is_zero() || y.is_zero() {
        return Err(LocalError::ZeroInput);
    }
    let mut places = vec![PlaceQ::Real, PlaceQ::Finite(2)];
    let product = x.numer() * x.denom() * y.numer() * y.denom();
    let f = crate::arith::factorize(&product, factor_bound)?;
    for (p, _) in &f.factors {
        match p.to_u64() {
            Some(p) if p > 2 => places.push(PlaceQ::Finite(p)),
            Some(_) => {}
            None => {
                return Err(LocalError::HypothesisFailed(
                    "prime exceeds u64 range".into(),
                ))
            }
        }
    }
    Ok(places)
}

/// Hasse invariant of a diagonalized form: prod_{i<j} (d_i, d_j)_v.
pub fn hasse_invariant(coeffs: &[Rat], place: PlaceQ) -> Result<i32, LocalError> {
    if coeffs.iter().any(|c| c.is_zero()) {
        return Err(LocalError::ZeroInput);
    }
    let mut acc = 1i32;
    for i in 0..coeffs.len() {
        for j in (i + 1)..coeffs.len() {
            acc *= hilbert_symbol(&coeffs[i], &coeffs[j], place)?;
        }
    }
    Ok(acc)
}
