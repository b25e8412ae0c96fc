//! Truncated p-adic arithmetic: residues modulo p^N for an odd prime p.
//! A value with precision N stands for a coset mod p^N; every contract
//! downstream is a congruence at a stated level, never an exact p-adic.

use super::{ArithError, PrimeField, Rat, Ring};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// The ring Z/p^N as a ring object. p is an odd prime, N >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueRing {
    prime: u64,
    precision: u32,
    modulus: BigUint,
}

impl ResidueRing {
    pub fn new(prime: u64, precision: u32) -> Result<Self, ArithError> {
        if prime < 3 || !super::is_prime_u64(prime) {
            return Err(ArithError::NotOddPrime(prime));
        }
        assert!(precision >= 1, "precision must be positive");
        Ok(ResidueRing {
            prime,
            precision,
            modulus: BigUint::from(prime).pow(precision),
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn residue_field(&self) -> PrimeField {
        PrimeField::new(self.prime)
    }

    /// Same prime, different precision.
    pub fn with_precision(&self, precision: u32) -> ResidueRing {
        ResidueRing::new(self.prime, precision).expect("prime already validated")
    }

    pub fn reduce_big(&self, n: &BigInt) -> BigUint {
        n.mod_floor(&BigInt::from(self.modulus.clone()))
            .to_biguint()
            .expect("mod_floor of positive modulus is nonnegative")
    }

    /// Image of a rational with p-unit denominator.
    pub fn from_rat(&self, x: &Rat) -> Result<BigUint, ArithError> {
        let den = self.reduce_big(x.denom());
        let den_inv = self
            .inverse(&den)
            .ok_or_else(|| ArithError::ResidueRange(format!("denominator {} not a p-unit", x.denom())))?;
        Ok(self.mul(&self.reduce_big(x.numer()), &den_inv))
    }

    /// Reduce to a coarser precision.
    pub fn truncate(&self, a: &BigUint, precision: u32) -> BigUint {
        debug_assert!(precision <= self.precision);
        a % BigUint::from(self.prime).pow(precision)
    }

    pub fn to_residue_field(&self, a: &BigUint) -> u64 {
        (a % BigUint::from(self.prime)).to_u64().expect("< p")
    }

    /// a == b mod p^level.
    pub fn congruent_at(&self, a: &BigUint, b: &BigUint, level: u32) -> bool {
        debug_assert!(level <= self.precision);
        let m = BigUint::from(self.prime).pow(level);
        a % &m == b % &m
    }

    /// Exact division by p^k; panics unless a == 0 mod p^k.
    pub fn divide_by_p_pow(&self, a: &BigUint, k: u32) -> BigUint {
        let pk = BigUint::from(self.prime).pow(k);
        let (q, r) = a.div_rem(&pk);
        assert!(r.is_zero(), "residue not divisible by p^{k}");
        q
    }
}

impl Ring for ResidueRing {
    type Elem = BigUint;

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn from_i64(&self, n: i64) -> BigUint {
        self.reduce_big(&BigInt::from(n))
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.modulus
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        ((a + &self.modulus) - (b % &self.modulus)) % &self.modulus
    }
    fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            BigUint::zero()
        } else {
            &self.modulus - (a % &self.modulus)
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.modulus
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        (a % &self.modulus).is_zero()
    }
    fn is_unit(&self, a: &BigUint) -> bool {
        !(a % self.prime).is_zero()
    }
    fn inverse(&self, a: &BigUint) -> Option<BigUint> {
        if !self.is_unit(a) {
            return None;
        }
        // Units of Z/p^N form a group of order p^(N-1)(p-1).
        let order = BigUint::from(self.prime).pow(self.precision - 1) * (self.prime - 1);
        Some(a.modpow(&(order - 1u32), &self.modulus))
    }
}

/// p-adic valuation of a residue, None for the zero residue.
pub fn residue_valuation(ring: &ResidueRing, a: &BigUint) -> Option<u32> {
    let a = a % ring.modulus();
    if a.is_zero() {
        return None;
    }
    let p = BigUint::from(ring.prime());
    let mut v = 0u32;
    let mut m = a;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        v += 1;
        m = q;
    }
}

/// Square root of a unit square mod an odd prime, by Tonelli-Shanks with a
/// deterministic non-residue scan. None when a is a non-residue.
pub fn sqrt_mod_p(f: &PrimeField, a: u64) -> Option<u64> {
    let p = f.p;
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if f.legendre(a) < 0 {
        return None;
    }
    if p % 4 == 3 {
        return Some(f.pow(a, (p + 1) / 4));
    }
    // Tonelli-Shanks for p == 1 mod 4.
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let z = f.non_residue();
    let mut m = s;
    let mut c = f.pow(z, q);
    let mut t = f.pow(a, q);
    let mut r = f.pow(a, q.div_ceil(2));
    while t != 1 {
        let mut i = 0u32;
        let mut tt = t;
        while tt != 1 {
            tt = f.mul(&tt, &tt);
            i += 1;
        }
        let mut b = c;
        for _ in 0..(m - i - 1) {
            b = f.mul(&b, &b);
        }
        m = i;
        c = f.mul(&b, &b);
        t = f.mul(&t, &c);
        r = f.mul(&r, &b);
    }
    Some(r)
}

/// A vector of residues sharing one (p, N).
pub type VectorPN = Vec<BigUint>;

/// Scalar of Z_p known to precision N: a coset residue mod p^N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicApprox {
    pub prime: u64,
    pub precision: u32,
    pub residue: BigUint,
}

impl PAdicApprox {
    pub fn new(prime: u64, precision: u32, residue: BigUint) -> Result<Self, ArithError> {
        let ring = ResidueRing::new(prime, precision)?;
        if &residue >= ring.modulus() {
            return Err(ArithError::ResidueRange(residue.to_string()));
        }
        Ok(PAdicApprox {
            prime,
            precision,
            residue,
        })
    }

    pub fn ring(&self) -> ResidueRing {
        ResidueRing::new(self.prime, self.precision).expect("validated at construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_from_str;

    #[test]
    fn ring_arithmetic() {
        let r = ResidueRing::new(5, 4).unwrap();
        assert_eq!(r.modulus(), &BigUint::from(625u32));
        let a = BigUint::from(624u32);
        assert_eq!(r.add(&a, &r.one()), BigUint::zero());
        assert_eq!(r.neg(&r.one()), a);
        let half = r.from_rat(&rat_from_str("1/2").unwrap()).unwrap();
        assert_eq!(half, BigUint::from(313u32));
        assert_eq!(r.mul(&half, &BigUint::from(2u32)), BigUint::one());
        assert!(r.inverse(&BigUint::from(5u32)).is_none());
        let inv3 = r.inverse(&BigUint::from(3u32)).unwrap();
        assert_eq!(r.mul(&inv3, &BigUint::from(3u32)), BigUint::one());
    }

    #[test]
    fn p_equals_two_rejected() {
        assert!(matches!(
            ResidueRing::new(2, 3),
            Err(ArithError::NotOddPrime(2))
        ));
        assert!(matches!(
            ResidueRing::new(9, 3),
            Err(ArithError::NotOddPrime(9))
        ));
    }

    #[test]
    fn valuations() {
        let r = ResidueRing::new(3, 5).unwrap();
        assert_eq!(residue_valuation(&r, &BigUint::from(9u32)), Some(2));
        assert_eq!(residue_valuation(&r, &BigUint::from(10u32)), Some(0));
        assert_eq!(residue_valuation(&r, &BigUint::zero()), None);
        assert_eq!(residue_valuation(&r, &BigUint::from(243u32)), None);
    }

    #[test]
    fn square_roots() {
        for p in [3u64, 5, 7, 11, 13, 17] {
            let f = PrimeField::new(p);
            for a in 1..p {
                match sqrt_mod_p(&f, a) {
                    Some(r) => assert_eq!(f.mul(&r, &r), a),
                    None => assert_eq!(f.legendre(a), -1),
                }
            }
        }
    }
}
