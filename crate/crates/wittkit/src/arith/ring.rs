//! Ring-object traits for the three coefficient domains the linear algebra
//! runs over: Q, F_p, and Z/p^N. Mirrors the "ring as explicit parameter"
//! style so one elimination engine serves all three.

use super::Rat;
use num_traits::{One, Zero};

/// A commutative ring given as a runtime object; elements are plain data.
/// `is_unit` drives pivot selection in the shared elimination engine.
pub trait Ring {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_unit(&self, a: &Self::Elem) -> bool;
    /// Multiplicative inverse, None when `a` is not a unit.
    fn inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn div_unit(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let inv = self.inverse(b).expect("division by non-unit");
        self.mul(a, &inv)
    }
}

/// Marker for rings where every nonzero element is a unit.
pub trait Field: Ring {}

/// The rationals.
#[derive(Debug, Clone, Copy, Default)]
pub struct RatField;

impl Ring for RatField {
    type Elem = Rat;

    fn zero(&self) -> Rat {
        Rat::zero()
    }
    fn one(&self) -> Rat {
        Rat::one()
    }
    fn from_i64(&self, n: i64) -> Rat {
        super::rat_i64(n)
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        a - b
    }
    fn neg(&self, a: &Rat) -> Rat {
        -a
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }
    fn is_zero(&self, a: &Rat) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &Rat) -> bool {
        !a.is_zero()
    }
    fn inverse(&self, a: &Rat) -> Option<Rat> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
}

impl Field for RatField {}

/// The prime field F_p for an odd prime p < 2^63; elements are reduced u64s.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        debug_assert!(super::is_prime_u64(p));
        PrimeField { p }
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let m = self.p as u128;
        let mut base = (a % self.p) as u128;
        let mut acc: u128 = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        acc as u64
    }

    /// Legendre symbol of a unit: +1 for squares, -1 otherwise.
    pub fn legendre(&self, a: u64) -> i32 {
        debug_assert!(!a.is_multiple_of(self.p));
        if self.pow(a, (self.p - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }

    /// Smallest quadratic non-residue, by deterministic scan.
    pub fn non_residue(&self) -> u64 {
        (2..self.p).find(|&a| self.legendre(a) < 0).expect("p > 2")
    }
}

impl Ring for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, n: i64) -> u64 {
        let p = self.p as i128;
        (((n as i128) % p + p) % p) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.p as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + (self.p - *b % self.p) as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        a.is_multiple_of(self.p)
    }
    fn is_unit(&self, a: &u64) -> bool {
        !a.is_multiple_of(self.p)
    }
    fn inverse(&self, a: &u64) -> Option<u64> {
        if a.is_multiple_of(self.p) {
            None
        } else {
            Some(self.pow(*a, self.p - 2))
        }
    }
}

impl Field for PrimeField {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_ops() {
        let f = PrimeField::new(7);
        assert_eq!(f.add(&5, &4), 2);
        assert_eq!(f.sub(&2, &5), 4);
        assert_eq!(f.neg(&3), 4);
        assert_eq!(f.mul(&3, &5), 1);
        assert_eq!(f.inverse(&3), Some(5));
        assert_eq!(f.inverse(&0), None);
        assert_eq!(f.from_i64(-1), 6);
        assert_eq!(f.legendre(2), 1); // 3^2 = 2 mod 7
        assert_eq!(f.legendre(3), -1);
        assert_eq!(f.non_residue(), 3);
    }
}
