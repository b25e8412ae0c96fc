//! Square classes of Q^x: canonical signed squarefree representatives.

use super::{factorize, ArithError, Rat};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

/// An element of Q^x / (Q^x)^2, stored as its unique signed squarefree
/// integer representative. Two rationals map to the same class exactly when
/// their quotient is a nonzero rational square.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass(BigInt);

impl SquareClass {
    pub fn one() -> Self {
        SquareClass(BigInt::one())
    }

    pub fn representative(&self) -> &BigInt {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_one()
    }

    /// Group law in Q^x / (Q^x)^2.
    pub fn mul(&self, other: &SquareClass, bound: u64) -> Result<SquareClass, ArithError> {
        square_class_int(&(&self.0 * &other.0), bound)
    }
}

impl std::fmt::Display for SquareClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Squarefree part of a nonzero integer.
pub fn square_class_int(n: &BigInt, bound: u64) -> Result<SquareClass, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroInput);
    }
    let f = factorize(n, bound)?;
    let mut rep = BigUint::one();
    for p in f.odd_exponent_primes() {
        rep *= p;
    }
    let mut rep = BigInt::from(rep);
    if f.sign < 0 {
        rep = -rep;
    }
    Ok(SquareClass(rep))
}

/// Squarefree representative of a nonzero rational. num/den and num*den
/// differ by den^2, so the class is that of num * den.
pub fn square_class(x: &Rat, bound: u64) -> Result<SquareClass, ArithError> {
    if x.is_zero() {
        return Err(ArithError::ZeroInput);
    }
    square_class_int(&(x.numer() * x.denom()), bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat_from_str, rat_i64, DEFAULT_FACTOR_BOUND};

    fn cls(s: &str) -> BigInt {
        square_class(&rat_from_str(s).unwrap(), DEFAULT_FACTOR_BOUND)
            .unwrap()
            .representative()
            .clone()
    }

    #[test]
    fn examples() {
        assert_eq!(cls("18"), BigInt::from(2)); // 18 = 2 * 3^2
        assert_eq!(cls("-1/4"), BigInt::from(-1));
        assert_eq!(cls("50/27"), BigInt::from(6)); // 2*5^2 / 3^3 ~ 2*3
        assert!(square_class(&rat_i64(0), 100).is_err());
    }

    #[test]
    fn square_invariance() {
        // class(x * y^2) = class(x)
        for (x, y) in [("7/3", "2"), ("-5", "3/4"), ("12", "10/7")] {
            let x = rat_from_str(x).unwrap();
            let y = rat_from_str(y).unwrap();
            let scaled = &x * &y * &y;
            assert_eq!(
                square_class(&x, DEFAULT_FACTOR_BOUND).unwrap(),
                square_class(&scaled, DEFAULT_FACTOR_BOUND).unwrap()
            );
        }
    }

    #[test]
    fn group_law() {
        let a = square_class(&rat_i64(6), DEFAULT_FACTOR_BOUND).unwrap();
        let b = square_class(&rat_i64(10), DEFAULT_FACTOR_BOUND).unwrap();
        // 6 * 10 = 60 = 4 * 15
        assert_eq!(
            a.mul(&b, DEFAULT_FACTOR_BOUND).unwrap().representative(),
            &BigInt::from(15)
        );
    }
}
