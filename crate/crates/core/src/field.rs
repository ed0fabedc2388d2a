//! Coefficient fields.
//!
//! Every linear-algebra routine in the crate is generic over [`Field`]. Two
//! families are provided: prime fields [`Fp`] with the modulus fixed at the
//! type level, and the rationals (`num_rational::BigRational`) for exact
//! characteristic-zero computations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::FieldError;

/// An exact field usable as a coefficient ring for cochains.
pub trait Field:
    Clone
    + PartialEq
    + Eq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Characteristic of the field; 0 for the rationals.
    fn characteristic() -> u32;

    /// Multiplicative inverse, `None` for zero.
    fn inverse(&self) -> Option<Self>;

    /// Image of an integer under the unique ring map from Z.
    fn from_i64(value: i64) -> Self;

    /// `(-1)^k`.
    fn sign(k: usize) -> Self {
        if k.is_multiple_of(2) {
            Self::one()
        } else {
            -Self::one()
        }
    }
}

pub const fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Element of the prime field F_P.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp<const P: u32>(u32);

impl<const P: u32> Fp<P> {
    const PRIME_CHECK: () = assert!(is_prime(P), "Fp modulus must be prime");

    pub fn new(value: u32) -> Self {
        #[allow(clippy::let_unit_value)]
        let _ = Self::PRIME_CHECK;
        Fp(value % P)
    }

    pub fn value(self) -> u32 {
        self.0
    }

    pub const fn modulus() -> u32 {
        P
    }

    fn pow(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = Self::new(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl<const P: u32> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Fp(((self.0 as u64 + rhs.0 as u64) % P as u64) as u32)
    }
}

impl<const P: u32> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Fp(((self.0 as u64 + P as u64 - rhs.0 as u64) % P as u64) as u32)
    }
}

impl<const P: u32> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(((self.0 as u64 * rhs.0 as u64) % P as u64) as u32)
    }
}

impl<const P: u32> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        if self.0 == 0 {
            self
        } else {
            Fp(P - self.0)
        }
    }
}

impl<const P: u32> Zero for Fp<P> {
    fn zero() -> Self {
        Self::new(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u32> One for Fp<P> {
    fn one() -> Self {
        Self::new(1)
    }
}

impl<const P: u32> Field for Fp<P> {
    fn characteristic() -> u32 {
        P
    }

    fn inverse(&self) -> Option<Self> {
        // Fermat: a^(P-2) = a^-1
        (self.0 != 0).then(|| self.pow(P - 2))
    }

    fn from_i64(value: i64) -> Self {
        Self::new(value.rem_euclid(P as i64) as u32)
    }
}

impl Field for BigRational {
    fn characteristic() -> u32 {
        0
    }

    fn inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn from_i64(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }
}

/// A validated runtime field choice: a prime, or 0 for the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldChoice(u32);

impl FieldChoice {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        if p == 0 || is_prime(p) {
            Ok(FieldChoice(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    pub fn characteristic(self) -> u32 {
        self.0
    }
}

impl Default for FieldChoice {
    fn default() -> Self {
        FieldChoice(2)
    }
}

impl fmt::Display for FieldChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            write!(f, "Q")
        } else {
            write!(f, "F_{}", self.0)
        }
    }
}

/// Primes with a compiled-in [`Fp`] instantiation, in ascending order.
pub const SUPPORTED_PRIMES: &[u32] = &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 101, 65521];

/// Calls `$body` with `$S` bound to the field type selected by a
/// [`FieldChoice`]. Evaluates to `Err(FieldError::Unsupported)` for primes
/// without an instantiation.
#[macro_export]
macro_rules! with_field {
    ($choice:expr, $S:ident => $body:expr) => {{
        match $choice.characteristic() {
            0 => {
                type $S = $crate::Rational;
                Ok($body)
            }
            2 => { type $S = $crate::field::Fp<2>; Ok($body) }
            3 => { type $S = $crate::field::Fp<3>; Ok($body) }
            5 => { type $S = $crate::field::Fp<5>; Ok($body) }
            7 => { type $S = $crate::field::Fp<7>; Ok($body) }
            11 => { type $S = $crate::field::Fp<11>; Ok($body) }
            13 => { type $S = $crate::field::Fp<13>; Ok($body) }
            17 => { type $S = $crate::field::Fp<17>; Ok($body) }
            19 => { type $S = $crate::field::Fp<19>; Ok($body) }
            23 => { type $S = $crate::field::Fp<23>; Ok($body) }
            29 => { type $S = $crate::field::Fp<29>; Ok($body) }
            31 => { type $S = $crate::field::Fp<31>; Ok($body) }
            101 => { type $S = $crate::field::Fp<101>; Ok($body) }
            65521 => { type $S = $crate::field::Fp<65521>; Ok($body) }
            p => Err($crate::error::FieldError::Unsupported(p)),
        }
    }};
}

#[cfg(test)]
mod tests {
    use super::*;

    type F5 = Fp<5>;

    #[test]
    fn prime_table() {
        let primes: Vec<u32> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(SUPPORTED_PRIMES.iter().all(|&p| is_prime(p)));
    }

    #[test]
    fn modular_arithmetic() {
        assert_eq!(F5::new(3) + F5::new(4), F5::new(2));
        assert_eq!(F5::new(1) - F5::new(3), F5::new(3));
        assert_eq!(F5::new(3) * F5::new(4), F5::new(2));
        assert_eq!(-F5::new(2), F5::new(3));
        assert_eq!(F5::from_i64(-1), F5::new(4));
        for a in 1..5 {
            let x = F5::new(a);
            assert_eq!(x * x.inverse().unwrap(), F5::one());
        }
        assert_eq!(F5::zero().inverse(), None);
    }

    #[test]
    fn signs_vanish_in_characteristic_two() {
        assert_eq!(Fp::<2>::sign(1), Fp::<2>::sign(0));
        assert_eq!(Fp::<3>::sign(1), Fp::<3>::new(2));
        assert_eq!(BigRational::sign(3), BigRational::from_i64(-1));
    }

    #[test]
    fn field_choice_validation() {
        assert!(FieldChoice::new(4).is_err());
        assert!(FieldChoice::new(1).is_err());
        assert_eq!(FieldChoice::new(0).unwrap().to_string(), "Q");
        assert_eq!(FieldChoice::default().characteristic(), 2);
        let r: Result<u32, FieldError> = with_field!(FieldChoice::new(7).unwrap(), S => S::characteristic());
        assert_eq!(r.unwrap(), 7);
        let r: Result<u32, FieldError> = with_field!(FieldChoice::new(37).unwrap(), S => S::characteristic());
        assert!(matches!(r, Err(FieldError::Unsupported(37))));
    }
}
