//! Prime field arithmetic.
//!
//! Elements are stored as canonical byte representatives in `[0, p)`. The
//! [`Field`] handle performs arithmetic on raw representatives, which is what
//! the matrix and tensor code uses in its inner loops. [`FieldElement`] pairs a
//! value with its field and rejects cross-field arithmetic.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported modulus; every element fits in one byte.
pub const MAX_PRIME: u32 = 251;

/// The prime field GF(p) for a prime `2 <= p <= 251`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    p: u8,
}

fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..p)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

impl Field {
    pub fn new(p: u32) -> Result<Self> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(Error::InvalidField(p));
        }
        Ok(Field { p: p as u8 })
    }

    pub fn gf2() -> Self {
        Field { p: 2 }
    }

    #[inline]
    pub fn order(&self) -> u8 {
        self.p
    }

    /// Wraps a canonical representative, rejecting values `>= p`.
    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if value >= self.p as u32 {
            return Err(Error::InvalidElement { value, p: self.p });
        }
        Ok(FieldElement {
            value: value as u8,
            field: *self,
        })
    }

    /// Reduces an arbitrary integer into the field.
    pub fn reduce(&self, value: i64) -> u8 {
        value.rem_euclid(self.p as i64) as u8
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            value: 0,
            field: *self,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            value: 1,
            field: *self,
        }
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        ((a as u16 + self.p as u16 - b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: u8) -> Result<u8> {
        if a.is_multiple_of(self.p) {
            return Err(Error::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.p as i32, a as i32);
        let (mut s0, mut s1) = (0i32, 1i32);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        Ok(self.reduce(s0 as i64))
    }

    pub fn div(&self, a: u8, b: u8) -> Result<u8> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Inner product of two equal-length vectors of representatives.
    pub fn dot(&self, a: &[u8], b: &[u8]) -> u8 {
        let acc = a.iter().zip(b).fold(0u32, |acc, (&x, &y)| {
            (acc + x as u32 * y as u32) % self.p as u32
        });
        acc as u8
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

/// An element of a specific prime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u8,
    field: Field,
}

impl FieldElement {
    pub fn value(&self) -> u8 {
        self.value
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &FieldElement) -> Result<Field> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.p,
                right: other.field.p,
            });
        }
        Ok(self.field)
    }

    fn with(&self, value: u8) -> FieldElement {
        FieldElement {
            value,
            field: self.field,
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        let f = self.same_field(other)?;
        Ok(self.with(f.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        let f = self.same_field(other)?;
        Ok(self.with(f.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        let f = self.same_field(other)?;
        Ok(self.with(f.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> FieldElement {
        self.with(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(self.with(self.field.inv(self.value)?))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        assert_eq!(Field::new(2).unwrap().order(), 2);
        assert_eq!(Field::new(5).unwrap().order(), 5);
        assert_eq!(Field::new(251).unwrap().order(), 251);
        assert_eq!(Field::new(4), Err(Error::InvalidField(4)));
        assert_eq!(Field::new(1), Err(Error::InvalidField(1)));
        assert_eq!(Field::new(0), Err(Error::InvalidField(0)));
        assert_eq!(Field::new(257), Err(Error::InvalidField(257)));
        assert!(Field::new(253).is_err());
    }

    #[test]
    fn small_examples() {
        let gf5 = Field::new(5).unwrap();
        let two = gf5.element(2).unwrap();
        let four = gf5.element(4).unwrap();
        assert_eq!(two.add(&four).unwrap().value(), 1);
        assert_eq!(gf5.element(3).unwrap().inv().unwrap().value(), 2);
        let gf2 = Field::gf2();
        assert_eq!(gf2.one().neg().value(), 1);
        assert_eq!(
            gf5.element(5),
            Err(Error::InvalidElement { value: 5, p: 5 })
        );
    }

    #[test]
    fn errors() {
        let gf5 = Field::new(5).unwrap();
        let gf7 = Field::new(7).unwrap();
        assert_eq!(gf5.zero().inv(), Err(Error::ZeroInverse));
        assert_eq!(
            gf5.one().add(&gf7.one()),
            Err(Error::FieldMismatch { left: 5, right: 7 })
        );
        assert!(gf5.one().mul(&gf7.one()).is_err());
    }

    #[test]
    fn axioms_exhaustive_small_primes() {
        for p in [2u32, 3, 5, 7, 11, 13] {
            let f = Field::new(p).unwrap();
            let p = p as u8;
            for a in 0..p {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..p {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.add(f.sub(a, b), b), a);
                    for c in 0..p {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn inverses_for_largest_field() {
        let f = Field::new(251).unwrap();
        for a in 1..=250u8 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }
}
