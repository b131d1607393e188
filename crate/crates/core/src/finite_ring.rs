//! Exact arithmetic in `Z/m`.
//!
//! `Z/1` is treated as the zero ring: its only element `0` is also its
//! multiplicative identity, so its unit group is `{0}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// An element of `Z/m`, always stored in the canonical range `0..m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    /// Reduces an arbitrary integer into `Z/m`.
    pub fn new(value: i64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::invalid("modulus must be at least 1"));
        }
        let value = (value as i128).rem_euclid(modulus as i128) as u64;
        Ok(Residue { value, modulus })
    }

    pub(crate) fn from_reduced(value: u64, modulus: u64) -> Self {
        debug_assert!(value < modulus);
        Residue { value, modulus }
    }

    pub fn zero(modulus: u64) -> Result<Self> {
        Residue::new(0, modulus)
    }

    pub fn one(modulus: u64) -> Result<Self> {
        Residue::new(1, modulus)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_unit(&self) -> bool {
        self.modulus == 1 || gcd(self.value as i64, self.modulus as i64) == 1
    }

    /// Multiplicative inverse via extended Euclid, if one exists.
    pub fn inverse(&self) -> Option<Residue> {
        mod_inverse(self.value, self.modulus).map(|v| Residue::from_reduced(v, self.modulus))
    }

    pub fn pow(&self, mut exp: u64) -> Residue {
        let mut base = *self;
        let mut acc = Residue::from_reduced(1 % self.modulus, self.modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    fn check_same(&self, other: &Residue) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::invalid(format!(
                "cannot combine residues mod {} and mod {}",
                self.modulus, other.modulus
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Residue) -> Result<Residue> {
        self.check_same(other)?;
        Ok(*self + *other)
    }

    pub fn checked_mul(&self, other: &Residue) -> Result<Residue> {
        self.check_same(other)?;
        Ok(*self * *other)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

// The operator impls panic on a modulus mismatch; use the `checked_*`
// methods when the operands come from user input.
impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "residue modulus mismatch");
        let v = (self.value as u128 + rhs.value as u128) % self.modulus as u128;
        Residue::from_reduced(v as u64, self.modulus)
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self + (-rhs)
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        let v = (self.modulus - self.value) % self.modulus;
        Residue::from_reduced(v, self.modulus)
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "residue modulus mismatch");
        let v = (self.value as u128 * rhs.value as u128) % self.modulus as u128;
        Residue::from_reduced(v as u64, self.modulus)
    }
}

/// Nonnegative gcd; `gcd(0, 0) == 0`.
pub fn gcd(a: i64, b: i64) -> u64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Returns `(g, x, y)` with `a*x + b*y == g == gcd(a, b)`.
pub fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `m` (canonical), or `None` when `gcd(a, m) != 1`.
/// Modulo 1 every value is `0`, which is its own inverse.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 0 {
        return None;
    }
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = extended_gcd(a as i128 % m as i128, m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as u64)
}

/// Euler's totient by direct count of `1 <= k <= m` coprime to `m`.
pub fn totient(m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::invalid("totient is defined for m >= 1"));
    }
    Ok((1..=m).filter(|&k| gcd(k as i64, m as i64) == 1).count() as u64)
}

/// All invertible residues of `Z/m` in increasing order; `{0}` for `m = 1`.
pub fn units(m: u64) -> Result<Vec<Residue>> {
    if m == 0 {
        return Err(Error::invalid("units are defined for m >= 1"));
    }
    Ok((0..m)
        .map(|v| Residue::from_reduced(v, m))
        .filter(Residue::is_unit)
        .collect())
}

/// The residues `{1, -1}` of `Z/m` (a single element when `m <= 2`).
pub fn plus_minus_one(m: u64) -> Result<Vec<Residue>> {
    let one = Residue::one(m)?;
    let mut v = vec![one, -one];
    v.sort();
    v.dedup();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_totient(m: u64) -> u64 {
        (1..=m)
            .filter(|k| (1..=*k).rev().find(|d| k % d == 0 && m.is_multiple_of(*d)) == Some(1))
            .count() as u64
    }

    #[test]
    fn totient_examples() {
        assert_eq!(totient(1).unwrap(), 1);
        assert_eq!(totient(2).unwrap(), 1);
        assert_eq!(brute_totient(24), 8);
        assert_eq!(totient(24).unwrap(), 8);
        assert!(matches!(totient(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn totient_matches_naive_divisor_count() {
        for m in 1..200 {
            assert_eq!(totient(m).unwrap(), brute_totient(m), "m = {m}");
        }
    }

    #[test]
    fn units_examples() {
        let vals = |m| {
            units(m)
                .unwrap()
                .iter()
                .map(|r| r.value())
                .collect::<Vec<_>>()
        };
        assert_eq!(vals(1), vec![0]);
        assert_eq!(vals(2), vec![1]);
        assert_eq!(vals(4), vec![1, 3]);
        assert_eq!(vals(12), vec![1, 5, 7, 11]);
        assert!(units(0).is_err());
    }

    #[test]
    fn units_by_inverse_search() {
        for m in 1..60u64 {
            let brute: Vec<u64> = (0..m)
                .filter(|&a| (0..m).any(|b| (a * b) % m == 1 % m))
                .collect();
            let got: Vec<u64> = units(m).unwrap().iter().map(|r| r.value()).collect();
            assert_eq!(got, brute, "m = {m}");
        }
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(5, 24), 1);
        assert_eq!(gcd(0, 7), 7);
        assert_eq!(gcd(12, 24), 12);
        assert_eq!(gcd(0, 0), 0);
        assert_eq!(gcd(-12, 18), 6);
    }

    #[test]
    fn residue_reduction_and_mismatch() {
        let a = Residue::new(-1, 7).unwrap();
        assert_eq!(a.value(), 6);
        let b = Residue::new(3, 5).unwrap();
        assert!(a.checked_add(&b).is_err());
        assert!(a.checked_mul(&b).is_err());
        assert!(Residue::new(3, 0).is_err());
        assert_eq!(Residue::new(3, 7).unwrap().inverse().unwrap().value(), 5);
        assert_eq!(Residue::new(4, 8).unwrap().inverse(), None);
        assert_eq!(Residue::new(3, 7).unwrap().pow(6).value(), 1);
    }

    #[test]
    fn zero_ring() {
        let z = Residue::new(5, 1).unwrap();
        assert_eq!(z.value(), 0);
        assert!(z.is_unit());
        assert_eq!(z.inverse(), Some(z));
        assert_eq!(plus_minus_one(1).unwrap().len(), 1);
        assert_eq!(plus_minus_one(2).unwrap().len(), 1);
        assert_eq!(plus_minus_one(3).unwrap().len(), 2);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn totient_is_multiplicative(a in 1u64..300, b in 1u64..300) {
                prop_assume!(gcd(a as i64, b as i64) == 1);
                prop_assert_eq!(totient(a * b).unwrap(), totient(a).unwrap() * totient(b).unwrap());
            }

            #[test]
            fn unit_count_is_totient(m in 1u64..500) {
                prop_assert_eq!(units(m).unwrap().len() as u64, totient(m).unwrap());
            }

            #[test]
            fn unique_inverse(m in 1u64..200) {
                let us = units(m).unwrap();
                let one = Residue::one(m).unwrap();
                for u in &us {
                    let inv: Vec<_> = us.iter().filter(|w| *u * **w == one).collect();
                    prop_assert_eq!(inv.len(), 1);
                    prop_assert_eq!(*inv[0], u.inverse().unwrap());
                }
            }
        }
    }
}
