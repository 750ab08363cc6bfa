//! Exact arithmetic in the prime field `F_ell`.
//!
//! Elements are plain `u64` values in `0..ell`, and every operation reduces
//! exactly; there is no floating point anywhere downstream of this module.

use serde::{Deserialize, Serialize};

use crate::error::QdpError;

/// An element of `F_ell`, stored as a canonical representative in `0..ell`.
pub type Fp = u64;

/// The prime field `F_ell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    ell: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Returns `Some(p)` when `n = p^k` for a prime `p` and `k >= 1`.
pub fn prime_power_base(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut m = n;
            while m % p == 0 {
                m /= p;
            }
            return if m == 1 { Some(p) } else { None };
        }
        p += 1;
    }
    Some(n)
}

impl PrimeField {
    pub fn new(ell: u64) -> Result<Self, QdpError> {
        if !is_prime(ell) {
            return Err(QdpError::NotPrime(ell));
        }
        Ok(PrimeField { ell })
    }

    #[inline]
    pub fn ell(&self) -> u64 {
        self.ell
    }

    #[inline]
    pub fn reduce(&self, n: u64) -> Fp {
        n % self.ell
    }

    /// Canonical representative of a possibly negative integer.
    pub fn reduce_i64(&self, n: i64) -> Fp {
        let m = self.ell as i64;
        (((n % m) + m) % m) as Fp
    }

    #[inline]
    pub fn add(&self, a: Fp, b: Fp) -> Fp {
        let s = a + b;
        if s >= self.ell {
            s - self.ell
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: Fp, b: Fp) -> Fp {
        if a >= b {
            a - b
        } else {
            a + self.ell - b
        }
    }

    #[inline]
    pub fn neg(&self, a: Fp) -> Fp {
        if a == 0 {
            0
        } else {
            self.ell - a
        }
    }

    #[inline]
    pub fn mul(&self, a: Fp, b: Fp) -> Fp {
        // ell fits comfortably in 32 bits for every context we build,
        // but stay exact for any u64 prime via u128.
        ((a as u128 * b as u128) % self.ell as u128) as Fp
    }

    pub fn pow(&self, mut base: Fp, mut exp: u64) -> Fp {
        let mut acc: Fp = 1;
        base %= self.ell;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self, a: Fp) -> Result<Fp, QdpError> {
        if a % self.ell == 0 {
            return Err(QdpError::NotInvertible {
                value: a,
                modulus: self.ell,
            });
        }
        Ok(self.pow(a, self.ell - 2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_modulus() {
        assert!(PrimeField::new(6).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(0).is_err());
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(97).is_ok());
    }

    #[test]
    fn field_axioms_small() {
        let f = PrimeField::new(7).unwrap();
        for a in 0..7 {
            for b in 0..7 {
                assert_eq!(f.add(a, b), (a + b) % 7);
                assert_eq!(f.mul(a, b), (a * b) % 7);
                assert_eq!(f.sub(f.add(a, b), b), a);
            }
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
        assert!(f.inv(0).is_err());
    }

    #[test]
    fn prime_power_bases() {
        assert_eq!(prime_power_base(2), Some(2));
        assert_eq!(prime_power_base(4), Some(2));
        assert_eq!(prime_power_base(8), Some(2));
        assert_eq!(prime_power_base(9), Some(3));
        assert_eq!(prime_power_base(27), Some(3));
        assert_eq!(prime_power_base(6), None);
        assert_eq!(prime_power_base(12), None);
        assert_eq!(prime_power_base(1), None);
    }

    #[test]
    fn reduce_negative() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.reduce_i64(-1), 4);
        assert_eq!(f.reduce_i64(-5), 0);
        assert_eq!(f.reduce_i64(7), 2);
    }
}
