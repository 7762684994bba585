use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Rat;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Exponent of `ell` in a nonzero integer.
pub fn int_valuation(x: &BigInt, ell: u64) -> Result<u32> {
    if x.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let ell = BigInt::from(ell);
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&ell);
        if !r.is_zero() {
            return Ok(v);
        }
        x = q;
        v += 1;
    }
}

/// `v` with `x = ell^v * (unit at ell)`.
pub fn valuation_ell(x: &Rat, ell: u64) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroValuation);
    }
    Ok(int_valuation(x.numer(), ell)? as i64 - int_valuation(x.denom(), ell)? as i64)
}

/// Valuation with `+inf` for zero, as `None`.
pub fn valuation_or_inf(x: &Rat, ell: u64) -> Option<i64> {
    valuation_ell(x, ell).ok()
}

pub fn is_ell_integral(x: &Rat, ell: u64) -> bool {
    x.is_zero() || !x.denom().is_multiple_of(&BigInt::from(ell))
}

pub fn is_ell_unit(x: &Rat, ell: u64) -> bool {
    matches!(valuation_ell(x, ell), Ok(0))
}

/// `ell^k` as a rational, `k` of either sign.
pub fn ell_pow(ell: u64, k: i64) -> Rat {
    let p = num_traits::pow(BigInt::from(ell), k.unsigned_abs() as usize);
    if k >= 0 {
        Rat::from_integer(p)
    } else {
        Rat::new(BigInt::one(), p)
    }
}

/// Strips every factor of `ell` from `x`, returning the part prime to `ell`.
pub fn prime_to_ell_part(x: &BigInt, ell: u64) -> BigInt {
    let ell = BigInt::from(ell);
    let mut x = x.abs();
    if x.is_zero() {
        return x;
    }
    loop {
        let (q, r) = x.div_rem(&ell);
        if !r.is_zero() {
            return x;
        }
        x = q;
    }
}

pub fn mod_inverse(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    mod_pow(a % p, p - 2, p)
}

pub fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Residue of an `ell`-integral rational modulo `ell^k` in `[0, ell^k)`.
pub fn residue_mod_power(x: &Rat, ell: u64, k: u32) -> Result<BigInt> {
    if !is_ell_integral(x, ell) {
        return Err(Error::NotEllIntegral {
            row: 0,
            col: 0,
            ell,
        });
    }
    let modulus = num_traits::pow(BigInt::from(ell), k as usize);
    if modulus.is_one() {
        return Ok(BigInt::zero());
    }
    let d = x.denom().mod_floor(&modulus);
    let inv = d.extended_gcd(&modulus).x.mod_floor(&modulus);
    Ok((x.numer() * inv).mod_floor(&modulus))
}

/// Residue of an `ell`-integral rational modulo `ell`.
pub fn residue(x: &Rat, ell: u64) -> Result<u64> {
    Ok(residue_mod_power(x, ell, 1)?
        .to_u64()
        .expect("residue below ell"))
}

/// Signed representative of a residue, in `(-p/2, p/2]`.
pub fn centered(r: u64, p: u64) -> i64 {
    if r > p / 2 {
        r as i64 - p as i64
    } else {
        r as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(valuation_ell(&frac(9, 2), 3).unwrap(), 2);
        assert_eq!(valuation_ell(&rat(5), 3).unwrap(), 0);
        assert_eq!(valuation_ell(&frac(2, 27), 3).unwrap(), -3);
        assert!(matches!(
            valuation_ell(&rat(0), 3),
            Err(Error::ZeroValuation)
        ));
    }

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(11) && is_prime(7919));
        assert!(!is_prime(1) && !is_prime(9) && !is_prime(0));
    }

    #[test]
    fn residues_of_fractions() {
        // 1/2 = 2 mod 3
        assert_eq!(residue(&frac(1, 2), 3).unwrap(), 2);
        assert_eq!(residue(&frac(-1, 1), 5).unwrap(), 4);
        assert_eq!(
            residue_mod_power(&frac(1, 2), 3, 2).unwrap(),
            BigInt::from(5)
        );
        assert!(residue(&frac(1, 3), 3).is_err());
    }

    #[test]
    fn ell_parts() {
        assert_eq!(prime_to_ell_part(&BigInt::from(72), 3), BigInt::from(8));
        assert_eq!(ell_pow(3, -2), frac(1, 9));
        assert_eq!(mod_inverse(3, 7), 5);
    }
}
