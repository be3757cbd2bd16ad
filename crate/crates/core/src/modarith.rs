//! Residue arithmetic modulo odd prime powers.
//!
//! Everything here works over a single [`Modulus`] `p^e` with `p^e < 2^62`, so the product of
//! two canonical residues always fits in a `u128` intermediate. [`PadicFactored`] carries the
//! exact power of `p` separately from a unit known modulo `p^e`, which is what lets binomial
//! recurrences divide by multiples of `p` without losing exactness.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

const MODULUS_LIMIT: u128 = 1 << 62;

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The ring `Z / p^e Z` for an odd prime `p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    p: u64,
    e: u32,
    m: u64,
}

impl Modulus {
    pub fn new(p: u64, e: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if e == 0 {
            return Err(Error::BadExponent(e));
        }
        let mut m: u128 = 1;
        for _ in 0..e {
            m *= p as u128;
            if m >= MODULUS_LIMIT {
                return Err(Error::ModulusTooLarge { p, e });
            }
        }
        Ok(Modulus { p, e, m: m as u64 })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.e
    }

    /// `p^e` itself.
    pub fn value(&self) -> u64 {
        self.m
    }

    /// The same prime at another exponent.
    pub fn with_exponent(&self, e: u32) -> Result<Modulus> {
        Modulus::new(self.p, e)
    }

    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.m as i128) as u64
    }

    pub fn residue(&self, x: i128) -> ResidueClass {
        ResidueClass {
            modulus: *self,
            value: self.reduce(x),
        }
    }

    pub fn zero(&self) -> ResidueClass {
        ResidueClass {
            modulus: *self,
            value: 0,
        }
    }

    pub fn one(&self) -> ResidueClass {
        self.residue(1)
    }

    /// `p^k` as a residue (zero once `k >= e`).
    pub fn prime_power(&self, k: u32) -> ResidueClass {
        if k >= self.e {
            return self.zero();
        }
        ResidueClass {
            modulus: *self,
            value: self.p.pow(k),
        }
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.e)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.e)
    }
}

/// A canonical representative in `[0, p^e)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    modulus: Modulus,
    value: u64,
}

impl ResidueClass {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn pow(&self, exp: u64) -> ResidueClass {
        ResidueClass {
            modulus: self.modulus,
            value: pow_mod_u64(self.value, exp, self.modulus.m),
        }
    }

    pub fn inv(&self) -> Result<ResidueClass> {
        inv_mod(self.value as i128, self.modulus)
    }

    /// Largest `j <= e` with `p^j` dividing the representative.
    pub fn valuation(&self) -> u32 {
        let mut v = 0;
        let mut x = self.value;
        while v < self.modulus.e && x.is_multiple_of(self.modulus.p) {
            x /= self.modulus.p;
            v += 1;
        }
        v
    }

    /// The representative in `(-m/2, m/2]`.
    pub fn signed(&self) -> i128 {
        let m = self.modulus.m as i128;
        let v = self.value as i128;
        if 2 * v > m {
            v - m
        } else {
            v
        }
    }

    /// Reduce into a coarser modulus `p^f`, `f <= e`.
    pub fn reduce_to(&self, target: Modulus) -> ResidueClass {
        debug_assert_eq!(target.p, self.modulus.p);
        debug_assert!(target.e <= self.modulus.e);
        target.residue(self.value as i128)
    }

    /// Exact division by `p^k`; fails unless `p^k` divides the representative.
    /// The quotient is only known modulo `p^(e-k)`.
    pub fn div_prime_power(&self, k: u32) -> Result<ResidueClass> {
        if k == 0 {
            return Ok(*self);
        }
        if k >= self.modulus.e {
            return Err(Error::BadExponent(0));
        }
        let pk = self.modulus.p.pow(k);
        if !self.value.is_multiple_of(pk) {
            return Err(Error::NotDivisible(self.value));
        }
        let target = self.modulus.with_exponent(self.modulus.e - k)?;
        Ok(target.residue((self.value / pk) as i128))
    }
}

impl fmt::Debug for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for ResidueClass {
    type Output = ResidueClass;
    fn add(self, rhs: ResidueClass) -> ResidueClass {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let m = self.modulus.m;
        let s = self.value + rhs.value;
        ResidueClass {
            modulus: self.modulus,
            value: if s >= m { s - m } else { s },
        }
    }
}

impl Sub for ResidueClass {
    type Output = ResidueClass;
    fn sub(self, rhs: ResidueClass) -> ResidueClass {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let value = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + self.modulus.m - rhs.value
        };
        ResidueClass {
            modulus: self.modulus,
            value,
        }
    }
}

impl Mul for ResidueClass {
    type Output = ResidueClass;
    fn mul(self, rhs: ResidueClass) -> ResidueClass {
        debug_assert_eq!(self.modulus, rhs.modulus);
        ResidueClass {
            modulus: self.modulus,
            value: mul_mod_u64(self.value, rhs.value, self.modulus.m),
        }
    }
}

impl Neg for ResidueClass {
    type Output = ResidueClass;
    fn neg(self) -> ResidueClass {
        self.modulus.zero() - self
    }
}

impl AddAssign for ResidueClass {
    fn add_assign(&mut self, rhs: ResidueClass) {
        *self = *self + rhs;
    }
}

impl SubAssign for ResidueClass {
    fn sub_assign(&mut self, rhs: ResidueClass) {
        *self = *self - rhs;
    }
}

impl MulAssign for ResidueClass {
    fn mul_assign(&mut self, rhs: ResidueClass) {
        *self = *self * rhs;
    }
}

/// `base^exp mod p^e`; negative bases are reduced first.
pub fn pow_mod(base: i128, exp: u64, modulus: Modulus) -> ResidueClass {
    modulus.residue(base).pow(exp)
}

/// Inverse of `x` modulo `p^e` by the extended Euclidean algorithm.
pub fn inv_mod(x: i128, modulus: Modulus) -> Result<ResidueClass> {
    let m = modulus.m as i128;
    let a = x.rem_euclid(m);
    if a % modulus.p as i128 == 0 {
        return Err(Error::NotInvertible {
            value: x,
            modulus: modulus.m,
        });
    }
    // every remainder and Bezout coefficient stays below m < 2^62 in absolute value
    let (mut r0, mut r1) = (m as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    Ok(modulus.residue(t0 as i128))
}

/// Jacobi symbol `(n/d)` for odd positive `d`; `(n/1) = 1`.
pub fn jacobi(n: i128, d: i128) -> Result<i8> {
    if d <= 0 || d % 2 == 0 {
        return Err(Error::BadDenominator(d));
    }
    let mut a = n.rem_euclid(d) as u128;
    let mut b = d as u128;
    let mut sign = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if b % 8 == 3 || b % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut b);
        if a % 4 == 3 && b % 4 == 3 {
            sign = -sign;
        }
        a %= b;
    }
    Ok(if b == 1 { sign } else { 0 })
}

/// `(n/p^a)` computed as `(n/p)^a`, with `(n/p^0) = 1`.
pub fn jacobi_prime_power(n: i128, p: u64, a: u32) -> i8 {
    if a == 0 {
        return 1;
    }
    let base = jacobi(n, p as i128).expect("odd prime denominator");
    if base == -1 && a.is_multiple_of(2) {
        1
    } else {
        base
    }
}

/// Splits off the exact power of `p`: returns `(v, n / p^v)`.
pub fn split_valuation(n: i128, p: u64) -> (u32, i128) {
    debug_assert!(n != 0);
    if let Ok(small) = i64::try_from(n) {
        let p = p as i64;
        let (mut v, mut u) = (0, small);
        while u % p == 0 {
            u /= p;
            v += 1;
        }
        return (v, u as i128);
    }
    let p = p as i128;
    let mut v = 0;
    let mut u = n;
    while u % p == 0 {
        u /= p;
        v += 1;
    }
    (v, u)
}

/// An integer `p^valuation * unit` with the unit known modulo `p^e`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicFactored {
    modulus: Modulus,
    valuation: u32,
    unit: u64,
}

impl PadicFactored {
    pub fn one(modulus: Modulus) -> Self {
        PadicFactored {
            modulus,
            valuation: 0,
            unit: 1,
        }
    }

    /// Builds `p^valuation * unit` from its parts; the unit must be prime to `p`.
    pub fn from_parts(modulus: Modulus, valuation: u32, unit: i128) -> Result<Self> {
        let unit = modulus.reduce(unit);
        if unit.is_multiple_of(modulus.p) {
            return Err(Error::NotInvertible {
                value: unit as i128,
                modulus: modulus.m,
            });
        }
        Ok(PadicFactored {
            modulus,
            valuation,
            unit,
        })
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn valuation(&self) -> u32 {
        self.valuation
    }

    pub fn unit(&self) -> u64 {
        self.unit
    }

    pub fn unit_residue(&self) -> ResidueClass {
        ResidueClass {
            modulus: self.modulus,
            value: self.unit,
        }
    }

    pub fn to_residue(&self) -> ResidueClass {
        if self.valuation >= self.modulus.e {
            return self.modulus.zero();
        }
        self.unit_residue() * self.modulus.prime_power(self.valuation)
    }

    pub fn mul(&self, other: &PadicFactored) -> Result<PadicFactored> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch);
        }
        Ok(PadicFactored {
            modulus: self.modulus,
            valuation: self.valuation + other.valuation,
            unit: mul_mod_u64(self.unit, other.unit, self.modulus.m),
        })
    }

    pub fn div(&self, other: &PadicFactored) -> Result<PadicFactored> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch);
        }
        if self.valuation < other.valuation {
            return Err(Error::NegativeValuation {
                numerator: self.valuation,
                denominator: other.valuation,
            });
        }
        let inv = inv_mod(other.unit as i128, self.modulus)?;
        Ok(PadicFactored {
            modulus: self.modulus,
            valuation: self.valuation - other.valuation,
            unit: (self.unit_residue() * inv).value,
        })
    }
}

impl fmt::Debug for PadicFactored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p^{} * {} (mod {})",
            self.valuation, self.unit, self.modulus
        )
    }
}

/// Factors a nonzero integer as `p^v * u` with `u` reduced modulo `p^e`.
pub fn padic_normalize(n: i128, modulus: Modulus) -> Result<PadicFactored> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let (valuation, unit) = split_valuation(n, modulus.p);
    PadicFactored::from_parts(modulus, valuation, unit)
}

pub fn padic_mul(a: &PadicFactored, b: &PadicFactored) -> Result<PadicFactored> {
    a.mul(b)
}

pub fn padic_div(a: &PadicFactored, b: &PadicFactored) -> Result<PadicFactored> {
    a.div(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(p: u64, e: u32) -> Modulus {
        Modulus::new(p, e).unwrap()
    }

    #[test]
    fn modulus_validation() {
        assert_eq!(Modulus::new(2, 1), Err(Error::NotOddPrime(2)));
        assert_eq!(Modulus::new(9, 1), Err(Error::NotOddPrime(9)));
        assert_eq!(Modulus::new(7, 0), Err(Error::BadExponent(0)));
        assert!(matches!(
            Modulus::new(1_000_003, 4),
            Err(Error::ModulusTooLarge { .. })
        ));
        assert_eq!(md(7, 3).value(), 343);
        // 3^39 < 2^62 < 3^40
        assert!(Modulus::new(3, 39).is_ok());
        assert!(Modulus::new(3, 40).is_err());
    }

    #[test]
    fn primality_matches_trial_division() {
        let trial = |n: u64| {
            n >= 2
                && (2..)
                    .take_while(|d| d * d <= n)
                    .all(|d| !n.is_multiple_of(d))
        };
        for n in 0..5000 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
        assert!(is_prime(2_305_843_009_213_693_951));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn pow_mod_examples() {
        assert_eq!(pow_mod(2, 4, md(5, 3)).value(), 16);
        assert_eq!(pow_mod(2, 0, md(7, 3)).value(), 1);
        assert_eq!(pow_mod(2, 6, md(7, 3)).value(), 64);
        assert_eq!(pow_mod(-2, 3, md(7, 3)).value(), 343 - 8);
    }

    #[test]
    fn inv_mod_examples() {
        assert_eq!(inv_mod(1, md(11, 2)).unwrap().value(), 1);
        assert_eq!(inv_mod(8, md(3, 3)).unwrap().value(), 17);
        assert_eq!(inv_mod(16, md(7, 3)).unwrap().value(), 193);
        assert!(matches!(
            inv_mod(7, md(7, 2)),
            Err(Error::NotInvertible { .. })
        ));
        assert_eq!(inv_mod(-16, md(3, 3)).unwrap().value(), 5);
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(2, 7), Ok(1));
        assert_eq!(jacobi(3, 5), Ok(-1));
        assert_eq!(jacobi(5, 5), Ok(0));
        assert_eq!(jacobi(2, 9), Ok(1));
        assert_eq!(jacobi(17, 1), Ok(1));
        assert_eq!(jacobi(-1, 7), Ok(-1));
        assert_eq!(jacobi(-1, 13), Ok(1));
        assert_eq!(jacobi(3, 8), Err(Error::BadDenominator(8)));
        assert_eq!(jacobi(3, -3), Err(Error::BadDenominator(-3)));
        assert_eq!(jacobi(3, 0), Err(Error::BadDenominator(0)));
    }

    #[test]
    fn jacobi_agrees_with_euler_criterion() {
        for p in [3u64, 5, 7, 11, 13, 101, 997] {
            for n in -50i128..50 {
                let euler = pow_mod_u64(n.rem_euclid(p as i128) as u64, (p - 1) / 2, p);
                let expected = match euler {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                assert_eq!(jacobi(n, p as i128).unwrap(), expected, "({n}/{p})");
            }
        }
    }

    #[test]
    fn jacobi_prime_power_convention() {
        assert_eq!(jacobi_prime_power(3, 5, 0), 1);
        assert_eq!(jacobi_prime_power(3, 5, 1), -1);
        assert_eq!(jacobi_prime_power(3, 5, 2), 1);
        assert_eq!(jacobi_prime_power(10, 5, 3), 0);
        assert_eq!(jacobi_prime_power(2, 3, 2), jacobi(2, 9).unwrap());
    }

    #[test]
    fn padic_normalize_examples() {
        let f = padic_normalize(1, md(5, 2)).unwrap();
        assert_eq!((f.valuation(), f.unit()), (0, 1));
        let f = padic_normalize(21, md(7, 2)).unwrap();
        assert_eq!((f.valuation(), f.unit()), (1, 3));
        let f = padic_normalize(252, md(3, 3)).unwrap();
        assert_eq!((f.valuation(), f.unit()), (2, 1));
        assert_eq!(padic_normalize(0, md(3, 3)), Err(Error::ZeroInput));
    }

    #[test]
    fn padic_mul_div_examples() {
        let m = md(7, 2);
        let a = PadicFactored::from_parts(m, 1, 3).unwrap();
        let prod = padic_mul(&a, &a).unwrap();
        assert_eq!((prod.valuation(), prod.unit()), (2, 9));

        let m = md(3, 3);
        let a = PadicFactored::from_parts(m, 2, 1).unwrap();
        let b = PadicFactored::from_parts(m, 1, 5).unwrap();
        let q = padic_div(&a, &b).unwrap();
        assert_eq!((q.valuation(), q.unit()), (1, 11));

        let a = PadicFactored::from_parts(m, 0, 2).unwrap();
        let b = PadicFactored::from_parts(m, 1, 1).unwrap();
        assert!(matches!(
            padic_div(&a, &b),
            Err(Error::NegativeValuation { .. })
        ));
        let other = PadicFactored::one(md(5, 3));
        assert_eq!(a.mul(&other), Err(Error::ModulusMismatch));
    }

    #[test]
    fn to_residue_vanishes_past_exponent() {
        let m = md(5, 2);
        assert!(PadicFactored::from_parts(m, 2, 3)
            .unwrap()
            .to_residue()
            .is_zero());
        assert_eq!(
            PadicFactored::from_parts(m, 1, 3)
                .unwrap()
                .to_residue()
                .value(),
            15
        );
    }

    #[test]
    fn residue_helpers() {
        let m = md(7, 3);
        let r = m.residue(-1);
        assert_eq!(r.value(), 342);
        assert_eq!(r.signed(), -1);
        assert_eq!(m.residue(98).valuation(), 2);
        assert_eq!(m.zero().valuation(), 3);
        let q = m.residue(98).div_prime_power(2).unwrap();
        assert_eq!((q.value(), q.modulus().exponent()), (2, 1));
        assert!(m.residue(8).div_prime_power(1).is_err());
    }
}
