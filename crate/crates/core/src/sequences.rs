//! Lucas sequences `u_n(A, B)`, `v_n(A, B)` modulo prime powers, and the Fibonacci and Fermat
//! quotients derived from them.

use crate::error::{domain, Error, Result};
use crate::modarith::{jacobi, pow_mod, Modulus, ResidueClass};

/// The recurrence parameters `(A, B)` of `x_{n+1} = A x_n - B x_{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LucasParams {
    pub a: i64,
    pub b: i64,
}

impl LucasParams {
    pub const FIBONACCI: LucasParams = LucasParams { a: 1, b: -1 };

    pub fn new(a: i64, b: i64) -> Self {
        LucasParams { a, b }
    }

    /// `A^2 - 4B`.
    pub fn delta(&self) -> i128 {
        let a = self.a as i128;
        a * a - 4 * self.b as i128
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LucasPair {
    pub u: ResidueClass,
    pub v: ResidueClass,
    pub index: u64,
}

/// `(u_n, v_n)` modulo `p^e` by fast doubling on the pair `(u_n, u_{n+1})`.
pub fn lucas_uv_mod(params: LucasParams, n: u64, modulus: Modulus) -> LucasPair {
    let a = modulus.residue(params.a as i128);
    let b = modulus.residue(params.b as i128);
    let two = modulus.residue(2);
    let mut u = modulus.zero();
    let mut u_next = modulus.one();
    for bit in (0..64 - n.leading_zeros()).rev() {
        let doubled = u * (two * u_next - a * u);
        let doubled_next = u_next * u_next - b * u * u;
        if (n >> bit) & 1 == 1 {
            u = doubled_next;
            u_next = a * doubled_next - b * doubled;
        } else {
            u = doubled;
            u_next = doubled_next;
        }
    }
    LucasPair {
        u,
        v: two * u_next - a * u,
        index: n,
    }
}

pub fn fibonacci(n: u64, modulus: Modulus) -> ResidueClass {
    lucas_uv_mod(LucasParams::FIBONACCI, n, modulus).u
}

pub fn lucas_number(n: u64, modulus: Modulus) -> ResidueClass {
    lucas_uv_mod(LucasParams::FIBONACCI, n, modulus).v
}

/// `p - (Δ/p)`, an index at which `u_n ≡ 0 (mod p)`.
pub fn entry_index(params: LucasParams, p: u64) -> Result<u64> {
    if p < 3 || !crate::modarith::is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if (2 * params.b as i128) % p as i128 == 0 {
        return Err(domain("entry_index", format!("{p} divides 2B")));
    }
    let symbol = jacobi(params.delta(), p as i128)?;
    Ok((p as i64 - symbol as i64) as u64)
}

/// `F_{p-(p/5)} / p` modulo `p^e`.
pub fn fibonacci_quotient(p: u64, e: u32) -> Result<ResidueClass> {
    if p == 5 {
        return Err(domain("fibonacci_quotient", "p = 5"));
    }
    let wide = Modulus::new(p, e + 1)?;
    let index = entry_index(LucasParams::FIBONACCI, p)?;
    let f = fibonacci(index, wide);
    if !f.value().is_multiple_of(p) {
        return Err(Error::NotDivisible(f.value()));
    }
    f.div_prime_power(1)
}

/// `(b^(p-1) - 1) / p` modulo `p^e`.
pub fn fermat_quotient(b: i64, p: u64, e: u32) -> Result<ResidueClass> {
    let wide = Modulus::new(p, e + 1)?;
    if (b as i128) % p as i128 == 0 {
        return Err(Error::NotInvertible {
            value: b as i128,
            modulus: p,
        });
    }
    let r = pow_mod(b as i128, p - 1, wide) - wide.one();
    if !r.value().is_multiple_of(p) {
        return Err(Error::NotDivisible(r.value()));
    }
    r.div_prime_power(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(params: LucasParams, n: u64, modulus: Modulus) -> (u64, u64) {
        let a = modulus.residue(params.a as i128);
        let b = modulus.residue(params.b as i128);
        let (mut u0, mut u1) = (modulus.zero(), modulus.one());
        let (mut v0, mut v1) = (modulus.residue(2), a);
        for _ in 0..n {
            (u0, u1) = (u1, a * u1 - b * u0);
            (v0, v1) = (v1, a * v1 - b * v0);
        }
        (u0.value(), v0.value())
    }

    #[test]
    fn initial_terms() {
        let m = Modulus::new(7, 3).unwrap();
        for (a, b) in [(1, -1), (4, 8), (3, 1), (-5, 2)] {
            let pair = lucas_uv_mod(LucasParams::new(a, b), 0, m);
            assert_eq!((pair.u.value(), pair.v.value()), (0, 2));
            let pair = lucas_uv_mod(LucasParams::new(a, b), 1, m);
            assert_eq!((pair.u.value(), pair.v.value()), (1, m.reduce(a as i128)));
        }
    }

    #[test]
    fn fibonacci_and_lucas_ten() {
        // 7^6 exceeds L_10 = 123, so residues equal the integers.
        let m = Modulus::new(7, 6).unwrap();
        let pair = lucas_uv_mod(LucasParams::FIBONACCI, 10, m);
        assert_eq!((pair.u.value(), pair.v.value()), (55, 123));
    }

    #[test]
    fn gaussian_and_eisenstein_vanishing() {
        let m = Modulus::new(1009, 2).unwrap();
        let pair = lucas_uv_mod(LucasParams::new(4, 8), 4, m);
        assert!(pair.u.is_zero());
        assert_eq!(pair.v.signed(), -128);
        assert!(lucas_uv_mod(LucasParams::new(4, 16), 3, m).u.is_zero());
    }

    #[test]
    fn doubling_matches_recurrence() {
        let m = Modulus::new(13, 4).unwrap();
        for params in [(1, -1), (4, 8), (4, 16), (3, 1), (2, 1), (5, 3)] {
            let params = LucasParams::new(params.0, params.1);
            for n in 0..300 {
                let pair = lucas_uv_mod(params, n, m);
                assert_eq!((pair.u.value(), pair.v.value()), naive(params, n, m));
            }
        }
    }

    #[test]
    fn entry_index_examples() {
        assert_eq!(entry_index(LucasParams::FIBONACCI, 7), Ok(8));
        assert_eq!(entry_index(LucasParams::FIBONACCI, 11), Ok(10));
        assert_eq!(entry_index(LucasParams::FIBONACCI, 5), Ok(5));
        assert!(matches!(
            entry_index(LucasParams::new(1, 3), 3),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn fibonacci_quotient_examples() {
        assert_eq!(fibonacci_quotient(7, 1).unwrap().value(), 3);
        assert_eq!(fibonacci_quotient(11, 1).unwrap().value(), 5);
        assert_eq!(fibonacci_quotient(3, 1).unwrap().value(), 1);
        // F_8 / 7 = 3 exactly, at any precision
        assert_eq!(fibonacci_quotient(7, 3).unwrap().value(), 3);
        assert!(fibonacci_quotient(5, 1).is_err());
    }

    #[test]
    fn fermat_quotient_examples() {
        assert_eq!(fermat_quotient(2, 3, 1).unwrap().value(), 1);
        assert_eq!(fermat_quotient(2, 7, 1).unwrap().value(), 2);
        assert_eq!(fermat_quotient(2, 5, 1).unwrap().value(), 3);
        assert_eq!(fermat_quotient(2, 7, 2).unwrap().value(), 9);
        assert!(matches!(
            fermat_quotient(14, 7, 1),
            Err(Error::NotInvertible { .. })
        ));
    }
}
