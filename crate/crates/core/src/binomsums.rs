//! Finite sums of central binomial coefficients modulo prime powers, plus the two exact
//! integer identities that are checked in arbitrary precision.
//!
//! Terms are carried as [`PadicFactored`] values so that `C(2k, k)` stays exact when `k`
//! passes `p/2`; only the per-term residues are accumulated.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::modarith::{inv_mod, padic_normalize, Modulus, PadicFactored, ResidueClass};
use crate::sequences::LucasParams;

/// Per-term weight multiplying `C(2k, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightKind {
    None,
    /// `1/(k+1)`, giving Catalan numbers.
    Catalan,
    LinearK,
    /// `1/(2k-1)`
    Inv2kMinus1,
    /// `1/(2k-1)^2`
    Inv2kMinus1Sq,
    /// `H_k^(2) = sum_{0<j<=k} 1/j^2`
    H2,
}

/// `sum_{k=0}^{upper} weight(k) C(2k,k) / base^k (mod p^e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumSpec {
    pub base: i64,
    pub upper: u64,
    pub weight: WeightKind,
    pub modulus: Modulus,
}

/// `C(2k, k)` for `k = 0, 1, 2, ...` in factored form, via
/// `C(2k, k) = C(2k-2, k-1) * 2(2k-1) / k`.
#[derive(Debug, Clone)]
pub struct CentralBinomials {
    modulus: Modulus,
    k: u64,
    current: PadicFactored,
    failed: bool,
}

impl CentralBinomials {
    pub fn new(modulus: Modulus) -> Self {
        CentralBinomials {
            modulus,
            k: 0,
            current: PadicFactored::one(modulus),
            failed: false,
        }
    }

    fn advance(&mut self) -> Result<()> {
        self.k += 1;
        let k = self.k as i128;
        let grow = padic_normalize(2 * (2 * k - 1), self.modulus)?;
        let shrink = padic_normalize(k, self.modulus)?;
        self.current = self.current.mul(&grow)?.div(&shrink)?;
        Ok(())
    }
}

impl Iterator for CentralBinomials {
    type Item = Result<PadicFactored>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let out = self.current;
        if let Err(err) = self.advance() {
            self.failed = true;
            return Some(Err(err));
        }
        Some(Ok(out))
    }
}

pub fn central_binomial_stream(
    modulus: Modulus,
    max_k: u64,
) -> impl Iterator<Item = Result<PadicFactored>> {
    CentralBinomials::new(modulus).take(max_k as usize + 1)
}

/// `sum_{k=0}^{upper} weight(k) C(2k,k) ratio^k`.
fn weighted_central_sum(
    modulus: Modulus,
    upper: u64,
    ratio: ResidueClass,
    weight: WeightKind,
) -> Result<ResidueClass> {
    let p = modulus.prime();
    match weight {
        WeightKind::Inv2kMinus1 | WeightKind::Inv2kMinus1Sq if upper > (p - 1) / 2 => {
            return Err(Error::WeightDomain(format!(
                "1/(2k-1) needs upper <= (p-1)/2, got {upper} at p = {p}"
            )));
        }
        WeightKind::H2 if upper >= p => {
            return Err(Error::WeightDomain(format!(
                "H_k^(2) needs upper < p, got {upper} at p = {p}"
            )));
        }
        _ => {}
    }

    let mut acc = modulus.zero();
    let mut power = modulus.one();
    let mut h2 = modulus.zero();
    let mut binomials = CentralBinomials::new(modulus);
    for k in 0..=upper {
        let binom = binomials.next().expect("unbounded stream")?;
        let term = match weight {
            WeightKind::None => binom.to_residue(),
            WeightKind::Catalan => binom
                .div(&padic_normalize(k as i128 + 1, modulus)?)?
                .to_residue(),
            WeightKind::LinearK => {
                if k == 0 {
                    modulus.zero()
                } else {
                    binom
                        .mul(&padic_normalize(k as i128, modulus)?)?
                        .to_residue()
                }
            }
            WeightKind::Inv2kMinus1 => binom.to_residue() * inv_mod(2 * k as i128 - 1, modulus)?,
            WeightKind::Inv2kMinus1Sq => {
                let inv = inv_mod(2 * k as i128 - 1, modulus)?;
                binom.to_residue() * inv * inv
            }
            WeightKind::H2 => {
                if k > 0 {
                    let inv = inv_mod(k as i128, modulus)?;
                    h2 += inv * inv;
                }
                binom.to_residue() * h2
            }
        };
        acc += term * power;
        power *= ratio;
    }
    Ok(acc)
}

pub fn evaluate_sum(spec: &SumSpec) -> Result<ResidueClass> {
    let ratio = inv_mod(spec.base as i128, spec.modulus)?;
    weighted_central_sum(spec.modulus, spec.upper, ratio, spec.weight)
}

/// `sum_{k=0}^{upper} s^k weight(k) C(2k,k)`; the positive-power twin of [`evaluate_sum`].
pub fn signed_central_sum(
    sign_base: i64,
    upper: u64,
    modulus: Modulus,
    weight: WeightKind,
) -> Result<ResidueClass> {
    weighted_central_sum(modulus, upper, modulus.residue(sign_base as i128), weight)
}

/// `sum_{k=1}^{bound} (-1)^k / k`.
pub fn alternating_harmonic(bound: u64, modulus: Modulus) -> Result<ResidueClass> {
    let mut acc = modulus.zero();
    for k in 1..=bound {
        let inv = inv_mod(k as i128, modulus)?;
        if k % 2 == 0 {
            acc += inv;
        } else {
            acc -= inv;
        }
    }
    Ok(acc)
}

/// `sum_{k=1}^{p-1} (num/den)^k / k^2`.
pub fn power_over_square_sum(
    base_num: i64,
    base_den: i64,
    modulus: Modulus,
) -> Result<ResidueClass> {
    let ratio = modulus.residue(base_num as i128) * inv_mod(base_den as i128, modulus)?;
    let mut acc = modulus.zero();
    let mut power = modulus.one();
    for k in 1..modulus.prime() {
        power *= ratio;
        let inv = inv_mod(k as i128, modulus)?;
        acc += power * inv * inv;
    }
    Ok(acc)
}

/// `H_k^(2)` for `k = 0..=upto`, requiring `upto < p`.
pub fn harmonic2_table(modulus: Modulus, upto: u64) -> Result<Vec<ResidueClass>> {
    let mut table = Vec::with_capacity(upto as usize + 1);
    let mut h = modulus.zero();
    table.push(h);
    for k in 1..=upto {
        let inv = inv_mod(k as i128, modulus)?;
        h += inv * inv;
        table.push(h);
    }
    Ok(table)
}

/// `floor(num * x / den)` without floating point.
pub fn floor_fraction(num: u64, den: u64, x: u64) -> u64 {
    (num as u128 * x as u128 / den as u128) as u64
}

pub fn binomial_big(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `sum_{k=0}^{floor(n/2)} C(n-k, k) A^(n-2k) (-B)^k`, which equals `u_{n+1}(A, B)`.
pub fn exact_lagrange(params: LucasParams, n: u64) -> BigInt {
    let a = BigInt::from(params.a);
    let neg_b = BigInt::from(-(params.b as i128));
    (0..=n / 2)
        .map(|k| {
            binomial_big(n - k, k)
                * num_traits::pow(a.clone(), (n - 2 * k) as usize)
                * num_traits::pow(neg_b.clone(), k as usize)
        })
        .sum()
}

/// Both sides of `sum_{k<=n} (1 - (m-4)k/2) C(2k,k)/m^k = (2n+1) C(2n,n)/m^n`, multiplied
/// through by `2 m^n`.
pub fn exact_identity_41(m: i64, n: u64) -> (BigInt, BigInt) {
    debug_assert!(m != 0);
    let mb = BigInt::from(m);
    let lhs = (0..=n)
        .map(|k| {
            let coeff = BigInt::from(2) - (BigInt::from(m) - 4) * BigInt::from(k);
            coeff * binomial_big(2 * k, k) * num_traits::pow(mb.clone(), (n - k) as usize)
        })
        .sum();
    let rhs = BigInt::from(2 * (2 * n + 1)) * binomial_big(2 * n, n);
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(p: u64, e: u32) -> Modulus {
        Modulus::new(p, e).unwrap()
    }

    fn sum(base: i64, upper: u64, weight: WeightKind, m: Modulus) -> u64 {
        evaluate_sum(&SumSpec {
            base,
            upper,
            weight,
            modulus: m,
        })
        .unwrap()
        .value()
    }

    #[test]
    fn stream_examples() {
        let first = central_binomial_stream(md(5, 3), 0)
            .next()
            .unwrap()
            .unwrap();
        assert_eq!((first.valuation(), first.unit()), (0, 1));
        let c6_3 = central_binomial_stream(md(5, 3), 3)
            .last()
            .unwrap()
            .unwrap();
        assert_eq!((c6_3.valuation(), c6_3.unit()), (1, 4));
        let c10_5 = central_binomial_stream(md(3, 3), 5)
            .last()
            .unwrap()
            .unwrap();
        assert_eq!((c10_5.valuation(), c10_5.unit()), (2, 1));
        assert_eq!(central_binomial_stream(md(3, 3), 5).count(), 6);
    }

    #[test]
    fn evaluate_sum_examples() {
        assert_eq!(sum(-16, 1, WeightKind::None, md(3, 3)), 11);
        assert_eq!(sum(8, 2, WeightKind::None, md(5, 2)), 24);
        assert_eq!(sum(12345, 0, WeightKind::None, md(7, 2)), 1);
        assert_eq!(sum(16, 1, WeightKind::Catalan, md(3, 2)), 5);
        assert_eq!(sum(16, 2, WeightKind::Inv2kMinus1Sq, md(5, 2)), 12);
        assert_eq!(sum(2, 4, WeightKind::LinearK, md(5, 2)), 4);
    }

    #[test]
    fn evaluate_sum_errors() {
        let spec = SumSpec {
            base: 14,
            upper: 3,
            weight: WeightKind::None,
            modulus: md(7, 2),
        };
        assert!(matches!(
            evaluate_sum(&spec),
            Err(Error::NotInvertible { .. })
        ));
        let spec = SumSpec {
            base: 16,
            upper: 4,
            weight: WeightKind::Inv2kMinus1Sq,
            modulus: md(7, 2),
        };
        assert!(matches!(evaluate_sum(&spec), Err(Error::WeightDomain(_))));
        let spec = SumSpec {
            base: -1,
            upper: 7,
            weight: WeightKind::H2,
            modulus: md(7, 1),
        };
        assert!(matches!(evaluate_sum(&spec), Err(Error::WeightDomain(_))));
    }

    #[test]
    fn signed_sum_examples() {
        assert_eq!(
            signed_central_sum(-1, 2, md(3, 3), WeightKind::None)
                .unwrap()
                .value(),
            5
        );
        assert_eq!(
            signed_central_sum(-1, 2, md(3, 1), WeightKind::H2)
                .unwrap()
                .value(),
            1
        );
        assert_eq!(
            signed_central_sum(-2, 4, md(5, 1), WeightKind::H2)
                .unwrap()
                .value(),
            1
        );
    }

    #[test]
    fn catalan_past_half_prime_power() {
        // C_k = C(2k,k)/(k+1) is integral even when p | k+1
        let m = md(3, 4);
        let direct: i128 = [1i128, 1, 2, 5, 14, 42, 132, 429, 1430]
            .iter()
            .enumerate()
            .map(|(k, c)| c * inv_mod(7i128.pow(k as u32), m).unwrap().value() as i128)
            .sum();
        assert_eq!(sum(7, 8, WeightKind::Catalan, m), m.reduce(direct));
    }

    #[test]
    fn alternating_harmonic_examples() {
        assert_eq!(alternating_harmonic(2, md(3, 1)).unwrap().value(), 1);
        assert_eq!(alternating_harmonic(5, md(7, 1)).unwrap().value(), 4);
        assert_eq!(alternating_harmonic(0, md(7, 1)).unwrap().value(), 0);
        assert!(alternating_harmonic(7, md(7, 1)).is_err());
    }

    #[test]
    fn power_over_square_examples() {
        assert_eq!(power_over_square_sum(2, 1, md(3, 1)).unwrap().value(), 0);
        assert_eq!(power_over_square_sum(1, 1, md(5, 1)).unwrap().value(), 0);
        assert_eq!(power_over_square_sum(2, 1, md(7, 1)).unwrap().value(), 3);
        assert!(power_over_square_sum(1, 7, md(7, 1)).is_err());
    }

    #[test]
    fn lagrange_examples() {
        assert_eq!(exact_lagrange(LucasParams::FIBONACCI, 9), BigInt::from(55));
        assert_eq!(exact_lagrange(LucasParams::new(2, 1), 4), BigInt::from(5));
        assert_eq!(exact_lagrange(LucasParams::new(-7, 3), 0), BigInt::from(1));
    }

    #[test]
    fn identity_41_examples() {
        assert_eq!(
            exact_identity_41(2, 1),
            (BigInt::from(12), BigInt::from(12))
        );
        assert_eq!(
            exact_identity_41(16, 1),
            (BigInt::from(12), BigInt::from(12))
        );
        assert_eq!(exact_identity_41(-5, 0), (BigInt::from(2), BigInt::from(2)));
    }

    #[test]
    fn harmonic_table_vanishes_at_p_minus_one() {
        for p in [5u64, 7, 11, 13, 101] {
            let table = harmonic2_table(md(p, 1), p - 1).unwrap();
            assert!(table[(p - 1) as usize].is_zero(), "p = {p}");
        }
    }

    #[test]
    fn floor_fraction_is_integer_floor() {
        assert_eq!(floor_fraction(5, 6, 7), 5);
        assert_eq!(floor_fraction(4, 5, 125), 100);
        assert_eq!(floor_fraction(7, 10, 13), 9);
    }
}
