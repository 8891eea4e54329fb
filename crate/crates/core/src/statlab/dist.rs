use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{precondition, Result};

/// Finite distribution over `nbits`-bit strings with exact rational
/// probabilities `weight / total`. Zero-weight outcomes are not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    nbits: usize,
    weights: BTreeMap<u64, u128>,
    total: u128,
}

impl Distribution {
    /// Accumulates repeated outcomes; drops zero weights.
    pub fn from_weights(nbits: usize, pairs: impl IntoIterator<Item = (u64, u128)>) -> Result<Self> {
        if nbits > 64 {
            return Err(precondition("outcomes are limited to 64 bits"));
        }
        let mut weights = BTreeMap::new();
        let mut total: u128 = 0;
        for (x, w) in pairs {
            if nbits < 64 && x >> nbits != 0 {
                return Err(precondition(format!("outcome {x:#x} exceeds {nbits} bits")));
            }
            if w == 0 {
                continue;
            }
            let slot = weights.entry(x).or_insert(0u128);
            *slot = slot.checked_add(w).ok_or_else(|| precondition("weight overflow"))?;
            total = total.checked_add(w).ok_or_else(|| precondition("weight overflow"))?;
        }
        if total == 0 {
            return Err(precondition("empty support"));
        }
        Ok(Distribution { nbits, weights, total })
    }

    pub fn nbits(&self) -> usize {
        self.nbits
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// `(outcome, weight)` pairs in increasing outcome order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u128)> + '_ {
        self.weights.iter().map(|(&x, &w)| (x, w))
    }

    pub fn weight(&self, x: u64) -> u128 {
        self.weights.get(&x).copied().unwrap_or(0)
    }

    pub fn prob(&self, x: u64) -> BigRational {
        ratio(self.weight(x), self.total)
    }

    pub fn max_weight(&self) -> u128 {
        self.weights.values().copied().max().unwrap_or(0)
    }

    /// Image under an injective relabelling of outcomes.
    pub fn relabel(&self, nbits: usize, f: impl Fn(u64) -> u64) -> Result<Self> {
        let d = Distribution::from_weights(nbits, self.iter().map(|(x, w)| (f(x), w)))?;
        if d.support_len() != self.support_len() {
            return Err(precondition("relabelling is not injective on the support"));
        }
        Ok(d)
    }

    /// Marginal on the `len` bits starting at `start`.
    pub fn marginal(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.nbits {
            return Err(precondition("marginal window exceeds outcome width"));
        }
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        Distribution::from_weights(len, self.iter().map(|(x, w)| ((x >> start) & mask, w)))
    }
}

pub(crate) fn ratio(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `Σ p(x)²`, exactly.
pub fn collision_probability(d: &Distribution) -> BigRational {
    let sum: BigUint = d.iter().map(|(_, w)| BigUint::from(w) * BigUint::from(w)).sum();
    let t = BigUint::from(d.total);
    BigRational::new(sum.into(), (&t * &t).into())
}

/// `−log2 max_x p(x)`.
pub fn min_entropy(d: &Distribution) -> f64 {
    log2_u(&BigUint::from(d.total)) - log2_u(&BigUint::from(d.max_weight()))
}

/// `−log2 Σ p(x)²`.
pub fn collision_entropy(d: &Distribution) -> f64 {
    -log2_ratio(&collision_probability(d))
}

/// `log2` of a positive big integer, accurate for values beyond `f64` range.
fn log2_u(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite").log2();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("finite").log2() + shift as f64
}

pub(crate) fn log2_ratio(r: &BigRational) -> f64 {
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    log2_u(num) - log2_u(den)
}

/// `½ Σ |p1(x) − p2(x)|` over the union of supports.
pub fn statistical_distance(d1: &Distribution, d2: &Distribution) -> Result<BigRational> {
    if d1.nbits != d2.nbits {
        return Err(precondition("distributions live on different outcome widths"));
    }
    let (t1, t2) = (BigInt::from(d1.total), BigInt::from(d2.total));
    let mut acc = BigInt::zero();
    let mut keys: Vec<u64> = d1.weights.keys().chain(d2.weights.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    for x in keys {
        let diff = BigInt::from(d1.weight(x)) * &t2 - BigInt::from(d2.weight(x)) * &t1;
        acc += diff.abs();
    }
    Ok(BigRational::new(acc, BigInt::from(2) * t1 * t2))
}

/// Distance from `d` to the uniform distribution on all `2^nbits` outcomes,
/// without materialising the uniform distribution.
pub fn distance_to_uniform(d: &Distribution) -> BigRational {
    let space = BigInt::from(1u8) << d.nbits;
    let t = BigInt::from(d.total);
    let mut acc = BigInt::zero();
    for (_, w) in d.iter() {
        acc += (BigInt::from(w) * &space - &t).abs();
    }
    let unseen = &space - BigInt::from(d.support_len());
    acc += unseen * &t;
    BigRational::new(acc, BigInt::from(2) * t * space)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(nbits: usize, pairs: &[(u64, u128)]) -> Distribution {
        Distribution::from_weights(nbits, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn half_quarter_quarter() {
        let x = d(2, &[(0, 2), (1, 1), (2, 1)]);
        assert!((min_entropy(&x) - 1.0).abs() < 1e-15);
        assert_eq!(collision_probability(&x), ratio(3, 8));
        assert!((collision_entropy(&x) - (8.0f64 / 3.0).log2()).abs() < 1e-15);
    }

    #[test]
    fn distances() {
        let a = d(1, &[(0, 1)]);
        let b = d(1, &[(1, 1)]);
        assert_eq!(statistical_distance(&a, &a).unwrap(), ratio(0, 1));
        assert_eq!(statistical_distance(&a, &b).unwrap(), ratio(1, 1));
        let u = d(1, &[(0, 1), (1, 1)]);
        let skew = d(1, &[(0, 3), (1, 1)]);
        assert_eq!(statistical_distance(&u, &skew).unwrap(), ratio(1, 4));
        assert_eq!(distance_to_uniform(&skew), ratio(1, 4));
        assert_eq!(distance_to_uniform(&a), ratio(1, 2));
    }

    #[test]
    fn rejects_empty_and_wide() {
        assert!(Distribution::from_weights(3, [(0, 0)]).is_err());
        assert!(Distribution::from_weights(3, [(8, 1)]).is_err());
        assert!(Distribution::from_weights(65, [(0, 1)]).is_err());
    }

    #[test]
    fn duplicates_accumulate() {
        let x = d(2, &[(1, 1), (1, 1), (3, 2)]);
        assert_eq!(x.support_len(), 2);
        assert_eq!(x.prob(1), ratio(1, 2));
    }

    #[test]
    fn log2_of_huge_integers() {
        let x = BigUint::from(3u8) << 2000u32;
        assert!((log2_u(&x) - (2000.0 + 3f64.log2())).abs() < 1e-9);
    }
}
