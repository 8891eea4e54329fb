use super::bitpoly::{limbs_degree, mask_limbs, shr_limbs, xor_shifted, BitPoly};
use super::clmul::{clmul, clmul_cost, Backend};
use super::field::FieldSpec;
use super::opcount::OpCount;
use crate::error::{precondition, Result};

/// `p mod modulus`, as a `lambda`-bit polynomial.
///
/// Each coefficient slot at or above `lambda` is folded into the
/// `weight − 1` low terms of the modulus: two XORs per slot for a trinomial,
/// four for a pentanomial.
pub fn reduce(p: &BitPoly, spec: &FieldSpec) -> Result<(BitPoly, OpCount)> {
    let lambda = spec.lambda();
    if p.nbits() > 2 * lambda {
        return Err(precondition(format!(
            "reduce: {}-bit operand exceeds 2·lambda = {}",
            p.nbits(),
            2 * lambda
        )));
    }
    let cost = reduce_cost(p.nbits(), spec);
    let mut limbs = p.limbs().to_vec();
    reduce_in_place(&mut limbs, lambda, spec.low_exponents());
    Ok((BitPoly::from_limbs_masked(limbs, lambda), cost))
}

pub fn reduce_cost(nbits: usize, spec: &FieldSpec) -> OpCount {
    let slots = nbits.saturating_sub(spec.lambda()) as u64;
    OpCount::xors(slots * spec.low_exponents().len() as u64)
}

/// Reduces `limbs` modulo `x^lambda + sum(x^e for e in low)` in place.
pub(crate) fn reduce_in_place(limbs: &mut [u64], lambda: usize, low: &[usize]) {
    if low.first().is_some_and(|&top| lambda - top >= 64) {
        return fold_words(limbs, lambda, low);
    }
    while let Some(d) = limbs_degree(limbs) {
        if d < lambda {
            break;
        }
        let mut high = shr_limbs(limbs, lambda);
        high.truncate((d - lambda) / 64 + 1);
        mask_limbs(limbs, lambda);
        for &e in low {
            xor_shifted(limbs, &high, e);
        }
    }
}

/// Single top-down pass, one word at a time. Requires every low exponent to
/// sit at least 64 below `lambda`, so a folded word never lands on itself.
fn fold_words(limbs: &mut [u64], lambda: usize, low: &[usize]) {
    let first = lambda / 64;
    for i in (first..limbs.len()).rev() {
        let mut w = limbs[i];
        if 64 * i < lambda {
            w &= !0u64 << (lambda - 64 * i);
        }
        if w == 0 {
            continue;
        }
        limbs[i] ^= w;
        for &e in low {
            let off = (64 * i + e) as isize - lambda as isize;
            if off < 0 {
                limbs[0] ^= w >> (-off);
            } else {
                let (q, s) = (off as usize / 64, off as usize % 64);
                limbs[q] ^= w << s;
                if s != 0 {
                    limbs[q + 1] ^= w >> (64 - s);
                }
            }
        }
    }
}

/// Product in GF(2^lambda). Operands must have degree below `lambda`.
pub fn gf_mul(a: &BitPoly, b: &BitPoly, spec: &FieldSpec, backend: Backend) -> Result<(BitPoly, OpCount)> {
    let lambda = spec.lambda();
    let a = embed(a, lambda)?;
    let b = embed(b, lambda)?;
    let (prod, mul_cost) = clmul(&a, &b, backend);
    // the top slot of a λ×λ product is structurally zero
    let prod = prod.truncated(2 * lambda - 1);
    let (rem, red_cost) = reduce(&prod, spec)?;
    Ok((rem, mul_cost + red_cost))
}

/// Cost of one [`gf_mul`] in `spec`'s field.
pub fn gf_mul_cost(spec: &FieldSpec, backend: Backend) -> OpCount {
    let lambda = spec.lambda();
    clmul_cost(lambda, lambda, backend) + reduce_cost(2 * lambda - 1, spec)
}

/// Field addition: coefficient-wise XOR of two `lambda`-bit elements.
pub fn gf_add(a: &BitPoly, b: &BitPoly, spec: &FieldSpec) -> Result<BitPoly> {
    let lambda = spec.lambda();
    embed(a, lambda)?.xor(&embed(b, lambda)?)
}

/// Re-declares `a` as a `lambda`-bit field element.
pub(crate) fn embed(a: &BitPoly, lambda: usize) -> Result<BitPoly> {
    match a.degree() {
        Some(d) if d >= lambda => Err(precondition(format!(
            "operand of degree {d} is not an element of GF(2^{lambda})"
        ))),
        _ if a.nbits() <= lambda => a.zero_extend(lambda),
        _ => Ok(a.truncated(lambda)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::field::find_irreducible;

    fn spec3() -> FieldSpec {
        FieldSpec::from_modulus(BitPoly::from_u64(0b1011, 4)).unwrap()
    }

    #[test]
    fn already_reduced_is_free() {
        let spec = spec3();
        let p = BitPoly::from_u64(0b101, 3);
        let (r, c) = reduce(&p, &spec).unwrap();
        assert_eq!(r, p);
        assert_eq!(c, OpCount::ZERO);
    }

    #[test]
    fn x_to_the_2m_reduces_to_x_m_plus_one() {
        // m = 3: x^6 mod (x^6 + x^3 + 1) = x^3 + 1
        let spec = find_irreducible(6);
        assert_eq!(spec.modulus(), &BitPoly::from_u64(0b1001001, 7));
        let p = BitPoly::from_exponents(&[6], 7);
        let (r, c) = reduce(&p, &spec).unwrap();
        assert_eq!(r, BitPoly::from_u64(0b1001, 6));
        assert_eq!(c.xors, 2);
        assert_eq!(c.ands, 0);
    }

    #[test]
    fn overlong_operand_rejected() {
        let spec = spec3();
        assert!(reduce(&BitPoly::zero(7), &spec).is_err());
    }

    #[test]
    fn x_squared_times_x_in_gf8() {
        let spec = spec3();
        let x2 = BitPoly::from_u64(0b100, 3);
        let x = BitPoly::from_u64(0b010, 3);
        let (c, _) = gf_mul(&x2, &x, &spec, Backend::Schoolbook).unwrap();
        assert_eq!(c, BitPoly::from_u64(0b011, 3));
    }

    #[test]
    fn gf_mul_rejects_out_of_field_operand() {
        let spec = spec3();
        let big = BitPoly::from_u64(0b1000, 4);
        let one = BitPoly::one(3);
        assert!(gf_mul(&big, &one, &spec, Backend::Karatsuba).is_err());
        // a wider declaration with small degree is fine
        let wide = BitPoly::from_u64(0b11, 10);
        assert!(gf_mul(&wide, &one, &spec, Backend::Karatsuba).is_ok());
    }

    #[test]
    fn word_fold_matches_generic_loop() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for (lambda, low) in [(128usize, vec![7usize, 2, 1, 0]), (200, vec![9, 0]), (77, vec![6, 5, 2, 0]), (131, vec![66, 0])] {
            for _ in 0..50 {
                let p = BitPoly::random(2 * lambda - 1, &mut rng);
                let mut fast = p.limbs().to_vec();
                reduce_in_place(&mut fast, lambda, &low);
                // plain bitwise long division
                let mut slow: Vec<bool> = (0..p.nbits()).map(|i| p.bit(i)).collect();
                for d in (lambda..slow.len()).rev() {
                    if slow[d] {
                        slow[d] = false;
                        for &e in &low {
                            slow[d - lambda + e] ^= true;
                        }
                    }
                }
                let want = BitPoly::from_exponents(&(0..lambda).filter(|&i| slow[i]).collect::<Vec<_>>(), lambda);
                assert_eq!(BitPoly::from_limbs_masked(fast, lambda), want);
            }
        }
    }

    #[test]
    fn pentanomial_costs_four_xors_per_slot() {
        let spec = find_irreducible(8);
        assert_eq!(spec.weight(), 5);
        assert_eq!(reduce_cost(15, &spec).xors, 4 * 7);
    }
}
