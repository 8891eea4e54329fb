//! Bit-serial "counting mode" executions.
//!
//! Every AND and XOR on individual coefficients is tallied as it happens.
//! These routines are slow and exist to pin the analytic counts reported by
//! the word-parallel paths; only slots that already hold a value cost an XOR
//! when another term is accumulated into them.

use super::bitpoly::BitPoly;
use super::clmul::{fifths, significant_len, square_split, Backend, Split, FIVE_WAY_OUTPUTS, FIVE_WAY_SUBSETS};
use super::field::FieldSpec;
use super::opcount::OpCount;
use crate::error::{precondition, Result};

/// Bit-serial product with an exact running tally.
pub fn clmul_counted(a: &BitPoly, b: &BitPoly, backend: Backend) -> (BitPoly, OpCount) {
    let av = to_bits(a);
    let bv = to_bits(b);
    let mut ops = OpCount::ZERO;
    let prod = match backend {
        Backend::Schoolbook => schoolbook(&av, &bv, &mut ops),
        Backend::Karatsuba => karatsuba(&av, &bv, &mut ops),
    };
    (from_bits(&prod, a.nbits() + b.nbits()), ops)
}

/// Top-down sparse-modulus reduction, one coefficient at a time.
pub fn reduce_counted(p: &BitPoly, spec: &FieldSpec) -> Result<(BitPoly, OpCount)> {
    let lambda = spec.lambda();
    if p.nbits() > 2 * lambda {
        return Err(precondition("operand longer than 2·lambda"));
    }
    let mut c = to_bits(p);
    let mut ops = OpCount::ZERO;
    for d in (lambda..c.len()).rev() {
        for &e in spec.low_exponents() {
            c[d - lambda + e] ^= c[d];
            ops.xors += 1;
        }
        c[d] = false;
    }
    c.truncate(lambda.min(c.len()));
    Ok((from_bits(&c, lambda), ops))
}

fn to_bits(p: &BitPoly) -> Vec<bool> {
    (0..p.nbits()).map(|i| p.bit(i)).collect()
}

fn from_bits(bits: &[bool], nbits: usize) -> BitPoly {
    let mut p = BitPoly::zero(nbits);
    for (i, &b) in bits.iter().enumerate() {
        if b {
            p.set_bit(i, true);
        }
    }
    p
}

/// Accumulates `src` at `offset` into `dst`, growing it as needed.
/// `written[i]` tracks which slots already hold a value.
fn place(dst: &mut Vec<bool>, written: &mut Vec<bool>, src: &[bool], offset: usize, ops: &mut OpCount) {
    let need = offset + src.len();
    if dst.len() < need {
        dst.resize(need, false);
        written.resize(need, false);
    }
    for (i, &s) in src.iter().enumerate() {
        let k = offset + i;
        if written[k] {
            dst[k] ^= s;
            ops.xors += 1;
        } else {
            dst[k] = s;
            written[k] = true;
        }
    }
}

fn schoolbook(a: &[bool], b: &[bool], ops: &mut OpCount) -> Vec<bool> {
    let len = significant_len(a.len(), b.len());
    let mut out = Vec::with_capacity(len);
    let mut written = Vec::with_capacity(len);
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            let t = ai & bj;
            ops.ands += 1;
            place(&mut out, &mut written, &[t], i + j, ops);
        }
    }
    out
}

fn karatsuba(a: &[bool], b: &[bool], ops: &mut OpCount) -> Vec<bool> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len() == 1 || b.len() == 1 {
        return schoolbook(a, b, ops);
    }
    if a.len() == b.len() && square_split(a.len()) == Split::Fifths {
        return karatsuba_fifths(a, b, ops);
    }
    let h = a.len().max(b.len()).div_ceil(2);
    let (a0, a1) = a.split_at(h.min(a.len()));
    let (b0, b1) = b.split_at(h.min(b.len()));

    let p0 = karatsuba(a0, b0, ops);
    let p2 = karatsuba(a1, b1, ops);

    let sum = |lo: &[bool], hi: &[bool], ops: &mut OpCount| {
        let mut s = lo.to_vec();
        let mut w = vec![true; lo.len()];
        place(&mut s, &mut w, hi, 0, ops);
        s
    };
    let sa = sum(a0, a1, ops);
    let sb = sum(b0, b1, ops);
    let p1 = karatsuba(&sa, &sb, ops);

    let mut mid = p1.clone();
    let mut mw = vec![true; mid.len()];
    place(&mut mid, &mut mw, &p0, 0, ops);
    place(&mut mid, &mut mw, &p2, 0, ops);

    let mut out = Vec::new();
    let mut written = Vec::new();
    place(&mut out, &mut written, &p0, 0, ops);
    place(&mut out, &mut written, &p2, 2 * h, ops);
    place(&mut out, &mut written, &mid, h, ops);
    // slots between p0 and p2 that nothing touched are zero
    out.truncate(significant_len(a.len(), b.len()));
    out
}

/// Thirteen products of sums of the five operand parts.
fn karatsuba_fifths(a: &[bool], b: &[bool], ops: &mut OpCount) -> Vec<bool> {
    let parts = fifths(a.len()).expect("split chosen only when all parts are nonempty");
    let p = parts[0];
    let piece = |x: &[bool], i: usize| x[i * p..i * p + parts[i]].to_vec();
    let subset_sum = |x: &[bool], mask: u8, ops: &mut OpCount| {
        let mut s = Vec::new();
        let mut w = Vec::new();
        for i in (0..5).filter(|i| mask >> i & 1 == 1) {
            place(&mut s, &mut w, &piece(x, i), 0, ops);
        }
        s
    };
    let products: Vec<Vec<bool>> = FIVE_WAY_SUBSETS
        .iter()
        .map(|&mask| {
            let sa = subset_sum(a, mask, ops);
            let sb = subset_sum(b, mask, ops);
            karatsuba(&sa, &sb, ops)
        })
        .collect();
    let mut out = Vec::new();
    let mut written = Vec::new();
    for (k, terms) in FIVE_WAY_OUTPUTS.iter().enumerate() {
        let mut c = Vec::new();
        let mut cw = Vec::new();
        for &j in terms.iter() {
            place(&mut c, &mut cw, &products[j], 0, ops);
        }
        place(&mut out, &mut written, &c, k * p, ops);
    }
    out.truncate(significant_len(a.len(), b.len()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::clmul::{clmul, clmul_cost};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn square_sizes_cover_both_splits() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut fifths_seen = 0;
        for n in 2..=90 {
            if crate::gf2::clmul::square_split(n) == Split::Fifths {
                fifths_seen += 1;
            }
            let a = BitPoly::random(n, &mut rng);
            let b = BitPoly::random(n, &mut rng);
            let (slow, counted) = clmul_counted(&a, &b, Backend::Karatsuba);
            let (fast, analytic) = clmul(&a, &b, Backend::Karatsuba);
            assert_eq!(slow, fast, "{n}x{n}");
            assert_eq!(counted, analytic, "{n}x{n}");
        }
        assert!(fifths_seen > 10);
    }

    #[test]
    fn counted_products_match_fast_products_and_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for na in 0..40 {
            for nb in [0usize, 1, 2, 3, 7, 16, 31, 40] {
                let a = BitPoly::random(na, &mut rng);
                let b = BitPoly::random(nb, &mut rng);
                for backend in Backend::ALL {
                    let (slow, counted) = clmul_counted(&a, &b, backend);
                    let (fast, analytic) = clmul(&a, &b, backend);
                    assert_eq!(slow, fast, "{backend} {na}x{nb}");
                    assert_eq!(counted, analytic, "{backend} {na}x{nb}");
                    assert_eq!(analytic, clmul_cost(na, nb, backend));
                }
            }
        }
    }

    #[test]
    fn counted_costs_are_data_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for backend in Backend::ALL {
            let z = BitPoly::zero(45);
            let (_, c0) = clmul_counted(&z, &z, backend);
            let a = BitPoly::random(45, &mut rng);
            let b = BitPoly::random(45, &mut rng);
            let (_, c1) = clmul_counted(&a, &b, backend);
            assert_eq!(c0, c1);
        }
    }
}
