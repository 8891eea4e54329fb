//! Carry-less (GF(2)[x]) multiplication.
//!
//! Products are computed word-parallel. The reported [`OpCount`] is the
//! number of bit operations the bit-serial form of the same backend performs
//! (see [`super::counting`]), obtained from the backend's cost recurrence.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{LazyLock, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use super::bitpoly::BitPoly;
use super::opcount::OpCount;
use crate::error::Error;

/// Multiplication algorithm. All backends produce identical products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Schoolbook,
    Karatsuba,
}

impl Backend {
    pub const ALL: [Backend; 2] = [Backend::Schoolbook, Backend::Karatsuba];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Schoolbook => "schoolbook",
            Backend::Karatsuba => "karatsuba",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "schoolbook" => Ok(Backend::Schoolbook),
            "karatsuba" => Ok(Backend::Karatsuba),
            "schonhage" | "schonhage-ternary" | "schonhageternary" => Err(Error::Config(
                "the ternary Schönhage backend is not built in this release".into(),
            )),
            other => Err(Error::Config(format!("unknown multiplication backend `{other}`"))),
        }
    }
}

/// Carry-less product `a·b`; the result has `a.nbits() + b.nbits()` slots.
pub fn clmul(a: &BitPoly, b: &BitPoly, backend: Backend) -> (BitPoly, OpCount) {
    let nbits = a.nbits() + b.nbits();
    let cost = clmul_cost(a.nbits(), b.nbits(), backend);
    let mut out = vec![0u64; nbits.div_ceil(64)];
    if !a.limbs().is_empty() && !b.limbs().is_empty() {
        let (la, lb) = (a.limbs(), b.limbs());
        let mut full = vec![0u64; la.len() + lb.len()];
        match backend {
            Backend::Schoolbook => schoolbook_limbs(la, lb, &mut full),
            Backend::Karatsuba => karatsuba_top(la, lb, &mut full),
        }
        let keep = out.len();
        out.copy_from_slice(&full[..keep]);
    }
    (BitPoly::from_limbs_masked(out, nbits), cost)
}

/// Number of coefficient slots a bit-serial product of `na`- and `nb`-bit operands fills.
#[inline]
pub(crate) fn significant_len(na: usize, nb: usize) -> usize {
    if na == 0 || nb == 0 {
        0
    } else {
        na + nb - 1
    }
}

/// Bit operations a bit-serial run of `backend` performs on `na`×`nb` operands.
pub fn clmul_cost(na: usize, nb: usize, backend: Backend) -> OpCount {
    match backend {
        Backend::Schoolbook => schoolbook_cost(na, nb),
        Backend::Karatsuba => {
            static CACHE: LazyLock<RwLock<HashMap<(usize, usize), OpCount>>> = LazyLock::new(Default::default);
            if let Some(&c) = CACHE.read().expect("cost cache poisoned").get(&(na, nb)) {
                return c;
            }
            let c = karatsuba_cost(na, nb, &mut HashMap::new());
            CACHE.write().expect("cost cache poisoned").insert((na, nb), c);
            c
        }
    }
}

fn schoolbook_cost(na: usize, nb: usize) -> OpCount {
    let terms = (na * nb) as u64;
    OpCount::new(terms, terms - significant_len(na, nb) as u64)
}

#[inline]
fn overlap(a: (usize, usize), b: (usize, usize)) -> usize {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    hi.saturating_sub(lo)
}

/// Subsets of the five operand parts whose sums are multiplied in the
/// 13-product five-term formula, as bitmasks over parts `0..5`.
pub(crate) const FIVE_WAY_SUBSETS: [u8; 13] = [
    0b00001, 0b00010, 0b00011, 0b00100, 0b00101, 0b01000, 0b01110, 0b10000, 0b10100, 0b10111, 0b11000, 0b11101, 0b11111,
];

/// Output part `k` of the five-term formula is the sum of these products.
pub(crate) const FIVE_WAY_OUTPUTS: [&[usize]; 9] = [
    &[0],
    &[0, 1, 2],
    &[0, 1, 3, 4],
    &[1, 3, 5, 6, 7, 9, 10, 12],
    &[4, 8, 9, 11, 12],
    &[0, 1, 2, 3, 5, 6, 11, 12],
    &[3, 5, 7, 8],
    &[5, 7, 10],
    &[7],
];

/// How the bit-serial Karatsuba splits a square `n`×`n` product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Split {
    Halves,
    /// Five parts of `ceil(n/5)` bits (the last one shorter).
    Fifths,
}

/// Part lengths for a five-way split of `n`, if every part is nonempty.
pub(crate) fn fifths(n: usize) -> Option<[usize; 5]> {
    let p = n.div_ceil(5);
    (n > 4 * p).then(|| [p, p, p, p, n - 4 * p])
}

/// Split chosen for square operands: fifths only when that is strictly
/// cheaper in (ANDs, XORs).
pub(crate) fn square_split(n: usize) -> Split {
    let mut memo = HashMap::new();
    karatsuba_cost(n, n, &mut memo);
    split_choice(n, &mut memo)
}

fn split_choice(n: usize, memo: &mut HashMap<(usize, usize), OpCount>) -> Split {
    match fifths(n) {
        Some(parts) if n > 1 && cost_key(fifths_cost(parts, memo)) < cost_key(halves_cost(n, n, memo)) => Split::Fifths,
        _ => Split::Halves,
    }
}

fn cost_key(c: OpCount) -> (u64, u64) {
    (c.ands, c.xors)
}

/// Recurrence for the bit-serial Karatsuba of [`super::counting`].
fn karatsuba_cost(na: usize, nb: usize, memo: &mut HashMap<(usize, usize), OpCount>) -> OpCount {
    if na == 0 || nb == 0 {
        return OpCount::ZERO;
    }
    if na == 1 || nb == 1 {
        return schoolbook_cost(na, nb);
    }
    if let Some(&c) = memo.get(&(na, nb)) {
        return c;
    }
    let mut c = halves_cost(na, nb, memo);
    if na == nb {
        if let Some(parts) = fifths(na) {
            let f = fifths_cost(parts, memo);
            if cost_key(f) < cost_key(c) {
                c = f;
            }
        }
    }
    memo.insert((na, nb), c);
    c
}

fn halves_cost(na: usize, nb: usize, memo: &mut HashMap<(usize, usize), OpCount>) -> OpCount {
    let h = na.max(nb).div_ceil(2);
    let (a0, b0) = (h.min(na), h.min(nb));
    let (a1, b1) = (na - a0, nb - b0);
    let low = karatsuba_cost(a0, b0, memo);
    let high = karatsuba_cost(a1, b1, memo);
    let (l0, l2) = (significant_len(a0, b0), significant_len(a1, b1));
    // operand sums, then middle = p1 + p0 + p2 (all aligned at 0, l1 = l0 >= l2)
    let mut xors = (a1 + b1) as u64 + l0 as u64 + l0.min(l2) as u64;
    // recombination: only slots already written cost an XOR
    let mid = (h, h + l0.max(l2));
    xors += overlap(mid, (0, l0)) as u64 + overlap(mid, (2 * h, 2 * h + l2)) as u64;
    low + low + high + OpCount::xors(xors)
}

fn fifths_cost(parts: [usize; 5], memo: &mut HashMap<(usize, usize), OpCount>) -> OpCount {
    let mut total = OpCount::ZERO;
    let mut prod_len = [0usize; 13];
    for (j, &mask) in FIVE_WAY_SUBSETS.iter().enumerate() {
        let members: Vec<usize> = (0..5).filter(|i| mask >> i & 1 == 1).collect();
        // parts are nonincreasing, so the first member is the longest
        let len = parts[members[0]];
        let adds: usize = members[1..].iter().map(|&i| parts[i]).sum();
        total += OpCount::xors(2 * adds as u64) + karatsuba_cost(len, len, memo);
        prod_len[j] = significant_len(len, len);
    }
    let p = parts[0];
    let mut written: Vec<(usize, usize)> = Vec::new();
    for (k, terms) in FIVE_WAY_OUTPUTS.iter().enumerate() {
        let mut reach = 0;
        for &j in terms.iter() {
            total += OpCount::xors(prod_len[j].min(reach) as u64);
            reach = reach.max(prod_len[j]);
        }
        let span = (k * p, k * p + reach);
        total += OpCount::xors(written.iter().map(|&w| overlap(span, w)).sum::<usize>() as u64);
        written.push(span);
        merge_intervals(&mut written);
    }
    total
}

/// Coalesces overlapping or touching intervals.
fn merge_intervals(v: &mut Vec<(usize, usize)>) {
    v.sort_unstable();
    let mut out: Vec<(usize, usize)> = Vec::with_capacity(v.len());
    for &(lo, hi) in v.iter() {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    *v = out;
}

// ---------------------------------------------------------------------------
// word-parallel kernels

const KARATSUBA_CUTOFF_LIMBS: usize = 16;

type Kernel = fn(&[u64], &[u64], &mut [u64]);

fn kernel() -> Kernel {
    static K: OnceLock<Kernel> = OnceLock::new();
    *K.get_or_init(|| {
        #[cfg(target_arch = "x86_64")]
        {
            if std::arch::is_x86_feature_detected!("pclmulqdq") {
                return schoolbook_pclmul;
            }
        }
        schoolbook_portable
    })
}

/// Whether word products use the `pclmulqdq` instruction.
pub fn hardware_clmul() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("pclmulqdq")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

/// `out ^= a·b`, `out.len() >= a.len() + b.len()`.
pub(crate) fn schoolbook_limbs(a: &[u64], b: &[u64], out: &mut [u64]) {
    kernel()(a, b, out)
}

fn schoolbook_portable(a: &[u64], b: &[u64], out: &mut [u64]) {
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let table = window_table(ai);
        for (j, &bj) in b.iter().enumerate() {
            let p = clmul64_table(&table, bj);
            out[i + j] ^= p as u64;
            out[i + j + 1] ^= (p >> 64) as u64;
        }
    }
}

fn window_table(a: u64) -> [u128; 16] {
    let mut t = [0u128; 16];
    let a = a as u128;
    for i in 1..16 {
        t[i] = if i % 2 == 0 { t[i / 2] << 1 } else { t[i - 1] ^ a };
    }
    t
}

#[inline]
fn clmul64_table(table: &[u128; 16], b: u64) -> u128 {
    let mut r = 0u128;
    for k in (0..16).rev() {
        r = (r << 4) ^ table[((b >> (4 * k)) & 15) as usize];
    }
    r
}

/// Portable 64×64 carry-less product.
#[cfg(test)]
pub(crate) fn clmul64(a: u64, b: u64) -> u128 {
    clmul64_table(&window_table(a), b)
}

#[cfg(target_arch = "x86_64")]
fn schoolbook_pclmul(a: &[u64], b: &[u64], out: &mut [u64]) {
    // SAFETY: only selected after runtime detection of pclmulqdq.
    unsafe { schoolbook_pclmul_impl(a, b, out) }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq,sse2")]
unsafe fn schoolbook_pclmul_impl(a: &[u64], b: &[u64], out: &mut [u64]) {
    use std::arch::x86_64::*;
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let va = _mm_set_epi64x(0, ai as i64);
        for (j, &bj) in b.iter().enumerate() {
            let vb = _mm_set_epi64x(0, bj as i64);
            let p = _mm_clmulepi64_si128(va, vb, 0x00);
            out[i + j] ^= _mm_cvtsi128_si64(p) as u64;
            out[i + j + 1] ^= _mm_cvtsi128_si64(_mm_unpackhi_epi64(p, p)) as u64;
        }
    }
}

fn karatsuba_top(a: &[u64], b: &[u64], out: &mut [u64]) {
    if a.len().min(b.len()) < KARATSUBA_CUTOFF_LIMBS {
        return schoolbook_limbs(a, b, out);
    }
    if a.len() == b.len() {
        return karatsuba_limbs(a, b, out);
    }
    let n = a.len().max(b.len());
    let mut pa = a.to_vec();
    let mut pb = b.to_vec();
    pa.resize(n, 0);
    pb.resize(n, 0);
    let mut full = vec![0u64; 2 * n];
    karatsuba_limbs(&pa, &pb, &mut full);
    let keep = out.len();
    for (o, f) in out.iter_mut().zip(&full[..keep]) {
        *o ^= f;
    }
}

/// `out ^= a·b` for equal-length operands; `out.len() == 2n`.
fn karatsuba_limbs(a: &[u64], b: &[u64], out: &mut [u64]) {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    if n < KARATSUBA_CUTOFF_LIMBS {
        return schoolbook_limbs(a, b, out);
    }
    let h = n.div_ceil(2);
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);

    let mut p0 = vec![0u64; 2 * h];
    karatsuba_limbs(a0, b0, &mut p0);
    let mut p2 = vec![0u64; 2 * (n - h)];
    karatsuba_limbs(a1, b1, &mut p2);

    let mut sa = a0.to_vec();
    let mut sb = b0.to_vec();
    for (s, x) in sa.iter_mut().zip(a1) {
        *s ^= x;
    }
    for (s, x) in sb.iter_mut().zip(b1) {
        *s ^= x;
    }
    let mut p1 = vec![0u64; 2 * h];
    karatsuba_limbs(&sa, &sb, &mut p1);

    for (m, x) in p1.iter_mut().zip(&p0) {
        *m ^= x;
    }
    for (m, x) in p1.iter_mut().zip(&p2) {
        *m ^= x;
    }
    for (o, x) in out.iter_mut().zip(&p0) {
        *o ^= x;
    }
    for (o, x) in out[2 * h..].iter_mut().zip(&p2) {
        *o ^= x;
    }
    for (o, x) in out[h..].iter_mut().zip(&p1) {
        *o ^= x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn squaring_spreads_coefficients() {
        let a = BitPoly::from_u64(0b011, 3);
        for backend in Backend::ALL {
            let (p, _) = clmul(&a, &a, backend);
            assert_eq!(p, BitPoly::from_u64(0b101, 6));
        }
    }

    #[test]
    fn zero_annihilates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = BitPoly::random(64, &mut rng);
        let z = BitPoly::zero(64);
        for backend in Backend::ALL {
            let (p, _) = clmul(&a, &z, backend);
            assert!(p.is_zero());
            assert_eq!(p.nbits(), 128);
        }
    }

    #[test]
    fn empty_operands_are_legal() {
        let a = BitPoly::zero(0);
        let b = BitPoly::from_u64(5, 3);
        let (p, c) = clmul(&a, &b, Backend::Karatsuba);
        assert_eq!(p.nbits(), 3);
        assert_eq!(c, OpCount::ZERO);
    }

    #[test]
    fn portable_kernel_matches_bitwise_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let a: u64 = rand::Rng::random(&mut rng);
            let b: u64 = rand::Rng::random(&mut rng);
            let mut want = 0u128;
            for i in 0..64 {
                if (b >> i) & 1 == 1 {
                    want ^= (a as u128) << i;
                }
            }
            assert_eq!(clmul64(a, b), want);
        }
    }

    #[test]
    fn karatsuba_word_path_matches_schoolbook_on_large_operands() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(na, nb) in &[(64 * 40, 64 * 40), (64 * 33 + 5, 64 * 33 + 5), (2000, 3100)] {
            let a = BitPoly::random(na, &mut rng);
            let b = BitPoly::random(nb, &mut rng);
            assert_eq!(
                clmul(&a, &b, Backend::Schoolbook).0,
                clmul(&a, &b, Backend::Karatsuba).0
            );
        }
    }

    #[test]
    fn schoolbook_cost_is_square() {
        for nu in [1usize, 8, 64, 243] {
            assert_eq!(clmul_cost(nu, nu, Backend::Schoolbook).ands, (nu * nu) as u64);
        }
    }

    #[test]
    fn karatsuba_and_count_is_three_to_the_j() {
        for j in 0..16u32 {
            let nu = 1usize << j;
            assert_eq!(clmul_cost(nu, nu, Backend::Karatsuba).ands, 3u64.pow(j));
            assert_eq!(square_split(nu), Split::Halves);
        }
    }

    #[test]
    fn five_term_formula_is_an_identity() {
        // coefficient (i, j) of a_i·b_j in each product and in each output part
        let product = |mask: u8| -> u32 {
            let mut m = 0;
            for i in 0..5 {
                for j in 0..5 {
                    if mask >> i & 1 == 1 && mask >> j & 1 == 1 {
                        m |= 1 << (5 * i + j);
                    }
                }
            }
            m
        };
        for (k, terms) in FIVE_WAY_OUTPUTS.iter().enumerate() {
            let got = terms.iter().fold(0u32, |acc, &t| acc ^ product(FIVE_WAY_SUBSETS[t]));
            let want = (0..5).filter(|&i| k >= i && k - i < 5).fold(0u32, |acc, i| acc | 1 << (5 * i + k - i));
            assert_eq!(got, want, "output part {k}");
        }
    }

    #[test]
    fn fifths_pay_off_at_awkward_sizes() {
        assert_eq!(square_split(5), Split::Fifths);
        assert_eq!(clmul_cost(5, 5, Backend::Karatsuba).ands, 13);
        assert!(clmul_cost(77, 77, Backend::Karatsuba).ands < 2187 / 2);
    }

    #[test]
    fn unknown_backend_is_config_error() {
        assert!(matches!("fft".parse::<Backend>(), Err(Error::Config(_))));
        assert!(matches!("schonhage".parse::<Backend>(), Err(Error::Config(_))));
        assert_eq!("Karatsuba".parse::<Backend>().unwrap(), Backend::Karatsuba);
    }
}
