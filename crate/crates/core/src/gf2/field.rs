//! Binary field descriptions and deterministic modulus selection.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, OnceLock, RwLock};

use super::bitpoly::{limbs_degree, limbs_for, xor_shifted, BitPoly};
use super::reduce::reduce_in_place;
use crate::error::{precondition, Result};

/// GF(2^lambda) fixed by an irreducible modulus of degree exactly `lambda`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    lambda: usize,
    modulus: BitPoly,
    /// Exponents of the modulus below `lambda`, descending.
    low: Vec<usize>,
}

impl FieldSpec {
    /// Validates that `modulus` is irreducible.
    pub fn from_modulus(modulus: BitPoly) -> Result<FieldSpec> {
        let lambda = modulus
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| precondition("modulus must have degree >= 1"))?;
        let modulus = modulus.truncated(lambda + 1);
        let low: Vec<usize> = (0..lambda).rev().filter(|&i| modulus.bit(i)).collect();
        if !is_irreducible_sparse(lambda, &low) {
            return Err(precondition(format!("{modulus} is reducible")));
        }
        Ok(FieldSpec { lambda, modulus, low })
    }

    fn from_exponents_unchecked(lambda: usize, low: Vec<usize>) -> FieldSpec {
        let mut exps = low.clone();
        exps.push(lambda);
        FieldSpec {
            lambda,
            modulus: BitPoly::from_exponents(&exps, lambda + 1),
            low,
        }
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// The modulus as a `(lambda+1)`-bit polynomial.
    pub fn modulus(&self) -> &BitPoly {
        &self.modulus
    }

    /// Number of nonzero terms: 3 for a trinomial, 5 for a pentanomial.
    pub fn weight(&self) -> usize {
        self.low.len() + 1
    }

    pub fn low_exponents(&self) -> &[usize] {
        &self.low
    }
}

static CACHE: LazyLock<RwLock<HashMap<usize, Arc<FieldSpec>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// The field of degree `lambda` used throughout the crate.
///
/// Selection is deterministic:
/// - `lambda = 1`: `x + 1`;
/// - `lambda = 2·3^k`: the trinomial `x^lambda + x^(lambda/2) + 1`;
/// - otherwise the smallest irreducible trinomial when read as an integer,
///   then the smallest irreducible pentanomial, then the smallest irreducible
///   polynomial of any weight.
///
/// Results are cached process-wide.
pub fn find_irreducible(lambda: usize) -> Arc<FieldSpec> {
    assert!(lambda >= 1, "field degree must be positive");
    if let Some(spec) = CACHE.read().expect("field cache poisoned").get(&lambda) {
        return Arc::clone(spec);
    }
    let spec = Arc::new(search(lambda));
    let mut cache = CACHE.write().expect("field cache poisoned");
    Arc::clone(cache.entry(lambda).or_insert(spec))
}

/// Search results for degrees where the scan below takes minutes. Each entry
/// is what [`search_uncached`] returns; it is re-checked for irreducibility on
/// first use, and `precomputed_table_matches_search` (ignored, slow) confirms
/// it is also the first candidate in scan order.
const PRECOMPUTED: &[(usize, &[usize])] = &[(16397, &[32, 21, 11, 0]), (32768, &[71, 4, 1, 0])];

fn search(lambda: usize) -> FieldSpec {
    if let Some(&(_, low)) = PRECOMPUTED.iter().find(|(d, _)| *d == lambda) {
        assert!(is_irreducible_sparse(lambda, low), "precomputed modulus for degree {lambda} is reducible");
        return FieldSpec::from_exponents_unchecked(lambda, low.to_vec());
    }
    search_uncached(lambda)
}

fn search_uncached(lambda: usize) -> FieldSpec {
    if lambda == 1 {
        return FieldSpec::from_exponents_unchecked(1, vec![0]);
    }
    if let Some(m) = two_times_power_of_three(lambda) {
        let low = vec![m, 0];
        if is_irreducible_sparse(lambda, &low) {
            return FieldSpec::from_exponents_unchecked(lambda, low);
        }
    }
    let sieve = Sieve::for_degree(lambda);
    for k in 1..lambda {
        let low = vec![k, 0];
        if !swan_even_factor_count(lambda, k) && sieve.passes(&low) && is_irreducible_sparse(lambda, &low) {
            return FieldSpec::from_exponents_unchecked(lambda, low);
        }
    }
    for a in 3..lambda {
        for b in 2..a {
            for c in 1..b {
                let low = vec![a, b, c, 0];
                if sieve.passes(&low) && is_irreducible_sparse(lambda, &low) {
                    return FieldSpec::from_exponents_unchecked(lambda, low);
                }
            }
        }
    }
    any_weight_search(lambda)
}

/// Integer-order scan over every degree-`lambda` polynomial with constant term 1.
fn any_weight_search(lambda: usize) -> FieldSpec {
    let mut body = BitPoly::zero(lambda.saturating_sub(1));
    loop {
        let mut low: Vec<usize> = (0..body.nbits()).rev().filter(|&i| body.bit(i)).map(|i| i + 1).collect();
        low.push(0);
        if is_irreducible_sparse(lambda, &low) {
            return FieldSpec::from_exponents_unchecked(lambda, low);
        }
        // increment `body` as a binary counter
        let mut i = 0;
        loop {
            assert!(i < body.nbits(), "no irreducible polynomial of degree {lambda}");
            let was = body.bit(i);
            body.set_bit(i, !was);
            if !was {
                break;
            }
            i += 1;
        }
    }
}

/// Swan's theorem: `true` when `x^n + x^k + 1` is known to have an even
/// number of irreducible factors (and so is reducible).
pub(crate) fn swan_even_factor_count(n: usize, k: usize) -> bool {
    if n.is_multiple_of(2) && k.is_multiple_of(2) {
        // a perfect square
        return true;
    }
    // the reciprocal x^n + x^(n-k) + 1 has the same factorisation pattern
    let k = if n % 2 == 1 && k % 2 == 1 { n - k } else { k };
    if n.is_multiple_of(2) {
        n != 2 * k && matches!((n * k / 2) % 4, 0 | 1)
    } else {
        let r = n % 8;
        if !(2 * n).is_multiple_of(k) {
            r == 3 || r == 5
        } else {
            r == 1 || r == 7
        }
    }
}

fn two_times_power_of_three(lambda: usize) -> Option<usize> {
    if !lambda.is_multiple_of(2) {
        return None;
    }
    let mut m = lambda / 2;
    while m.is_multiple_of(3) {
        m /= 3;
    }
    (m == 1).then_some(lambda / 2)
}

/// Irreducibility of `x^lambda + sum(x^e for e in low)`.
///
/// Degrees up to 32 use exhaustive trial division; larger degrees use the
/// Frobenius criterion: `x^(2^lambda) = x mod f` and
/// `gcd(x^(2^(lambda/p)) − x, f) = 1` for each prime `p | lambda`.
pub(crate) fn is_irreducible_sparse(lambda: usize, low: &[usize]) -> bool {
    if lambda <= 32 {
        let f = low.iter().fold(1u64 << lambda, |acc, &e| acc ^ (1u64 << e));
        return is_irreducible_u64(f);
    }
    frobenius_test(lambda, low)
}

/// Exhaustive trial division by every polynomial of degree `1..=deg/2`.
pub(crate) fn is_irreducible_u64(f: u64) -> bool {
    let Some(d) = deg_u64(f) else { return false };
    if d == 0 {
        return false;
    }
    let top = 1u64 << (d / 2 + 1);
    (2..top).all(|g| rem_u64(f, g) != 0)
}

#[inline]
fn deg_u64(f: u64) -> Option<u32> {
    (f != 0).then(|| 63 - f.leading_zeros())
}

#[inline]
fn rem_u64(mut f: u64, g: u64) -> u64 {
    let dg = 63 - g.leading_zeros();
    while f != 0 {
        let df = 63 - f.leading_zeros();
        if df < dg {
            break;
        }
        f ^= g << (df - dg);
    }
    f
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn frobenius_test(lambda: usize, low: &[usize]) -> bool {
    let words = limbs_for(lambda);
    let mut checkpoints: Vec<usize> = prime_factors(lambda).into_iter().map(|p| lambda / p).collect();
    checkpoints.sort_unstable();

    let mut x = vec![0u64; words];
    x[0] = 2;
    let mut r = x.clone();
    let mut buf = vec![0u64; 2 * words];
    let mut saved = Vec::with_capacity(checkpoints.len());
    for i in 1..=lambda {
        square_into(&r, &mut buf);
        reduce_in_place(&mut buf, lambda, low);
        r.copy_from_slice(&buf[..words]);
        if checkpoints.binary_search(&i).is_ok() {
            saved.push(r.clone());
        }
    }
    // most reducible candidates fail here, before any gcd is paid for
    if r != x {
        return false;
    }
    saved.into_iter().all(|mut diff| {
        diff[0] ^= 2;
        gcd_with_modulus_is_one(diff, lambda, low)
    })
}

fn spread_table() -> &'static [u16; 256] {
    static T: OnceLock<[u16; 256]> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = [0u16; 256];
        for (b, slot) in t.iter_mut().enumerate() {
            let mut s = 0u16;
            for i in 0..8 {
                s |= (((b >> i) & 1) as u16) << (2 * i);
            }
            *slot = s;
        }
        t
    })
}

/// `out = src^2` (coefficient spreading), `out.len() == 2 * src.len()`.
pub(crate) fn square_into(src: &[u64], out: &mut [u64]) {
    #[cfg(target_arch = "x86_64")]
    {
        if super::clmul::hardware_clmul() {
            // SAFETY: pclmulqdq support was detected at runtime.
            return unsafe { square_pclmul(src, out) };
        }
    }
    square_portable(src, out)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq,sse2")]
unsafe fn square_pclmul(src: &[u64], out: &mut [u64]) {
    use std::arch::x86_64::*;
    for (j, &w) in src.iter().enumerate() {
        let v = _mm_set_epi64x(0, w as i64);
        let p = _mm_clmulepi64_si128(v, v, 0x00);
        out[2 * j] = _mm_cvtsi128_si64(p) as u64;
        out[2 * j + 1] = _mm_cvtsi128_si64(_mm_unpackhi_epi64(p, p)) as u64;
    }
}

fn square_portable(src: &[u64], out: &mut [u64]) {
    let t = spread_table();
    for (j, &w) in src.iter().enumerate() {
        let mut lo = 0u64;
        let mut hi = 0u64;
        for k in 0..4 {
            lo |= (t[((w >> (8 * k)) & 0xff) as usize] as u64) << (16 * k);
            hi |= (t[((w >> (32 + 8 * k)) & 0xff) as usize] as u64) << (16 * k);
        }
        out[2 * j] = lo;
        out[2 * j + 1] = hi;
    }
}

fn gcd_with_modulus_is_one(a: Vec<u64>, lambda: usize, low: &[usize]) -> bool {
    let mut f = vec![0u64; limbs_for(lambda + 1)];
    for &e in low.iter().chain(std::iter::once(&lambda)) {
        f[e / 64] ^= 1u64 << (e % 64);
    }
    let g = poly_gcd(f, a);
    limbs_degree(&g) == Some(0)
}

pub(crate) fn poly_rem(mut a: Vec<u64>, b: &[u64]) -> Vec<u64> {
    let db = limbs_degree(b).expect("division by zero polynomial");
    let b = &b[..db / 64 + 1];
    while let Some(da) = limbs_degree(&a) {
        if da < db {
            break;
        }
        xor_shifted(&mut a, b, da - db);
    }
    a
}

pub(crate) fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>) -> Vec<u64> {
    while limbs_degree(&b).is_some() {
        let r = poly_rem(a, &b);
        a = b;
        b = r;
        let keep = limbs_degree(&b).map_or(1, |d| d / 64 + 1);
        b.truncate(keep);
    }
    a
}

/// Rejects candidates with an irreducible factor of small degree.
///
/// For each irreducible `g` of degree `2..=SIEVE_DEGREE` the residues
/// `x^j mod g` repeat with period `2^deg(g) − 1`, so `f mod g` of a sparse
/// `f` is a handful of table lookups.
struct Sieve {
    entries: Vec<SieveEntry>,
}

struct SieveEntry {
    powers: Vec<u16>,
    top: u16,
}

const SIEVE_DEGREE: u32 = 12;

impl Sieve {
    fn for_degree(lambda: usize) -> Sieve {
        if lambda <= 32 {
            return Sieve { entries: Vec::new() };
        }
        let entries = small_irreducibles()
            .iter()
            .map(|g| {
                let powers = power_table(g.poly, g.degree);
                let top = powers[lambda % powers.len()];
                SieveEntry { powers, top }
            })
            .collect();
        Sieve { entries }
    }

    fn passes(&self, low: &[usize]) -> bool {
        self.entries.iter().all(|e| {
            let period = e.powers.len();
            let r = low.iter().fold(e.top, |acc, &k| acc ^ e.powers[k % period]);
            r != 0
        })
    }
}

struct SmallIrreducible {
    poly: u32,
    degree: u32,
}

fn small_irreducibles() -> &'static [SmallIrreducible] {
    static LIST: OnceLock<Vec<SmallIrreducible>> = OnceLock::new();
    LIST.get_or_init(|| {
        let mut out: Vec<SmallIrreducible> = Vec::new();
        for degree in 2..=SIEVE_DEGREE {
            for body in 0..(1u32 << (degree - 1)) {
                let poly = (1 << degree) | (body << 1) | 1;
                let reducible = (poly.count_ones() % 2 == 0)
                    || out
                        .iter()
                        .take_while(|g| 2 * g.degree <= degree)
                        .any(|g| rem_u64(poly as u64, g.poly as u64) == 0);
                if !reducible {
                    out.push(SmallIrreducible { poly, degree });
                }
            }
        }
        out
    })
}

fn power_table(g: u32, degree: u32) -> Vec<u16> {
    let period = (1usize << degree) - 1;
    let mut t = Vec::with_capacity(period);
    let mut r: u32 = 1;
    for _ in 0..period {
        t.push(r as u16);
        r <<= 1;
        if r >> degree & 1 == 1 {
            r ^= g;
        }
    }
    t
}
