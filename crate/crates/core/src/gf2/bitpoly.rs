use std::fmt;

use rand::Rng;

use crate::error::{precondition, Result};

/// A polynomial over GF(2) stored as a coefficient bitstring of declared length.
///
/// Bit `i` is the coefficient of `x^i`; limb `j` holds coefficients
/// `64j..64j+63`. Bits at positions `>= nbits` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitPoly {
    limbs: Vec<u64>,
    nbits: usize,
}

#[inline]
pub(crate) fn limbs_for(nbits: usize) -> usize {
    nbits.div_ceil(64)
}

impl BitPoly {
    /// The all-zero polynomial with `nbits` coefficient slots.
    pub fn zero(nbits: usize) -> Self {
        BitPoly {
            limbs: vec![0; limbs_for(nbits)],
            nbits,
        }
    }

    /// The constant `1`. Requires `nbits >= 1`.
    pub fn one(nbits: usize) -> Self {
        assert!(nbits >= 1, "BitPoly::one needs at least one coefficient");
        let mut p = Self::zero(nbits);
        p.limbs[0] = 1;
        p
    }

    /// Panics if `value` has a set bit at a position `>= nbits`.
    pub fn from_u64(value: u64, nbits: usize) -> Self {
        if nbits < 64 {
            assert!(value >> nbits == 0, "value {value:#x} does not fit in {nbits} bits");
        }
        let mut p = Self::zero(nbits);
        if nbits > 0 {
            p.limbs[0] = value;
        }
        p
    }

    /// Builds a polynomial from limbs, masking off anything above `nbits`.
    pub fn from_limbs_masked(mut limbs: Vec<u64>, nbits: usize) -> Self {
        limbs.resize(limbs_for(nbits), 0);
        let mut p = BitPoly { limbs, nbits };
        p.mask_top();
        p
    }

    /// Polynomial with exactly the given exponents set.
    pub fn from_exponents(exps: &[usize], nbits: usize) -> Self {
        let mut p = Self::zero(nbits);
        for &e in exps {
            assert!(e < nbits, "exponent {e} out of range for {nbits} bits");
            p.flip_bit(e);
        }
        p
    }

    /// Decodes `ceil(nbits/8)` little-endian bytes; padding bits must be zero.
    pub fn from_bytes(bytes: &[u8], nbits: usize) -> Result<Self> {
        let need = nbits.div_ceil(8);
        if bytes.len() != need {
            return Err(precondition(format!(
                "expected {need} bytes for {nbits} bits, got {}",
                bytes.len()
            )));
        }
        let mut limbs = vec![0u64; limbs_for(nbits)];
        for (j, &b) in bytes.iter().enumerate() {
            limbs[j / 8] |= (b as u64) << (8 * (j % 8));
        }
        let p = BitPoly { limbs, nbits };
        if !p.top_is_clean() {
            return Err(precondition("nonzero padding bits above declared length"));
        }
        Ok(p)
    }

    /// Encodes to `ceil(nbits/8)` bytes, bit `i` of byte `j` = coefficient `x^(8j+i)`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let need = self.nbits.div_ceil(8);
        let mut out = Vec::with_capacity(need);
        for j in 0..need {
            out.push((self.limbs[j / 8] >> (8 * (j % 8))) as u8);
        }
        out
    }

    pub fn random<R: Rng + ?Sized>(nbits: usize, rng: &mut R) -> Self {
        let limbs = (0..limbs_for(nbits)).map(|_| rng.random::<u64>()).collect();
        Self::from_limbs_masked(limbs, nbits)
    }

    #[inline]
    pub fn nbits(&self) -> usize {
        self.nbits
    }

    #[inline]
    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    /// Value as an integer; `None` when it has more than 64 coefficient slots.
    pub fn to_u64(&self) -> Option<u64> {
        match self.limbs.len() {
            0 => Some(0),
            1 => Some(self.limbs[0]),
            _ => None,
        }
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        i < self.nbits && (self.limbs[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set_bit(&mut self, i: usize, value: bool) {
        assert!(i < self.nbits, "bit {i} out of range for {} bits", self.nbits);
        let m = 1u64 << (i % 64);
        if value {
            self.limbs[i / 64] |= m;
        } else {
            self.limbs[i / 64] &= !m;
        }
    }

    fn flip_bit(&mut self, i: usize) {
        self.limbs[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&w| w == 0)
    }

    /// Degree of the polynomial, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        limbs_degree(&self.limbs)
    }

    pub fn weight(&self) -> usize {
        self.limbs.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Coefficient-wise XOR; both operands must have the same declared length.
    pub fn xor(&self, other: &BitPoly) -> Result<BitPoly> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BitPoly) -> Result<()> {
        if self.nbits != other.nbits {
            return Err(precondition(format!(
                "xor of {}-bit and {}-bit strings",
                self.nbits, other.nbits
            )));
        }
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
        Ok(())
    }

    /// The `m` low-order coefficients as an `m`-bit polynomial.
    pub fn lsb_truncate(&self, m: usize) -> Result<BitPoly> {
        if m > self.nbits {
            return Err(precondition(format!(
                "cannot keep {m} bits of a {}-bit string",
                self.nbits
            )));
        }
        Ok(self.truncated(m))
    }

    pub(crate) fn truncated(&self, m: usize) -> BitPoly {
        let keep = limbs_for(m).min(self.limbs.len());
        Self::from_limbs_masked(self.limbs[..keep].to_vec(), m)
    }

    /// Same coefficients with `nbits` grown to `n` (high-order zero extension).
    pub fn zero_extend(&self, n: usize) -> Result<BitPoly> {
        if n < self.nbits {
            return Err(precondition(format!(
                "cannot zero-extend {} bits to {n}",
                self.nbits
            )));
        }
        let mut limbs = self.limbs.clone();
        limbs.resize(limbs_for(n), 0);
        Ok(BitPoly { limbs, nbits: n })
    }

    /// `self ‖ high`: `self` occupies the low positions, `high` starts at `self.nbits()`.
    pub fn concat(&self, high: &BitPoly) -> BitPoly {
        let mut out = self.zero_extend(self.nbits + high.nbits).expect("growing");
        xor_shifted(&mut out.limbs, &high.limbs, self.nbits);
        out
    }

    /// Coefficients `start..start+len` as a `len`-bit polynomial.
    pub fn slice(&self, start: usize, len: usize) -> Result<BitPoly> {
        if start + len > self.nbits {
            return Err(precondition(format!(
                "slice {start}..{} out of range for {} bits",
                start + len,
                self.nbits
            )));
        }
        let shifted = shr_limbs(&self.limbs, start);
        Ok(Self::from_limbs_masked(shifted, len))
    }

    fn mask_top(&mut self) {
        let r = self.nbits % 64;
        if r != 0 {
            if let Some(last) = self.limbs.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    fn top_is_clean(&self) -> bool {
        let r = self.nbits % 64;
        r == 0 || self.limbs.last().is_none_or(|&w| w >> r == 0)
    }
}

impl fmt::Debug for BitPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitPoly[{}](", self.nbits)?;
        if self.nbits <= 64 {
            write!(f, "{:#b}", self.limbs.first().copied().unwrap_or(0))?;
        } else {
            for w in self.limbs.iter().rev() {
                write!(f, "{w:016x}")?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Display for BitPoly {
    /// Polynomial notation, highest degree first, e.g. `x^8 + x^4 + x^3 + x + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(deg) = self.degree() else {
            return write!(f, "0");
        };
        let mut first = true;
        for i in (0..=deg).rev().filter(|&i| self.bit(i)) {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "1")?,
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

pub(crate) fn limbs_degree(limbs: &[u64]) -> Option<usize> {
    limbs
        .iter()
        .rposition(|&w| w != 0)
        .map(|j| 64 * j + 63 - limbs[j].leading_zeros() as usize)
}

/// `dst ^= src << shift`, silently dropping bits shifted past the end of `dst`.
pub(crate) fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let w = shift / 64;
    let b = shift % 64;
    if w >= dst.len() {
        return;
    }
    if b == 0 {
        for (d, s) in dst[w..].iter_mut().zip(src) {
            *d ^= s;
        }
    } else {
        let mut carry = 0u64;
        let mut j = w;
        for &s in src {
            if j >= dst.len() {
                return;
            }
            dst[j] ^= (s << b) | carry;
            carry = s >> (64 - b);
            j += 1;
        }
        if j < dst.len() {
            dst[j] ^= carry;
        }
    }
}

/// `src >> shift` as a fresh limb vector of the same length.
pub(crate) fn shr_limbs(src: &[u64], shift: usize) -> Vec<u64> {
    let w = shift / 64;
    let b = shift % 64;
    let mut out = vec![0u64; src.len()];
    if w >= src.len() {
        return out;
    }
    for j in 0..src.len() - w {
        let lo = src[j + w] >> b;
        let hi = if b != 0 && j + w + 1 < src.len() {
            src[j + w + 1] << (64 - b)
        } else {
            0
        };
        out[j] = lo | hi;
    }
    out
}

/// Clears every bit at position `>= nbits`.
pub(crate) fn mask_limbs(limbs: &mut [u64], nbits: usize) {
    let full = nbits / 64;
    let r = nbits % 64;
    for (j, w) in limbs.iter_mut().enumerate() {
        if j > full || (j == full && r == 0) {
            *w = 0;
        } else if j == full {
            *w &= (1u64 << r) - 1;
        }
    }
}
