//! Affine key expansion `k ↦ k ‖ ((u·k)_lsb ⊕ v)` and full-multiplication baselines.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::gf2::{find_irreducible, gf_mul, Backend, BitPoly, OpCount};

/// Default multiplication backend for expansions.
pub const DEFAULT_BACKEND: Backend = Backend::Karatsuba;

/// Classical messages are bitstrings; quantum messages are qubit registers
/// and need a 2-bit Pauli key per qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classical,
    Quantum,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Classical => "classical",
            Mode::Quantum => "quantum",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s.to_ascii_lowercase().as_str() {
            "classical" => Ok(Mode::Classical),
            "quantum" => Ok(Mode::Quantum),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

/// Lengths of one expansion: an `ell`-bit key becomes an `out_len`-bit pad.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExpansionParams {
    pub n: usize,
    pub ell: usize,
    pub mode: Mode,
    /// Field degree, `max(ell, out_len − ell)`.
    pub lambda: usize,
    /// `n` (classical) or `2n` (quantum).
    pub out_len: usize,
    /// `out_len − ell`: length of the truncated product and of `v`.
    pub tail_len: usize,
}

impl ExpansionParams {
    pub fn new(n: usize, ell: usize, mode: Mode) -> Result<Self> {
        let out_len = match mode {
            Mode::Classical => n,
            Mode::Quantum => n
                .checked_mul(2)
                .ok_or_else(|| precondition("message length overflows"))?,
        };
        if ell < 1 || ell > out_len {
            return Err(Error::Parameter {
                bound: if mode == Mode::Classical { "1 <= ell <= n" } else { "1 <= ell <= 2n" },
                detail: format!("ell = {ell}, n = {n}"),
            });
        }
        let tail_len = out_len - ell;
        Ok(ExpansionParams {
            n,
            ell,
            mode,
            lambda: ell.max(tail_len),
            out_len,
            tail_len,
        })
    }
}

/// `k ‖ ((u·k)_lsb ⊕ v)` with the product taken in GF(2^lambda).
pub fn expand_affine(k: &BitPoly, u: &BitPoly, v: &BitPoly, p: &ExpansionParams) -> Result<BitPoly> {
    expand_affine_with(k, u, v, p, DEFAULT_BACKEND).map(|(pad, _)| pad)
}

/// [`expand_affine`] with an explicit backend, also reporting the gate count
/// (one field multiplication plus `tail_len` XORs for `v`).
pub fn expand_affine_with(
    k: &BitPoly,
    u: &BitPoly,
    v: &BitPoly,
    p: &ExpansionParams,
    backend: Backend,
) -> Result<(BitPoly, OpCount)> {
    check_len("key", k, p.ell)?;
    check_len("u", u, p.lambda)?;
    check_len("v", v, p.tail_len)?;
    let field = find_irreducible(p.lambda);
    let k_embedded = k.zero_extend(p.lambda)?;
    let (uk, cost) = gf_mul(u, &k_embedded, &field, backend)?;
    let mut tail = uk.lsb_truncate(p.tail_len)?;
    tail.xor_assign(v)?;
    Ok((k.concat(&tail), cost + OpCount::xors(p.tail_len as u64)))
}

/// Classical baseline: the key times an `n`-bit string `i` in GF(2^n).
pub fn expand_fullmul_classical(k: &BitPoly, i: &BitPoly, p: &ExpansionParams) -> Result<BitPoly> {
    if p.mode != Mode::Classical {
        return Err(precondition("classical full-multiplication expansion needs classical parameters"));
    }
    fullmul(k, i, p, DEFAULT_BACKEND).map(|(pad, _)| pad)
}

/// Quantum baseline: the key times a `2n`-bit string `alpha` in GF(2^(2n)).
pub fn expand_fullmul_quantum(k: &BitPoly, alpha: &BitPoly, p: &ExpansionParams) -> Result<BitPoly> {
    if p.mode != Mode::Quantum {
        return Err(precondition("quantum full-multiplication expansion needs quantum parameters"));
    }
    fullmul(k, alpha, p, DEFAULT_BACKEND).map(|(pad, _)| pad)
}

/// Either baseline with an explicit backend; the field is GF(2^out_len).
pub fn expand_fullmul_with(
    k: &BitPoly,
    multiplier: &BitPoly,
    p: &ExpansionParams,
    backend: Backend,
) -> Result<(BitPoly, OpCount)> {
    fullmul(k, multiplier, p, backend)
}

fn fullmul(k: &BitPoly, multiplier: &BitPoly, p: &ExpansionParams, backend: Backend) -> Result<(BitPoly, OpCount)> {
    check_len("key", k, p.ell)?;
    check_len("multiplier", multiplier, p.out_len)?;
    let field = find_irreducible(p.out_len);
    gf_mul(&k.zero_extend(p.out_len)?, multiplier, &field, backend)
}

/// Uniform, independent `u` (lambda bits) and `v` (tail_len bits).
pub fn sample_public_randomness<R: Rng + ?Sized>(p: &ExpansionParams, rng: &mut R) -> (BitPoly, BitPoly) {
    let u = BitPoly::random(p.lambda, rng);
    let v = BitPoly::random(p.tail_len, rng);
    (u, v)
}

fn check_len(what: &str, x: &BitPoly, want: usize) -> Result<()> {
    if x.nbits() != want {
        return Err(precondition(format!("{what} has {} bits, expected {want}", x.nbits())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;

    #[test]
    fn params_follow_length_rules() {
        let c = ExpansionParams::new(16, 9, Mode::Classical).unwrap();
        assert_eq!((c.lambda, c.out_len, c.tail_len), (9, 16, 7));
        let c = ExpansionParams::new(16, 3, Mode::Classical).unwrap();
        assert_eq!((c.lambda, c.tail_len), (13, 13));
        let q = ExpansionParams::new(32, 45, Mode::Quantum).unwrap();
        assert_eq!((q.lambda, q.out_len, q.tail_len), (45, 64, 19));
        let q = ExpansionParams::new(3, 6, Mode::Quantum).unwrap();
        assert_eq!((q.lambda, q.tail_len), (6, 0));
        assert!(ExpansionParams::new(4, 0, Mode::Classical).is_err());
        assert!(ExpansionParams::new(4, 5, Mode::Classical).is_err());
        assert!(ExpansionParams::new(4, 9, Mode::Quantum).is_err());
    }

    #[test]
    fn zero_u_gives_key_then_v() {
        let mut rng = RandomSource::seeded(1);
        for (n, ell, mode) in [(16, 9, Mode::Classical), (16, 4, Mode::Classical), (5, 3, Mode::Quantum)] {
            let p = ExpansionParams::new(n, ell, mode).unwrap();
            let k = BitPoly::random(p.ell, &mut rng);
            let v = BitPoly::random(p.tail_len, &mut rng);
            let pad = expand_affine(&k, &BitPoly::zero(p.lambda), &v, &p).unwrap();
            assert_eq!(pad, k.concat(&v));
        }
    }

    #[test]
    fn full_length_quantum_key_is_the_pad() {
        let p = ExpansionParams::new(4, 8, Mode::Quantum).unwrap();
        let mut rng = RandomSource::seeded(2);
        let k = BitPoly::random(8, &mut rng);
        let u = BitPoly::random(p.lambda, &mut rng);
        let pad = expand_affine(&k, &u, &BitPoly::zero(0), &p).unwrap();
        assert_eq!(pad, k);
    }

    #[test]
    fn unit_u_truncates_key() {
        // lambda = ell branch
        let p = ExpansionParams::new(12, 8, Mode::Classical).unwrap();
        assert_eq!(p.lambda, p.ell);
        let mut rng = RandomSource::seeded(3);
        let k = BitPoly::random(8, &mut rng);
        let v = BitPoly::random(4, &mut rng);
        let pad = expand_affine(&k, &BitPoly::one(8), &v, &p).unwrap();
        assert_eq!(pad, k.concat(&k.lsb_truncate(4).unwrap().xor(&v).unwrap()));
    }

    #[test]
    fn length_mismatch_rejected() {
        let p = ExpansionParams::new(8, 5, Mode::Classical).unwrap();
        let k = BitPoly::zero(4);
        let r = expand_affine(&k, &BitPoly::zero(5), &BitPoly::zero(3), &p);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn baselines_check_mode() {
        let c = ExpansionParams::new(8, 5, Mode::Classical).unwrap();
        let q = ExpansionParams::new(4, 5, Mode::Quantum).unwrap();
        let k = BitPoly::zero(5);
        assert!(expand_fullmul_quantum(&k, &BitPoly::zero(8), &c).is_err());
        assert!(expand_fullmul_classical(&k, &BitPoly::zero(8), &q).is_err());
    }

    #[test]
    fn baseline_identity_and_zero_key() {
        let mut rng = RandomSource::seeded(4);
        let c = ExpansionParams::new(8, 5, Mode::Classical).unwrap();
        let k = BitPoly::random(5, &mut rng);
        assert_eq!(expand_fullmul_classical(&k, &BitPoly::one(8), &c).unwrap(), k.zero_extend(8).unwrap());
        let i = BitPoly::random(8, &mut rng);
        assert!(expand_fullmul_classical(&BitPoly::zero(5), &i, &c).unwrap().is_zero());

        let q = ExpansionParams::new(6, 7, Mode::Quantum).unwrap();
        let k = BitPoly::random(7, &mut rng);
        assert_eq!(expand_fullmul_quantum(&k, &BitPoly::one(12), &q).unwrap(), k.zero_extend(12).unwrap());
        let a = BitPoly::random(12, &mut rng);
        assert!(expand_fullmul_quantum(&BitPoly::zero(7), &a, &q).unwrap().is_zero());
    }

    #[test]
    fn empty_tail_gives_empty_v() {
        let p = ExpansionParams::new(3, 6, Mode::Quantum).unwrap();
        let (u, v) = sample_public_randomness(&p, &mut RandomSource::seeded(5));
        assert_eq!(u.nbits(), 6);
        assert_eq!(v.nbits(), 0);
    }

    #[test]
    fn different_seeds_differ() {
        let p = ExpansionParams::new(64, 40, Mode::Classical).unwrap();
        let a = sample_public_randomness(&p, &mut RandomSource::seeded(10));
        let b = sample_public_randomness(&p, &mut RandomSource::seeded(11));
        assert_ne!(a, b);
    }
}
