//! Byte-exact ciphertext encoding.
//!
//! ```text
//! "ESE1" | version 0x01 | mode (0x00 classical, 0x01 quantum key tag)
//!        | n: u64 LE | ell: u64 LE | u | v | payload
//! ```
//!
//! `u`, `v` and `payload` are packed little-endian by coefficient (bit `i` of
//! byte `j` is the coefficient of `x^(8j+i)`), each padded with zero bits to a
//! whole byte. Field lengths are recomputed from `(n, ell, mode)`.

use thiserror::Error;

use super::scheme::Ciphertext;
use crate::gf2::BitPoly;
use crate::keyexpand::{ExpansionParams, Mode};

pub const MAGIC: [u8; 4] = *b"ESE1";
pub const VERSION: u8 = 0x01;
const HEADER_LEN: usize = 4 + 1 + 1 + 8 + 8;

/// Every way a byte string can fail to decode. Each variant has a stable
/// numeric code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version")]
    BadVersion,
    #[error("unknown mode byte")]
    BadMode,
    #[error("truncated input")]
    Truncated,
    /// Header lengths are invalid, or bytes follow the payload.
    #[error("inconsistent lengths")]
    InconsistentLengths,
    /// A padding bit in the last byte of a field is set.
    #[error("nonzero padding bits")]
    DirtyPadding,
}

impl WireError {
    pub const ALL: [WireError; 6] = [
        WireError::BadMagic,
        WireError::BadVersion,
        WireError::BadMode,
        WireError::Truncated,
        WireError::InconsistentLengths,
        WireError::DirtyPadding,
    ];

    pub fn code(self) -> u8 {
        match self {
            WireError::BadMagic => 1,
            WireError::BadVersion => 2,
            WireError::BadMode => 3,
            WireError::Truncated => 4,
            WireError::InconsistentLengths => 5,
            WireError::DirtyPadding => 6,
        }
    }
}

fn mode_byte(mode: Mode) -> u8 {
    match mode {
        Mode::Classical => 0x00,
        Mode::Quantum => 0x01,
    }
}

/// Total encoded size for the given parameters.
pub fn encoded_len(p: &ExpansionParams) -> usize {
    HEADER_LEN + p.lambda.div_ceil(8) + p.tail_len.div_ceil(8) + p.out_len.div_ceil(8)
}

pub fn serialize(c: &Ciphertext) -> Vec<u8> {
    let p = &c.params;
    let mut out = Vec::with_capacity(encoded_len(p));
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(mode_byte(p.mode));
    out.extend_from_slice(&(p.n as u64).to_le_bytes());
    out.extend_from_slice(&(p.ell as u64).to_le_bytes());
    for field in [&c.u, &c.v, &c.payload] {
        out.extend_from_slice(&field.to_bytes());
    }
    out
}

pub fn deserialize(bytes: &[u8]) -> Result<Ciphertext, WireError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(WireError::BadMagic);
    }
    if r.take(1)?[0] != VERSION {
        return Err(WireError::BadVersion);
    }
    let mode = match r.take(1)?[0] {
        0x00 => Mode::Classical,
        0x01 => Mode::Quantum,
        _ => return Err(WireError::BadMode),
    };
    let n = r.u64()?;
    let ell = r.u64()?;
    let n = usize::try_from(n).map_err(|_| WireError::InconsistentLengths)?;
    let ell = usize::try_from(ell).map_err(|_| WireError::InconsistentLengths)?;
    if n == 0 {
        return Err(WireError::InconsistentLengths);
    }
    let params = ExpansionParams::new(n, ell, mode).map_err(|_| WireError::InconsistentLengths)?;
    let u = r.field(params.lambda)?;
    let v = r.field(params.tail_len)?;
    let payload = r.field(params.out_len)?;
    if r.pos != bytes.len() {
        return Err(WireError::InconsistentLengths);
    }
    Ok(Ciphertext { params, u, v, payload })
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], WireError> {
        let end = self.pos.checked_add(len).ok_or(WireError::Truncated)?;
        let s = self.bytes.get(self.pos..end).ok_or(WireError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64, WireError> {
        let b = self.take(8)?;
        Ok(u64::from_le_bytes(b.try_into().expect("8-byte slice")))
    }

    fn field(&mut self, nbits: usize) -> Result<BitPoly, WireError> {
        let b = self.take(nbits.div_ceil(8))?;
        BitPoly::from_bytes(b, nbits).map_err(|_| WireError::DirtyPadding)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ese::{encrypt, gen, SchemeParams};
    use crate::rng::RandomSource;

    fn sample() -> Vec<u8> {
        let p = SchemeParams::derive(12, 6.0, 0.25, Mode::Classical).unwrap();
        let mut rng = RandomSource::seeded(7);
        let key = gen(&p, &mut rng);
        let x = BitPoly::random(12, &mut rng);
        serialize(&encrypt(&key, &x, &p, &mut rng).unwrap())
    }

    #[test]
    fn header_layout() {
        let b = sample();
        assert_eq!(&b[..4], b"ESE1");
        assert_eq!(b[4], 1);
        assert_eq!(b[5], 0);
        assert_eq!(u64::from_le_bytes(b[6..14].try_into().unwrap()), 12);
        // ell = 12 - 6 + 4 - 5 = 5, lambda = 7, tail = 7
        assert_eq!(u64::from_le_bytes(b[14..22].try_into().unwrap()), 5);
        assert_eq!(b.len(), 22 + 1 + 1 + 2);
    }

    #[test]
    fn each_failure_has_its_code() {
        let good = sample();
        let mut b = good.clone();
        b[0] = b'X';
        assert_eq!(deserialize(&b), Err(WireError::BadMagic));
        let mut b = good.clone();
        b[4] = 2;
        assert_eq!(deserialize(&b), Err(WireError::BadVersion));
        let mut b = good.clone();
        b[5] = 7;
        assert_eq!(deserialize(&b), Err(WireError::BadMode));
        assert_eq!(deserialize(&good[..good.len() - 1]), Err(WireError::Truncated));
        assert_eq!(deserialize(&good[..3]), Err(WireError::Truncated));
        let mut b = good.clone();
        b.push(0);
        assert_eq!(deserialize(&b), Err(WireError::InconsistentLengths));
        let mut b = good.clone();
        b[14] = 13;
        assert_eq!(deserialize(&b), Err(WireError::InconsistentLengths));
        let mut b = good.clone();
        // u has 7 bits, so bit 7 of its byte is padding
        b[22] |= 0x80;
        assert_eq!(deserialize(&b), Err(WireError::DirtyPadding));
        let codes: std::collections::HashSet<u8> = WireError::ALL.iter().map(|e| e.code()).collect();
        assert_eq!(codes.len(), WireError::ALL.len());
    }

    #[test]
    fn huge_declared_length_is_truncation_not_allocation() {
        let mut b = sample();
        b[6..14].copy_from_slice(&(1u64 << 40).to_le_bytes());
        b[14..22].copy_from_slice(&(1u64 << 39).to_le_bytes());
        assert_eq!(deserialize(&b), Err(WireError::Truncated));
    }
}
