use rand::Rng;

use super::params::SchemeParams;
use crate::error::{precondition, Result};
use crate::gf2::BitPoly;
use crate::keyexpand::{expand_affine, sample_public_randomness, ExpansionParams, Mode};

/// Public randomness plus masked payload.
///
/// Classical ciphertexts carry `x ⊕ pad` (n bits). Quantum key tags carry
/// the 2n-bit Pauli key `β` itself; the qubits it encrypts live in the
/// simulator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    pub params: ExpansionParams,
    pub u: BitPoly,
    pub v: BitPoly,
    pub payload: BitPoly,
}

impl Ciphertext {
    pub fn mode(&self) -> Mode {
        self.params.mode
    }
}

/// A uniformly random `ell`-bit key.
pub fn gen<R: Rng + ?Sized>(params: &SchemeParams, rng: &mut R) -> BitPoly {
    BitPoly::random(params.ell, rng)
}

/// Draws fresh `(u, v)` and masks `x` with the expanded key.
pub fn encrypt<R: Rng + ?Sized>(key: &BitPoly, x: &BitPoly, params: &SchemeParams, rng: &mut R) -> Result<Ciphertext> {
    let (u, v) = sample_public_randomness(&params.expansion, rng);
    encrypt_with_randomness(key, x, &params.expansion, u, v)
}

/// Deterministic encryption under caller-chosen public randomness.
pub fn encrypt_with_randomness(
    key: &BitPoly,
    x: &BitPoly,
    params: &ExpansionParams,
    u: BitPoly,
    v: BitPoly,
) -> Result<Ciphertext> {
    if params.mode != Mode::Classical {
        return Err(precondition("encrypt expects classical parameters"));
    }
    if x.nbits() != params.n {
        return Err(precondition(format!("message has {} bits, expected {}", x.nbits(), params.n)));
    }
    let pad = expand_affine(key, &u, &v, params)?;
    Ok(Ciphertext {
        params: *params,
        u,
        v,
        payload: x.xor(&pad)?,
    })
}

/// `payload ⊕ pad(key, u, v)`. A wrong key is not detected.
pub fn decrypt(key: &BitPoly, c: &Ciphertext) -> Result<BitPoly> {
    if c.params.mode != Mode::Classical {
        return Err(precondition("decrypt expects a classical ciphertext"));
    }
    check_shape(c)?;
    if key.nbits() != c.params.ell {
        return Err(precondition(format!(
            "key has {} bits, ciphertext expects {}",
            key.nbits(),
            c.params.ell
        )));
    }
    let pad = expand_affine(key, &c.u, &c.v, &c.params)?;
    c.payload.xor(&pad)
}

/// Quantum encryption record: `(u, v, β)` with `β = k ‖ ((u·k)_lsb ⊕ v)`
/// the 2n-bit Pauli key to apply to the register.
pub fn quantum_keytag<R: Rng + ?Sized>(key: &BitPoly, params: &SchemeParams, rng: &mut R) -> Result<Ciphertext> {
    let (u, v) = sample_public_randomness(&params.expansion, rng);
    quantum_keytag_with_randomness(key, &params.expansion, u, v)
}

pub fn quantum_keytag_with_randomness(key: &BitPoly, params: &ExpansionParams, u: BitPoly, v: BitPoly) -> Result<Ciphertext> {
    if params.mode != Mode::Quantum {
        return Err(precondition("key tags need quantum parameters"));
    }
    let beta = expand_affine(key, &u, &v, params)?;
    Ok(Ciphertext { params: *params, u, v, payload: beta })
}

/// Recomputes the Pauli key of a quantum key tag from the secret key.
pub fn recover_pauli_key(key: &BitPoly, c: &Ciphertext) -> Result<BitPoly> {
    if c.params.mode != Mode::Quantum {
        return Err(precondition("not a quantum key tag"));
    }
    check_shape(c)?;
    expand_affine(key, &c.u, &c.v, &c.params)
}

fn check_shape(c: &Ciphertext) -> Result<()> {
    let p = &c.params;
    if c.u.nbits() != p.lambda || c.v.nbits() != p.tail_len || c.payload.nbits() != p.out_len {
        return Err(precondition("ciphertext fields do not match its parameters"));
    }
    Ok(())
}
