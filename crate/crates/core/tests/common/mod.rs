//! Wire-format fixtures shared by the wire tests and the acceptance run.
#![allow(dead_code)]

use entroseal::ese::wire::{encoded_len, MAGIC, VERSION};
use entroseal::ese::{
    deserialize, encrypt, encrypt_with_randomness, gen, quantum_keytag_with_randomness, serialize, SchemeParams, WireError,
};
use entroseal::gf2::{find_irreducible, BitPoly};
use entroseal::keyexpand::{sample_public_randomness, ExpansionParams, Mode};
use entroseal::rng::RandomSource;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn hex(b: &[u8]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}

/// Header `ESE1 01 00`, n = 16, ell = 9, then u (2 bytes), v (1), payload (2).
/// Produced once by this implementation and frozen.
pub const GOLDEN: &str = "45534531010010000000000000000900000000000000d50118e187";

/// Serializes the golden ciphertext: n = 16, t = 8, epsilon = 2^-3, so
/// ell = 16 - 8 + 6 - 5 = 9, lambda = 9, tail = 7. Key, message and public
/// randomness all come from one stream seeded with 42, in that order.
/// Panics if the bytes disagree with a plain-integer recomputation.
pub fn golden_bytes() -> Vec<u8> {
    let p = SchemeParams::derive(16, 8.0, 0.125, Mode::Classical).unwrap();
    assert_eq!((p.ell, p.expansion.lambda, p.expansion.tail_len), (9, 9, 7));
    let mut rng = RandomSource::seeded(42);
    let key = gen(&p, &mut rng);
    let x = BitPoly::random(16, &mut rng);
    let bytes = serialize(&encrypt(&key, &x, &p, &mut rng).unwrap());
    assert_eq!(bytes.len(), encoded_len(&p.expansion));

    let field = find_irreducible(9);
    let modulus = field.low_exponents().iter().fold(1u32 << 9, |m, &e| m | 1 << e);
    let k = key.to_u64().unwrap() as u32;
    let u = u32::from(bytes[22]) | u32::from(bytes[23]) << 8;
    let v = u32::from(bytes[24]);
    let payload = u32::from(bytes[25]) | u32::from(bytes[26]) << 8;
    let mut prod = 0u32;
    for i in 0..9 {
        if u >> i & 1 == 1 {
            prod ^= k << i;
        }
    }
    for d in (9..17).rev() {
        if prod >> d & 1 == 1 {
            prod ^= modulus << (d - 9);
        }
    }
    let pad = k | ((prod & 0x7f) ^ v) << 9;
    assert_eq!(payload, x.to_u64().unwrap() as u32 ^ pad);
    bytes
}

pub fn sample(rng: &mut ChaCha8Rng) -> Vec<u8> {
    let n = rng.random_range(1..=40usize);
    let (mode, max_ell) = if rng.random_bool(0.5) { (Mode::Classical, n) } else { (Mode::Quantum, 2 * n) };
    let p = ExpansionParams::new(n, rng.random_range(1..=max_ell), mode).unwrap();
    let key = BitPoly::random(p.ell, rng);
    let (u, v) = sample_public_randomness(&p, rng);
    let c = match mode {
        Mode::Classical => encrypt_with_randomness(&key, &BitPoly::random(n, rng), &p, u, v).unwrap(),
        Mode::Quantum => quantum_keytag_with_randomness(&key, &p, u, v).unwrap(),
    };
    serialize(&c)
}

pub fn mutate(rng: &mut ChaCha8Rng, mut b: Vec<u8>) -> Vec<u8> {
    match rng.random_range(0..7) {
        0 => {
            let i = rng.random_range(0..b.len());
            b[i] ^= 1 << rng.random_range(0..8);
        }
        1 => {
            let len = rng.random_range(0..b.len());
            b.truncate(len);
        }
        2 => {
            for _ in 0..rng.random_range(1..4) {
                b.push(rng.random());
            }
        }
        3 => {
            // rewrite one of the length fields
            let at = if rng.random_bool(0.5) { 6 } else { 14 };
            let v: u64 = match rng.random_range(0..3) {
                0 => rng.random_range(0..64),
                1 => rng.random(),
                _ => u64::MAX - rng.random_range(0..4),
            };
            b[at..at + 8].copy_from_slice(&v.to_le_bytes());
        }
        4 => b[5] = rng.random(),
        5 => {
            let len = rng.random_range(0..64);
            b = (0..len).map(|_| rng.random()).collect();
        }
        _ => {
            let len = rng.random_range(22..80);
            b = (0..len).map(|_| rng.random()).collect();
            b[..4].copy_from_slice(&MAGIC);
            b[4] = VERSION;
        }
    }
    b
}

/// Outcome counts of `cases` mutated ciphertexts: key 0 for inputs that
/// still decode, otherwise the error code. Panics on any misclassification.
pub fn fuzz(cases: usize, seed: u64) -> std::collections::BTreeMap<u8, usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::BTreeMap::new();
    for _ in 0..cases {
        let good = sample(&mut rng);
        let bad = mutate(&mut rng, good);
        match deserialize(&bad) {
            Ok(c) => {
                // only flips inside field bodies survive, and the encoding is canonical
                assert_eq!(serialize(&c), bad);
                *seen.entry(0u8).or_insert(0) += 1;
            }
            Err(e) => {
                assert!(WireError::ALL.contains(&e));
                assert!((1..=6).contains(&e.code()));
                *seen.entry(e.code()).or_insert(0usize) += 1;
            }
        }
    }
    seen
}
