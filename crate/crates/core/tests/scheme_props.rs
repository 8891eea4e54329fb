use entroseal::ese::{
    decrypt, derive_key_length, deserialize, encrypt, encrypt_with_randomness, gen, quantum_keytag_with_randomness,
    recover_pauli_key, serialize, SchemeParams,
};
use entroseal::gf2::{Backend, BitPoly};
use entroseal::keyexpand::{expand_affine, expand_affine_with, ExpansionParams, Mode};
use entroseal::rng::RandomSource;
use proptest::prelude::*;

fn all(nbits: usize) -> impl Iterator<Item = BitPoly> {
    (0..1u64 << nbits).map(move |x| BitPoly::from_u64(x, nbits))
}

#[test]
fn decryption_inverts_encryption_exhaustively_up_to_n_4() {
    let mut cases = 0u64;
    for n in 1..=4 {
        for ell in 1..=n {
            let p = ExpansionParams::new(n, ell, Mode::Classical).unwrap();
            for k in all(ell) {
                for x in all(n) {
                    for u in all(p.lambda) {
                        for v in all(p.tail_len) {
                            let c = encrypt_with_randomness(&k, &x, &p, u.clone(), v).unwrap();
                            assert_eq!(decrypt(&k, &c).unwrap(), x);
                            cases += 1;
                        }
                    }
                }
            }
        }
    }
    // sum over (n, ell) of 2^(ell + n + lambda + tail)
    assert_eq!(cases, 10_344);
}

fn random_round_trips(n: usize, t: f64, epsilon: f64, trials: usize, seed: u64) {
    let p = SchemeParams::derive(n, t, epsilon, Mode::Classical).unwrap();
    let mut rng = RandomSource::seeded(seed);
    for _ in 0..trials {
        let key = gen(&p, &mut rng);
        let x = BitPoly::random(n, &mut rng);
        let c = encrypt(&key, &x, &p, &mut rng).unwrap();
        assert_eq!(decrypt(&key, &c).unwrap(), x);
    }
}

#[test]
fn random_round_trips_at_64_bits() {
    random_round_trips(64, 32.0, 2f64.powi(-8), 10_000, 64);
}

#[test]
fn random_round_trips_at_1024_bits() {
    random_round_trips(1024, 512.0, 2f64.powi(-40), 10_000, 1024);
}

#[test]
fn ciphertext_length_is_lambda_plus_tail_plus_n() {
    for (n, ell) in [(16, 9), (16, 3), (100, 50), (100, 80)] {
        let p = ExpansionParams::new(n, ell, Mode::Classical).unwrap();
        let c = encrypt_with_randomness(&BitPoly::zero(ell), &BitPoly::zero(n), &p, BitPoly::zero(p.lambda), BitPoly::zero(p.tail_len)).unwrap();
        let payload_bits = c.u.nbits() + c.v.nbits() + c.payload.nbits();
        assert_eq!(payload_bits, p.lambda + p.tail_len + n);
        if ell >= n - ell {
            assert_eq!(payload_bits, 2 * n);
        }
    }
}

fn arb_classical() -> impl Strategy<Value = ExpansionParams> {
    (1usize..300).prop_flat_map(|n| (Just(n), 1..=n)).prop_map(|(n, ell)| ExpansionParams::new(n, ell, Mode::Classical).unwrap())
}

fn arb_quantum() -> impl Strategy<Value = ExpansionParams> {
    (1usize..150).prop_flat_map(|n| (Just(n), 1..=2 * n)).prop_map(|(n, ell)| ExpansionParams::new(n, ell, Mode::Quantum).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn round_trip_through_the_wire(p in arb_classical(), seed in any::<u64>()) {
        let mut rng = RandomSource::seeded(seed);
        let key = BitPoly::random(p.ell, &mut rng);
        let x = BitPoly::random(p.n, &mut rng);
        let c = encrypt_with_randomness(&key, &x, &p, BitPoly::random(p.lambda, &mut rng), BitPoly::random(p.tail_len, &mut rng)).unwrap();
        let back = deserialize(&serialize(&c)).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(decrypt(&key, &back).unwrap(), x);
    }

    /// The pad is affine in the key: `h(k) ⊕ h(k') ⊕ h(0) = h(k ⊕ k')`.
    #[test]
    fn expansion_is_affine_in_the_key(p in arb_quantum(), seed in any::<u64>()) {
        let mut rng = RandomSource::seeded(seed);
        let u = BitPoly::random(p.lambda, &mut rng);
        let v = BitPoly::random(p.tail_len, &mut rng);
        let k1 = BitPoly::random(p.ell, &mut rng);
        let k2 = BitPoly::random(p.ell, &mut rng);
        let h = |k: &BitPoly| expand_affine(k, &u, &v, &p).unwrap();
        let lhs = h(&k1).xor(&h(&k2)).unwrap().xor(&h(&BitPoly::zero(p.ell))).unwrap();
        prop_assert_eq!(lhs, h(&k1.xor(&k2).unwrap()));
    }

    #[test]
    fn expansion_prefix_is_the_key_and_backends_agree(p in arb_quantum(), seed in any::<u64>()) {
        let mut rng = RandomSource::seeded(seed);
        let k = BitPoly::random(p.ell, &mut rng);
        let u = BitPoly::random(p.lambda, &mut rng);
        let v = BitPoly::random(p.tail_len, &mut rng);
        let (a, ca) = expand_affine_with(&k, &u, &v, &p, Backend::Schoolbook).unwrap();
        let (b, cb) = expand_affine_with(&k, &u, &v, &p, Backend::Karatsuba).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(ca.ands >= cb.ands);
        prop_assert_eq!(a.nbits(), p.out_len);
        prop_assert_eq!(a.slice(0, p.ell).unwrap(), k.clone());
        // u = 0 leaves k ‖ v
        let z = expand_affine(&k, &BitPoly::zero(p.lambda), &v, &p).unwrap();
        prop_assert_eq!(z, k.concat(&v));
        let tag = quantum_keytag_with_randomness(&k, &p, u, v).unwrap();
        prop_assert_eq!(recover_pauli_key(&k, &tag).unwrap(), a);
    }

    #[test]
    fn key_length_is_monotone(n in 16usize..2000, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0, j1 in 1u32..12, j2 in 1u32..12) {
        let (tlo, thi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let (tlo, thi) = (tlo * n as f64, thi * n as f64);
        let (jlo, jhi) = if j1 <= j2 { (j1, j2) } else { (j2, j1) };
        // larger epsilon means smaller log(1/epsilon)
        let (eps_small, eps_large) = (2f64.powi(-(jhi as i32)), 2f64.powi(-(jlo as i32)));
        for mode in [Mode::Classical, Mode::Quantum] {
            let l = |t: f64, e: f64| derive_key_length(n, t, e, mode).ok();
            if let (Some(a), Some(b)) = (l(tlo, eps_small), l(thi, eps_small)) {
                prop_assert!(b <= a, "ell must not grow with t");
            }
            if let (Some(a), Some(b)) = (l(thi, eps_small), l(thi, eps_large)) {
                prop_assert!(b <= a, "ell must not grow with epsilon");
            }
        }
    }
}
