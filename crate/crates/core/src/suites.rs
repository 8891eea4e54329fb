//! The verification suites behind `entroseal verify`: fixed grids over the
//! statlab, qsim and gf2 checks, each producing [`CheckRecord`]s.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::gf2::counting::clmul_counted;
use crate::gf2::{clmul, find_irreducible, gf_add, gf_mul, reduce, Backend, BitPoly};
use crate::keyexpand::{ExpansionParams, Mode};
use crate::qsim::{
    check_full_randomization, check_lemma5, check_lemma6, check_theorem3, random_operator_table, random_state,
    sigma_candidates, StateKind,
};
use crate::report::CheckRecord;
use crate::statlab::{check_classical_pair, check_sizing, sizing_instances, Family};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Classical,
    Quantum,
    Gf2,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Classical, Suite::Quantum, Suite::Gf2];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Classical => "classical",
            Suite::Quantum => "quantum",
            Suite::Gf2 => "gf2",
        }
    }

    pub fn run(self, budget: u128, seed: u64) -> Result<Vec<CheckRecord>> {
        match self {
            Suite::Classical => {
                let mut out = classical_grid(budget)?;
                out.extend(classical_sizing(budget)?);
                Ok(out)
            }
            Suite::Quantum => {
                let mut out = qotp_randomization(budget, seed)?;
                out.extend(lemma5_grid(budget, seed)?);
                out.extend(lemma6_grid(budget, seed)?);
                out.extend(theorem3_grid(budget, seed)?);
                Ok(out)
            }
            Suite::Gf2 => {
                let mut out = field_axioms(seed)?;
                out.extend(backend_equivalence(seed)?);
                out.extend(reduce_oracle(seed)?);
                Ok(out)
            }
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}` (classical, quantum, gf2)")))
    }
}

/// Message lengths of the exhaustive classical grid.
pub const CLASSICAL_NS: [usize; 4] = [3, 4, 5, 6];

/// Collision bound and distance-versus-collision for every `(n, ell, family)`
/// with `n` in [`CLASSICAL_NS`] and `1 <= ell <= n`.
pub fn classical_grid(budget: u128) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for n in CLASSICAL_NS {
        for ell in 1..=n {
            let p = ExpansionParams::new(n, ell, Mode::Classical)?;
            for fam in Family::grid(n) {
                let dx = fam.distribution(n)?;
                let (t1, ind) = check_classical_pair(&p, &dx, budget)?;
                out.push(t1.record(&fam.name()));
                out.push(ind.record(&fam.name()));
            }
        }
    }
    Ok(out)
}

/// Distance bound `8ε` at every feasible key-length sizing on the same `n`.
pub fn classical_sizing(budget: u128) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for n in CLASSICAL_NS {
        for inst in sizing_instances(n) {
            out.extend(check_sizing(&inst, budget)?);
        }
    }
    Ok(out)
}

/// Deterministic per-item seed. Distinct items get distinct streams.
fn item_seed(base: u64, tag: u64, parts: &[usize]) -> u64 {
    parts.iter().fold(base ^ tag.rotate_left(48), |acc, &p| acc.wrapping_mul(0x100_0000_01b3).wrapping_add(p as u64 + 1))
}

fn kind(i: usize) -> StateKind {
    StateKind::ALL[i % StateKind::ALL.len()]
}

pub const QOTP_STATES: usize = 20;

/// Full QOTP twirl over `n ∈ {1,2,3}`, `dim_e ∈ {1,2,4}`.
pub fn qotp_randomization(budget: u128, seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for de in [1, 2, 4] {
            for i in 0..QOTP_STATES {
                let s = item_seed(seed, 1, &[n, de, i]);
                let state = random_state(n, de, kind(i), s)?;
                out.push(check_full_randomization(&state, budget)?.with_seed(s));
            }
        }
    }
    Ok(out)
}

pub const LEMMA5_STATES: usize = 10;

/// `E_v R_uv(ρ) = τ ⊗ ρ_E` for every `ell <= 2n` and every `u`.
pub fn lemma5_grid(budget: u128, seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for n in 1..=2 {
        let de = 1 << n;
        for i in 0..LEMMA5_STATES {
            let s = item_seed(seed, 2, &[n, i]);
            let state = random_state(n, de, kind(i), s)?;
            for ell in 1..=2 * n {
                let p = ExpansionParams::new(n, ell, Mode::Quantum)?;
                for u in 0..1u64 << p.lambda {
                    out.push(check_lemma5(&p, &BitPoly::from_u64(u, p.lambda), &state, budget)?.with_seed(s));
                }
            }
        }
    }
    Ok(out)
}

pub const LEMMA6_TABLES: usize = 50;
/// Matrix dimension of the operator-valued `f`.
pub const LEMMA6_DIM: usize = 3;

/// The pair-expectation identity for [`LEMMA6_TABLES`] random operator
/// tables at each `(n, ell)`, `n ∈ {1,2}`; `ell < n` and `ell >= n` exercise
/// both field-size branches.
pub fn lemma6_grid(budget: u128, seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for n in 1..=2 {
        for ell in 1..=2 * n {
            for i in 0..LEMMA6_TABLES {
                let s = item_seed(seed, 3, &[n, ell, i]);
                let f = random_operator_table(n, LEMMA6_DIM, s);
                out.push(check_lemma6(n, ell, &f, budget)?.record(Some(s)));
            }
        }
    }
    Ok(out)
}

pub const THEOREM3_STATES: usize = 10;
/// Random conditioning states on top of `ρ_E` and `τ_E`.
pub const THEOREM3_RANDOM_SIGMAS: usize = 20;

/// The trace-norm bound for each conditioning state, `n ∈ {1,2}`,
/// `1 <= ell <= 2n`, `dim_e = 2^n` so that maximal entanglement is possible.
pub fn theorem3_grid(budget: u128, seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for n in 1..=2 {
        let de = 1 << n;
        for i in 0..THEOREM3_STATES {
            let s = item_seed(seed, 4, &[n, i]);
            let k = kind(i);
            let state = random_state(n, de, k, s)?;
            let sigmas = sigma_candidates(&state, THEOREM3_RANDOM_SIGMAS, s ^ 0x5157)?;
            for ell in 1..=2 * n {
                let p = ExpansionParams::new(n, ell, Mode::Quantum)?;
                for r in check_theorem3(&p, &state, &sigmas, k.is_product(), budget)? {
                    out.push(r.with_seed(s).with_note(format!("{k:?}")));
                }
            }
        }
    }
    Ok(out)
}

/// Exhaustively checked field degrees.
pub const EXHAUSTIVE_DEGREES: [usize; 4] = [1, 2, 3, 4];
/// Randomly sampled field degrees and the number of cases at each.
pub const SAMPLED_DEGREES: [usize; 4] = [8, 127, 243, 729];
pub const SAMPLED_CASES: usize = 1000;
/// Cases per sampled degree that also run the `a^(2^lambda) = a` check,
/// which costs `lambda` multiplications each.
const FROBENIUS_CASES: usize = 8;
pub const COUNTED_CASES: usize = 50;

fn failures_record(check: &str, lambda: usize, cases: usize, failures: usize) -> CheckRecord {
    CheckRecord::new(
        check,
        json!({"lambda": lambda, "cases": cases}),
        failures as f64,
        0.0,
        failures == 0,
    )
}

fn mul(a: &BitPoly, b: &BitPoly, lambda: usize) -> Result<BitPoly> {
    Ok(gf_mul(a, b, &find_irreducible(lambda), Backend::Karatsuba)?.0)
}

/// Commutative ring laws plus the field property: exhaustively for small
/// degrees (every nonzero element has an inverse), by sampling above.
pub fn field_axioms(seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for lambda in EXHAUSTIVE_DEGREES {
        let els: Vec<BitPoly> = (0..1u64 << lambda).map(|x| BitPoly::from_u64(x, lambda)).collect();
        let one = BitPoly::one(lambda);
        let mut cases = 0;
        let mut failures = 0;
        for a in &els {
            let has_inverse = a.is_zero() || els.iter().any(|b| mul(a, b, lambda).is_ok_and(|p| p == one));
            failures += usize::from(!has_inverse);
            for b in &els {
                for c in &els {
                    cases += 1;
                    failures += usize::from(!ring_laws_hold(a, b, c, lambda)?);
                }
            }
        }
        out.push(failures_record("gf2_field_axioms_exhaustive", lambda, cases, failures));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for lambda in SAMPLED_DEGREES {
        let mut failures = 0;
        for i in 0..SAMPLED_CASES {
            let a = BitPoly::random(lambda, &mut rng);
            let b = BitPoly::random(lambda, &mut rng);
            let c = BitPoly::random(lambda, &mut rng);
            failures += usize::from(!ring_laws_hold(&a, &b, &c, lambda)?);
            if i < FROBENIUS_CASES {
                let mut x = a.clone();
                for _ in 0..lambda {
                    x = mul(&x, &x, lambda)?;
                }
                failures += usize::from(x != a);
            }
        }
        out.push(failures_record("gf2_field_axioms_sampled", lambda, SAMPLED_CASES, failures));
    }
    Ok(out)
}

fn ring_laws_hold(a: &BitPoly, b: &BitPoly, c: &BitPoly, lambda: usize) -> Result<bool> {
    let spec = find_irreducible(lambda);
    let one = BitPoly::one(lambda);
    let ab = mul(a, b, lambda)?;
    let comm = ab == mul(b, a, lambda)?;
    let assoc = mul(&ab, c, lambda)? == mul(a, &mul(b, c, lambda)?, lambda)?;
    let dist = mul(a, &gf_add(b, c, &spec)?, lambda)? == gf_add(&ab, &mul(a, c, lambda)?, &spec)?;
    let ident = mul(a, &one, lambda)? == *a;
    let add_inv = gf_add(a, a, &spec)?.is_zero();
    Ok(comm && assoc && dist && ident && add_inv)
}

/// Every backend gives the same carry-less product. The bit-serial counting
/// implementation must agree too and reproduce the analytic gate count; it is
/// slow, so sampled degrees run it on the first [`COUNTED_CASES`] only.
pub fn backend_equivalence(seed: u64) -> Result<Vec<CheckRecord>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xbac0);
    let mut out = Vec::new();
    for lambda in EXHAUSTIVE_DEGREES {
        let mut cases = 0;
        let mut failures = 0;
        for a in 0..1u64 << lambda {
            for b in 0..1u64 << lambda {
                cases += 1;
                failures += usize::from(!backends_agree(&BitPoly::from_u64(a, lambda), &BitPoly::from_u64(b, lambda), true));
            }
        }
        out.push(failures_record("gf2_backend_equivalence_exhaustive", lambda, cases, failures));
    }
    for lambda in SAMPLED_DEGREES {
        let mut failures = 0;
        for i in 0..SAMPLED_CASES {
            let a = BitPoly::random(lambda, &mut rng);
            let b = BitPoly::random(lambda, &mut rng);
            failures += usize::from(!backends_agree(&a, &b, i < COUNTED_CASES));
        }
        out.push(failures_record("gf2_backend_equivalence_sampled", lambda, SAMPLED_CASES, failures));
    }
    Ok(out)
}

fn backends_agree(a: &BitPoly, b: &BitPoly, counted: bool) -> bool {
    let (reference, _) = clmul(a, b, Backend::Schoolbook);
    Backend::ALL.into_iter().all(|backend| {
        let (fast, cost) = clmul(a, b, backend);
        if fast != reference {
            return false;
        }
        if !counted {
            return true;
        }
        let (slow, count) = clmul_counted(a, b, backend);
        slow == reference && cost == count
    })
}

/// Remainder by bitwise long division, independent of the word-level code.
pub fn long_division_oracle(p: &BitPoly, lambda: usize, low: &[usize]) -> BitPoly {
    let mut bits: Vec<bool> = (0..p.nbits()).map(|i| p.bit(i)).collect();
    for d in (lambda..bits.len()).rev() {
        if bits[d] {
            bits[d] = false;
            for &e in low {
                bits[d - lambda + e] ^= true;
            }
        }
    }
    let exps: Vec<usize> = (0..lambda.min(bits.len())).filter(|&i| bits[i]).collect();
    BitPoly::from_exponents(&exps, lambda)
}

/// `reduce` against [`long_division_oracle`] on every `(2·lambda − 1)`-bit
/// input for small degrees, and sampled inputs above.
pub fn reduce_oracle(seed: u64) -> Result<Vec<CheckRecord>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x2ed0);
    let mut out = Vec::new();
    for lambda in EXHAUSTIVE_DEGREES {
        let spec = find_irreducible(lambda);
        let width = 2 * lambda - 1;
        let mut failures = 0;
        for x in 0..1u64 << width {
            let p = BitPoly::from_u64(x, width);
            failures += usize::from(reduce(&p, &spec)?.0 != long_division_oracle(&p, lambda, spec.low_exponents()));
        }
        out.push(failures_record("gf2_reduce_vs_long_division_exhaustive", lambda, 1 << width, failures));
    }
    for lambda in SAMPLED_DEGREES {
        let spec = find_irreducible(lambda);
        let mut failures = 0;
        for _ in 0..SAMPLED_CASES {
            let p = BitPoly::random(2 * lambda - 1, &mut rng);
            failures += usize::from(reduce(&p, &spec)?.0 != long_division_oracle(&p, lambda, spec.low_exponents()));
        }
        out.push(failures_record("gf2_reduce_vs_long_division_sampled", lambda, SAMPLED_CASES, failures));
    }
    Ok(out)
}
