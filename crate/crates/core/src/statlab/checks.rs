use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use super::dist::{collision_probability, distance_to_uniform, to_f64, Distribution};
use super::families::Family;
use super::min_entropy;
use crate::budget::{ensure, pow2};
use crate::error::{precondition, Result};
use crate::gf2::BitPoly;
use crate::keyexpand::{expand_affine, ExpansionParams, Mode};
use crate::report::CheckRecord;

/// Absolute slack on the collision bound.
pub const THEOREM1_TOL: f64 = 1e-15;
/// Absolute slack on distance-versus-collision comparisons.
pub const DISTANCE_TOL: f64 = 1e-12;

/// Exact law of `(U, V, X ⊕ h_UV(K))` with `K`, `U`, `V` uniform and `X ~ dx`.
///
/// Outcome layout, low bits first: `u` (lambda bits), `v` (tail_len bits),
/// then the masked payload (n bits).
pub fn ciphertext_distribution(p: &ExpansionParams, dx: &Distribution, budget: u128) -> Result<Distribution> {
    if p.mode != Mode::Classical {
        return Err(precondition("ciphertext enumeration is classical only"));
    }
    if dx.nbits() != p.n {
        return Err(precondition(format!("plaintext width {} != n = {}", dx.nbits(), p.n)));
    }
    let tuple_bits = p.ell + p.lambda + p.tail_len;
    let required = pow2(tuple_bits).saturating_mul(dx.support_len() as u128);
    ensure(required, budget)?;
    let out_bits = p.lambda + p.tail_len + p.n;
    if out_bits > 64 {
        return Err(precondition("ciphertext outcomes wider than 64 bits"));
    }
    let support: Vec<(u64, u128)> = dx.iter().collect();
    let mut pairs = Vec::with_capacity(required as usize);
    for u in 0..1u64 << p.lambda {
        let ub = BitPoly::from_u64(u, p.lambda);
        for v in 0..1u64 << p.tail_len {
            let vb = BitPoly::from_u64(v, p.tail_len);
            let prefix = u | v << p.lambda;
            for k in 0..1u64 << p.ell {
                let pad = expand_affine(&BitPoly::from_u64(k, p.ell), &ub, &vb, p)?
                    .to_u64()
                    .expect("pad fits in 64 bits");
                for &(x, w) in &support {
                    pairs.push((prefix | (x ^ pad) << (p.lambda + p.tail_len), w));
                }
            }
        }
    }
    Distribution::from_weights(out_bits, pairs)
}

/// Collision probability of the ciphertext against `2^-2n (1 + 2^(n−ell)·cp(X))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Report {
    pub n: usize,
    pub ell: usize,
    pub lhs: BigRational,
    pub bound: BigRational,
    pub pass: bool,
    /// `ell < n/2`: the field is larger than the key.
    pub outside_branch: bool,
}

impl Theorem1Report {
    pub fn record(&self, label: &str) -> CheckRecord {
        let mut r = CheckRecord::new(
            "classical_collision_bound",
            json!({"n": self.n, "ell": self.ell, "family": label}),
            to_f64(&self.lhs),
            to_f64(&self.bound),
            self.pass,
        );
        if self.outside_branch {
            r = r.with_note("outside proof's stated branch: lambda > ell");
        }
        r
    }
}

pub fn check_theorem1(p: &ExpansionParams, dx: &Distribution, budget: u128) -> Result<Theorem1Report> {
    let y = ciphertext_distribution(p, dx, budget)?;
    Ok(theorem1_from(p, dx, &y))
}

fn theorem1_from(p: &ExpansionParams, dx: &Distribution, y: &Distribution) -> Theorem1Report {
    let lhs = collision_probability(y);
    let two_n = BigRational::from_integer(BigInt::one() << (2 * p.n));
    let gain = BigRational::from_integer(BigInt::one() << (p.n - p.ell));
    let bound = (BigRational::one() + gain * collision_probability(dx)) / two_n;
    let pass = lhs <= &bound + tolerance(THEOREM1_TOL);
    Theorem1Report {
        n: p.n,
        ell: p.ell,
        lhs,
        bound,
        pass,
        outside_branch: 2 * p.ell < p.n,
    }
}

/// `x` as an exact binary fraction (within one part in 2^60).
fn tolerance(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite tolerance")
}

/// Distance of the ciphertext from uniform against the collision-derived
/// `eps* = sqrt(max(0, (cp·|S| − 1)/2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndistReport {
    pub n: usize,
    pub ell: usize,
    pub delta: BigRational,
    pub eps_star: f64,
    /// `delta <= eps*` decided in exact arithmetic.
    pub exact_pass: bool,
    pub pass: bool,
}

impl IndistReport {
    pub fn record(&self, label: &str) -> CheckRecord {
        CheckRecord::new(
            "classical_distance_vs_collision",
            json!({"n": self.n, "ell": self.ell, "family": label}),
            to_f64(&self.delta),
            self.eps_star,
            self.pass,
        )
    }
}

pub fn check_indistinguishability(p: &ExpansionParams, dx: &Distribution, budget: u128) -> Result<IndistReport> {
    let y = ciphertext_distribution(p, dx, budget)?;
    Ok(indist_from(p, &y))
}

fn indist_from(p: &ExpansionParams, y: &Distribution) -> IndistReport {
    let delta = distance_to_uniform(y);
    let space = BigRational::from_integer(BigInt::one() << y.nbits());
    let excess = (collision_probability(y) * space - BigRational::one()) / BigRational::from_integer(2.into());
    let excess = if excess < BigRational::zero() { BigRational::zero() } else { excess };
    let exact_pass = &delta * &delta <= excess;
    let eps_star = excess.to_f64().unwrap_or(f64::NAN).sqrt();
    let pass = exact_pass || to_f64(&delta) <= eps_star + DISTANCE_TOL;
    IndistReport {
        n: p.n,
        ell: p.ell,
        delta,
        eps_star,
        exact_pass,
        pass,
    }
}

/// Both classical checks from a single enumeration.
pub fn check_classical_pair(
    p: &ExpansionParams,
    dx: &Distribution,
    budget: u128,
) -> Result<(Theorem1Report, IndistReport)> {
    let y = ciphertext_distribution(p, dx, budget)?;
    Ok((theorem1_from(p, dx, &y), indist_from(p, &y)))
}

/// A feasible classical sizing `ell = n − t + 2j − 5` at `epsilon = 2^-j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizingInstance {
    pub n: usize,
    pub t: usize,
    pub log_inv_eps: usize,
    pub ell: usize,
}

impl SizingInstance {
    pub fn epsilon(&self) -> f64 {
        2f64.powi(-(self.log_inv_eps as i32))
    }
}

/// All `(t, j)` with integer `0 <= t <= n`, `j >= 1`, `t >= 2j − 5` and
/// `1 <= ell <= n`.
pub fn sizing_instances(n: usize) -> Vec<SizingInstance> {
    let mut out = Vec::new();
    for t in 0..=n {
        for j in 1..=(t + 5) / 2 {
            let ell = (n + 2 * j) as isize - t as isize - 5;
            if ell >= 1 && ell as usize <= n {
                out.push(SizingInstance { n, t, log_inv_eps: j, ell: ell as usize });
            }
        }
    }
    out
}

/// `Δ(ciphertext, uniform) <= 8ε` for every shipped family with
/// `H_min >= t`.
pub fn check_sizing(inst: &SizingInstance, budget: u128) -> Result<Vec<CheckRecord>> {
    let p = ExpansionParams::new(inst.n, inst.ell, Mode::Classical)?;
    let bound = 8.0 * inst.epsilon();
    let mut out = Vec::new();
    for fam in Family::grid(inst.n) {
        let dx = fam.distribution(inst.n)?;
        if min_entropy(&dx) + 1e-12 < inst.t as f64 {
            continue;
        }
        let y = ciphertext_distribution(&p, &dx, budget)?;
        let delta = to_f64(&distance_to_uniform(&y));
        out.push(CheckRecord::new(
            "classical_sizing_distance",
            json!({"n": inst.n, "t": inst.t, "epsilon": format!("2^-{}", inst.log_inv_eps), "ell": inst.ell, "family": fam.name()}),
            delta,
            bound,
            delta <= bound + DISTANCE_TOL,
        ));
    }
    Ok(out)
}
