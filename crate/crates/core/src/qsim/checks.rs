use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution as _, StandardNormal};
use serde_json::json;

use super::ops::{collision_entropy_term, full_qotp_average, r_uv, trace_norm};
use super::state::{mixed_times, random_state, CMatrix, QState, StateKind};
use crate::budget::{ensure, pow2};
use crate::error::{precondition, Result};
use crate::gf2::BitPoly;
use crate::keyexpand::{expand_affine, ExpansionParams, Mode};
use crate::report::CheckRecord;
use num_complex::Complex64;

/// Identity checks: trace-norm residual allowed.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Relative slack on the trace-norm bounds.
pub const BOUND_REL_TOL: f64 = 1e-9;

fn state_params(state: &QState) -> serde_json::Value {
    json!({"n": state.n(), "dim_e": state.dim_e()})
}

/// `‖2^-2n Σ_β F_β(ρ) − τ ⊗ ρ_E‖₁ <= IDENTITY_TOL`.
pub fn check_full_randomization(state: &QState, budget: u128) -> Result<CheckRecord> {
    let avg = full_qotp_average(state, budget)?;
    let target = mixed_times(state.n(), &state.reduced_e());
    let r = trace_norm(&(avg.matrix() - target))?;
    Ok(CheckRecord::new("qotp_full_randomization", state_params(state), r, IDENTITY_TOL, r <= IDENTITY_TOL))
}

/// For one `u`: `‖E_v R_uv(ρ) − τ ⊗ ρ_E‖₁ <= IDENTITY_TOL`.
pub fn check_lemma5(p: &ExpansionParams, u: &BitPoly, state: &QState, budget: u128) -> Result<CheckRecord> {
    ensure(pow2(p.ell + p.tail_len).saturating_mul((state.dim() * state.dim()) as u128), budget)?;
    let d = state.dim();
    let mut acc = CMatrix::zeros(d, d);
    let vs = 1u64 << p.tail_len;
    for v in 0..vs {
        let r = r_uv(p, u, &BitPoly::from_u64(v, p.tail_len), state, budget)?;
        acc += r.into_matrix();
    }
    acc.unscale_mut(vs as f64);
    let r = trace_norm(&(acc - mixed_times(state.n(), &state.reduced_e())))?;
    Ok(CheckRecord::new(
        "lemma5_v_average",
        json!({"n": p.n, "ell": p.ell, "u": u.to_u64(), "dim_e": state.dim_e()}),
        r,
        IDENTITY_TOL,
        r <= IDENTITY_TOL,
    ))
}

/// Both sides of the pair-expectation identity for an operator-valued `f`
/// on 2n-bit strings, and the largest entrywise residual.
#[derive(Debug, Clone)]
pub struct Lemma6Report {
    pub n: usize,
    pub ell: usize,
    pub lhs: CMatrix,
    pub rhs: CMatrix,
    pub residual: f64,
    /// `d · max_β max|f(β)_ij|²`, a bound on any product entry.
    pub scale: f64,
    pub pass: bool,
}

impl Lemma6Report {
    pub fn record(&self, seed: Option<u64>) -> CheckRecord {
        let r = CheckRecord::new(
            "lemma6_pair_identity",
            json!({"n": self.n, "ell": self.ell, "d": self.lhs.nrows()}),
            self.residual,
            IDENTITY_TOL * self.scale,
            self.pass,
        );
        match seed {
            Some(s) => r.with_seed(s),
            None => r,
        }
    }
}

/// Gaussian complex `d×d` matrices, one per 2n-bit string.
pub fn random_operator_table(n: usize, d: usize, seed: u64) -> Vec<CMatrix> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..1usize << (2 * n))
        .map(|_| CMatrix::from_fn(d, d, |_, _| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))))
        .collect()
}

/// Checks
/// `E_{k,k',u,v} f(b(k,u,v)) f(b(k',u,v))
///   = 2^-ell E_β f(β)² + (E_β f(β))² − 2^-ell E_k (E_g f(k‖g)) (E_g f(k‖g))`
/// by literal enumeration of every term.
pub fn check_lemma6(n: usize, ell: usize, f: &[CMatrix], budget: u128) -> Result<Lemma6Report> {
    let p = ExpansionParams::new(n, ell, Mode::Quantum)?;
    if f.len() != 1 << (2 * n) || f.is_empty() {
        return Err(precondition("f must have one entry per 2n-bit string"));
    }
    let d = f[0].nrows();
    if f.iter().any(|m| m.nrows() != d || m.ncols() != d) {
        return Err(precondition("f values must share one square shape"));
    }
    let cube = (d * d * d) as u128;
    ensure(pow2(2 * ell + p.lambda + p.tail_len).saturating_mul(cube), budget)?;

    let keys = 1u64 << ell;
    let mut lhs = CMatrix::zeros(d, d);
    for u in 0..1u64 << p.lambda {
        let ub = BitPoly::from_u64(u, p.lambda);
        for v in 0..1u64 << p.tail_len {
            let vb = BitPoly::from_u64(v, p.tail_len);
            let idx: Vec<usize> = (0..keys)
                .map(|k| {
                    expand_affine(&BitPoly::from_u64(k, ell), &ub, &vb, &p)
                        .map(|b| b.to_u64().expect("2n <= 64") as usize)
                })
                .collect::<Result<_>>()?;
            for &i in &idx {
                for &j in &idx {
                    lhs += &f[i] * &f[j];
                }
            }
        }
    }
    lhs.unscale_mut((pow2(2 * ell + p.lambda + p.tail_len)) as f64);

    let all = f.len() as f64;
    let inv_keys = 1.0 / keys as f64;
    let mean_sq = f.iter().map(|m| m * m).fold(CMatrix::zeros(d, d), |a, b| a + b).unscale(all);
    let mean = f.iter().fold(CMatrix::zeros(d, d), |a, b| a + b).unscale(all);
    let tails = 1usize << p.tail_len;
    let mut same_key = CMatrix::zeros(d, d);
    for k in 0..keys as usize {
        let row = (0..tails).fold(CMatrix::zeros(d, d), |a, g| a + &f[k | g << ell]).unscale(tails as f64);
        same_key += &row * &row;
    }
    same_key.unscale_mut(keys as f64);
    let rhs = mean_sq.scale(inv_keys) + &mean * &mean - same_key.scale(inv_keys);

    let residual = (&lhs - &rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let peak = f.iter().flat_map(|m| m.iter()).map(|z| z.norm()).fold(0.0, f64::max);
    let scale = (d as f64 * peak * peak).max(f64::MIN_POSITIVE);
    Ok(Lemma6Report {
        n,
        ell,
        lhs,
        rhs,
        residual,
        scale,
        pass: residual <= IDENTITY_TOL * scale,
    })
}

/// `E_{u,v} ‖R_uv(ρ) − τ ⊗ ρ_E‖₁`, exactly enumerated.
pub fn theorem3_lhs(p: &ExpansionParams, state: &QState, budget: u128) -> Result<f64> {
    let dd = (state.dim() * state.dim()) as u128;
    ensure(pow2(p.ell + p.lambda + p.tail_len).saturating_mul(dd), budget)?;
    let target = mixed_times(state.n(), &state.reduced_e());
    let mut total = 0.0;
    for u in 0..1u64 << p.lambda {
        let ub = BitPoly::from_u64(u, p.lambda);
        for v in 0..1u64 << p.tail_len {
            let r = r_uv(p, &ub, &BitPoly::from_u64(v, p.tail_len), state, budget)?;
            total += trace_norm(&(r.into_matrix() - &target))?;
        }
    }
    Ok(total / pow2(p.lambda + p.tail_len) as f64)
}

/// `φ_E`, `τ_E`, then `random` Ginibre states on E.
pub fn sigma_candidates(state: &QState, random: usize, seed: u64) -> Result<Vec<CMatrix>> {
    let de = state.dim_e();
    let mut out = vec![state.reduced_e(), CMatrix::identity(de, de).unscale(de as f64)];
    for i in 0..random as u64 {
        out.push(random_state(0, de, StateKind::Mixed, seed.wrapping_add(i))?.into_matrix());
    }
    Ok(out)
}

/// The trace-norm bound for every candidate `σ_E`:
/// `LHS <= sqrt(2^(n−ell)) · sqrt(Tr σ_E) · sqrt(Tr[ρ S ρ S])`,
/// and for product inputs `LHS <= sqrt(2^(n−ell) · Tr[(ρ_A)²])`.
pub fn check_theorem3(
    p: &ExpansionParams,
    state: &QState,
    sigmas: &[CMatrix],
    is_product: bool,
    budget: u128,
) -> Result<Vec<CheckRecord>> {
    let lhs = theorem3_lhs(p, state, budget)?;
    let gain = 2f64.powi(p.n as i32 - p.ell as i32);
    let params = json!({"n": p.n, "ell": p.ell, "dim_e": state.dim_e()});
    let mut out = Vec::with_capacity(sigmas.len() + 1);
    for (i, sigma) in sigmas.iter().enumerate() {
        let term = collision_entropy_term(state, sigma)?;
        let rhs = (gain * sigma.trace().re * term).sqrt();
        let mut params = params.clone();
        params["sigma"] = json!(i);
        out.push(CheckRecord::new(
            "theorem3_per_sigma",
            params,
            lhs,
            rhs,
            lhs <= rhs * (1.0 + BOUND_REL_TOL),
        ));
    }
    if is_product {
        let rho_a = state.reduced_a();
        let purity = (&rho_a * &rho_a).trace().re;
        let rhs = (gain * purity).sqrt();
        out.push(CheckRecord::new(
            "theorem3_product_collision",
            params,
            lhs,
            rhs,
            lhs <= rhs * (1.0 + BOUND_REL_TOL),
        ));
    }
    Ok(out)
}
