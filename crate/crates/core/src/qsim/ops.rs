use num_complex::Complex64;

use super::state::{hermiticity_defect, hermitize, CMatrix, QState};
use crate::budget::{ensure, pow2};
use crate::error::{precondition, Error, Result};
use crate::gf2::BitPoly;
use crate::keyexpand::{expand_affine, ExpansionParams, Mode};

/// Tolerance for Hermitian inputs to [`trace_norm`], relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A 2n-bit Pauli key `β = s ‖ q`: qubit `i` gets `X^{s_i} Z^{q_i}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliKey {
    n: usize,
    /// `s` and `q` as masks over basis indices of A.
    x_mask: usize,
    z_mask: usize,
}

impl PauliKey {
    pub fn from_bits(beta: &BitPoly) -> Result<Self> {
        if !beta.nbits().is_multiple_of(2) || beta.nbits() > 40 {
            return Err(precondition(format!("Pauli key must have 2n <= 40 bits, got {}", beta.nbits())));
        }
        let n = beta.nbits() / 2;
        let mut x_mask = 0;
        let mut z_mask = 0;
        for i in 0..n {
            let slot = n - 1 - i;
            x_mask |= usize::from(beta.bit(i)) << slot;
            z_mask |= usize::from(beta.bit(n + i)) << slot;
        }
        Ok(PauliKey { n, x_mask, z_mask })
    }

    /// The key whose bits are the low `2n` bits of `index`.
    pub fn from_index(n: usize, index: u64) -> Self {
        PauliKey::from_bits(&BitPoly::from_u64(index, 2 * n)).expect("valid key width")
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

#[inline]
fn sign(z_mask: usize, a: usize) -> f64 {
    if (z_mask & a).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Adds `weight · (U_β ⊗ 1) ρ (U_β ⊗ 1)†` into `acc`.
fn add_conjugated(acc: &mut CMatrix, key: &PauliKey, rho: &CMatrix, de: usize, weight: f64) {
    let da = 1usize << key.n;
    for a in 0..da {
        let ra = (a ^ key.x_mask) * de;
        let sa = sign(key.z_mask, a) * weight;
        for b in 0..da {
            let rb = (b ^ key.x_mask) * de;
            let s = sa * sign(key.z_mask, b);
            for e in 0..de {
                for f in 0..de {
                    acc[(ra + e, rb + f)] += rho[(a * de + e, b * de + f)] * s;
                }
            }
        }
    }
}

/// `(U_β ⊗ 1_E) ρ (U_β ⊗ 1_E)†` with `U_β = ⊗_i X^{s_i} Z^{q_i}`.
pub fn qotp_apply(key: &PauliKey, state: &QState) -> Result<QState> {
    if key.n != state.n() {
        return Err(precondition(format!("key acts on {} qubits, state has {}", key.n, state.n())));
    }
    let mut out = CMatrix::zeros(state.dim(), state.dim());
    add_conjugated(&mut out, key, state.matrix(), state.dim_e(), 1.0);
    Ok(QState::raw(state.n(), state.dim_e(), out))
}

/// Average of `F_β(ρ)` over all `2^{2n}` keys.
pub fn full_qotp_average(state: &QState, budget: u128) -> Result<QState> {
    let n = state.n();
    ensure(pow2(2 * n).saturating_mul((state.dim() * state.dim()) as u128), budget)?;
    let keys = 1u64 << (2 * n);
    let w = 1.0 / keys as f64;
    let mut acc = CMatrix::zeros(state.dim(), state.dim());
    for idx in 0..keys {
        add_conjugated(&mut acc, &PauliKey::from_index(n, idx), state.matrix(), state.dim_e(), w);
    }
    Ok(QState::raw(n, state.dim_e(), acc))
}

/// `R_uv(ρ) = 2^-ell Σ_k F_{b(k,u,v)}(ρ)` with `b` the affine expansion.
pub fn r_uv(p: &ExpansionParams, u: &BitPoly, v: &BitPoly, state: &QState, budget: u128) -> Result<QState> {
    if p.mode != Mode::Quantum || p.n != state.n() {
        return Err(precondition("R_uv needs quantum parameters matching the state"));
    }
    ensure(pow2(p.ell).saturating_mul((state.dim() * state.dim()) as u128), budget)?;
    let keys = 1u64 << p.ell;
    let w = 1.0 / keys as f64;
    let mut acc = CMatrix::zeros(state.dim(), state.dim());
    for k in 0..keys {
        let beta = expand_affine(&BitPoly::from_u64(k, p.ell), u, v, p)?;
        add_conjugated(&mut acc, &PauliKey::from_bits(&beta)?, state.matrix(), state.dim_e(), w);
    }
    Ok(QState::raw(state.n(), state.dim_e(), acc))
}

/// `‖M‖₁ = Σ|λ_i|` for Hermitian `M`.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    let scale = m.camax().max(1.0);
    if hermiticity_defect(m) > HERMITIAN_TOL * scale {
        return Err(Error::Domain("trace_norm expects a Hermitian matrix".into()));
    }
    Ok(hermitize(m.clone()).symmetric_eigenvalues().iter().map(|l| l.abs()).sum())
}

/// Sum of singular values; valid for any square matrix.
pub fn trace_norm_svd(m: &CMatrix) -> f64 {
    m.clone().singular_values().sum()
}

/// `σ^{-1/2}` on the support of `σ` (eigenvalues above `cutoff`), zero on
/// its kernel. Also returns the kernel projector.
fn inv_sqrt_on_support(sigma: &CMatrix, cutoff: f64) -> (CMatrix, CMatrix) {
    let eig = hermitize(sigma.clone()).symmetric_eigen();
    let d = sigma.nrows();
    let mut inv = CMatrix::zeros(d, d);
    let mut kernel = CMatrix::zeros(d, d);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        let col = eig.eigenvectors.column(i);
        let proj = col * col.adjoint();
        if l > cutoff {
            inv += proj * Complex64::new(1.0 / l.sqrt(), 0.0);
        } else {
            kernel += proj;
        }
    }
    (inv, kernel)
}

/// Eigenvalues of `σ_E` at or below this count as its kernel.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Largest weight of `ρ_E` tolerated on the kernel of `σ_E`.
pub const DOMINATION_TOL: f64 = 1e-10;

/// `Tr[ρ S ρ S]` with `S = 1_A ⊗ σ_E^{-1/2}`.
///
/// Errors with [`Error::Domain`] unless `supp ρ_E ⊆ supp σ_E`.
pub fn collision_entropy_term(state: &QState, sigma_e: &CMatrix) -> Result<f64> {
    let de = state.dim_e();
    if sigma_e.nrows() != de || sigma_e.ncols() != de {
        return Err(precondition("sigma_E has the wrong dimension"));
    }
    let (inv, kernel) = inv_sqrt_on_support(sigma_e, SUPPORT_CUTOFF);
    let leak = (&kernel * state.reduced_e()).trace().re;
    if leak > DOMINATION_TOL {
        return Err(Error::Domain(format!(
            "sigma_E does not dominate rho_E (weight {leak:e} on its kernel)"
        )));
    }
    let s = CMatrix::identity(state.dim_a(), state.dim_a()).kronecker(&inv);
    let rs = state.matrix() * s;
    Ok((&rs * &rs).trace().re)
}
