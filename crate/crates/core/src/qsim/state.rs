use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution as _, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Structural tolerance: hermiticity and unit trace.
pub const STRUCT_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as nonnegative.
pub const PSD_TOL: f64 = 1e-10;

/// Density matrix on `(C^2)^{⊗n} ⊗ C^{dim_e}`.
///
/// Basis index `a·dim_e + e`; qubit `i` (0-based) is bit `n−1−i` of `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct QState {
    n: usize,
    dim_e: usize,
    rho: CMatrix,
}

impl QState {
    pub fn new(n: usize, dim_e: usize, rho: CMatrix) -> Result<Self> {
        let s = QState::from_parts(n, dim_e, rho)?;
        s.validate()?;
        Ok(s)
    }

    fn from_parts(n: usize, dim_e: usize, rho: CMatrix) -> Result<Self> {
        if n > 10 || dim_e == 0 {
            return Err(precondition("state dimensions out of range"));
        }
        let d = (1usize << n) * dim_e;
        if rho.nrows() != d || rho.ncols() != d {
            return Err(precondition(format!(
                "matrix is {}x{}, expected {d}x{d}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(QState { n, dim_e, rho })
    }

    /// No invariant checks; for intermediate sums and differences.
    pub(crate) fn raw(n: usize, dim_e: usize, rho: CMatrix) -> Self {
        QState { n, dim_e, rho }
    }

    /// Hermitian, unit trace, eigenvalues `>= −PSD_TOL`.
    pub fn validate(&self) -> Result<()> {
        if hermiticity_defect(&self.rho) > STRUCT_TOL {
            return Err(Error::Domain("matrix is not Hermitian".into()));
        }
        let tr = self.rho.trace();
        if (tr.re - 1.0).abs() > STRUCT_TOL || tr.im.abs() > STRUCT_TOL {
            return Err(Error::Domain(format!("trace is {tr}, not 1")));
        }
        let min = self.rho.clone().symmetric_eigenvalues().min();
        if min < -PSD_TOL {
            return Err(Error::Domain(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim_a(&self) -> usize {
        1 << self.n
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn dim(&self) -> usize {
        self.dim_a() * self.dim_e
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    /// `Tr_E ρ`.
    pub fn reduced_a(&self) -> CMatrix {
        let (da, de) = (self.dim_a(), self.dim_e);
        CMatrix::from_fn(da, da, |a, b| (0..de).map(|e| self.rho[(a * de + e, b * de + e)]).sum())
    }

    /// `Tr_A ρ`.
    pub fn reduced_e(&self) -> CMatrix {
        let (da, de) = (self.dim_a(), self.dim_e);
        CMatrix::from_fn(de, de, |e, f| (0..da).map(|a| self.rho[(a * de + e, a * de + f)]).sum())
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }
}

pub(crate) fn hermiticity_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `τ ⊗ ρ_E` with `τ = 1/2^n` the fully mixed state on A.
pub fn mixed_times(n: usize, rho_e: &CMatrix) -> CMatrix {
    let da = 1usize << n;
    let tau = CMatrix::identity(da, da).unscale(da as f64);
    tau.kronecker(rho_e)
}

/// Shape of a seeded random state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// Haar-random pure state on `AE`.
    Pure,
    /// Normalised `G G†` with `G` complex Ginibre: full rank.
    Mixed,
    /// `ρ_A ⊗ ρ_E`, both factors Ginibre-mixed.
    Product,
    /// `|ψ_A⟩⟨ψ_A| ⊗ |ψ_E⟩⟨ψ_E|`.
    PureProduct,
    /// Uniform superposition of Schmidt rank `min(2^n, dim_e)`, rotated by a
    /// random unitary on A.
    MaxEntangled,
}

impl StateKind {
    pub const ALL: [StateKind; 5] = [
        StateKind::Pure,
        StateKind::Mixed,
        StateKind::Product,
        StateKind::PureProduct,
        StateKind::MaxEntangled,
    ];

    pub fn is_product(self) -> bool {
        matches!(self, StateKind::Product | StateKind::PureProduct)
    }
}

/// A deterministic function of `(n, dim_e, kind, seed)`.
pub fn random_state(n: usize, dim_e: usize, kind: StateKind, seed: u64) -> Result<QState> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let da = 1usize << n;
    let rho = match kind {
        StateKind::Pure => projector(&gaussian(&mut rng, da * dim_e, 1)),
        StateKind::Mixed => ginibre_state(&mut rng, da * dim_e),
        StateKind::Product => ginibre_state(&mut rng, da).kronecker(&ginibre_state(&mut rng, dim_e)),
        StateKind::PureProduct => {
            projector(&gaussian(&mut rng, da, 1)).kronecker(&projector(&gaussian(&mut rng, dim_e, 1)))
        }
        StateKind::MaxEntangled => {
            let r = da.min(dim_e);
            let u = random_unitary(&mut rng, da);
            let mut psi = CMatrix::zeros(da * dim_e, 1);
            for i in 0..r {
                for a in 0..da {
                    psi[(a * dim_e + i, 0)] += u[(a, i)];
                }
            }
            projector(&psi)
        }
    };
    QState::new(n, dim_e, hermitize(rho))
}

fn gaussian(rng: &mut ChaCha20Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
fn projector(psi: &CMatrix) -> CMatrix {
    let p = psi * psi.adjoint();
    let tr = p.trace().re;
    p.unscale(tr)
}

fn ginibre_state(rng: &mut ChaCha20Rng, d: usize) -> CMatrix {
    let g = gaussian(rng, d, d);
    projector(&g)
}

fn random_unitary(rng: &mut ChaCha20Rng, d: usize) -> CMatrix {
    let g = gaussian(rng, d, d);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    // fix column phases so the distribution is Haar
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `(M + M†)/2`: removes rounding asymmetry.
pub(crate) fn hermitize(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()).unscale(2.0)
}
