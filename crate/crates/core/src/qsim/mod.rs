//! Dense density-matrix simulation of the quantum scheme and its bounds.

mod checks;
mod ops;
mod state;

pub use checks::{
    check_full_randomization, check_lemma5, check_lemma6, check_theorem3, random_operator_table, sigma_candidates,
    theorem3_lhs, Lemma6Report, BOUND_REL_TOL, IDENTITY_TOL,
};
pub use ops::{
    collision_entropy_term, full_qotp_average, qotp_apply, r_uv, trace_norm, trace_norm_svd, PauliKey,
    DOMINATION_TOL, HERMITIAN_TOL, SUPPORT_CUTOFF,
};
pub use state::{mixed_times, random_state, CMatrix, QState, StateKind, PSD_TOL, STRUCT_TOL};
