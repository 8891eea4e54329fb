//! Entropically secure encryption with affine key expansion over GF(2^lambda),
//! plus exact verification labs and a gate-count benchmark.

pub mod bench;
pub mod budget;
pub mod error;
pub mod ese;
pub mod gf2;
pub mod keyexpand;
pub mod qsim;
pub mod report;
pub mod rng;
pub mod statlab;
pub mod suites;

pub use error::{Error, Result};
