use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keyexpand::{ExpansionParams, Mode};

/// Slack in the classical key-length formula (entropic security from
/// `(t−2, 8ε)`-indistinguishability).
const CLASSICAL_SLACK: f64 = -5.0;
/// Slack in the quantum key-length formula (strong entropic security from
/// `(t−1, ε/2)`-indistinguishability).
const QUANTUM_SLACK: f64 = 3.0;

/// Scheme parameters: message length, entropy bound, security level and the
/// derived key length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub n: usize,
    /// Assumed lower bound on the plaintext min-entropy, in bits.
    pub t: f64,
    pub epsilon: f64,
    pub mode: Mode,
    pub ell: usize,
    pub expansion: ExpansionParams,
}

impl SchemeParams {
    pub fn derive(n: usize, t: f64, epsilon: f64, mode: Mode) -> Result<Self> {
        let ell = derive_key_length(n, t, epsilon, mode)?;
        let expansion = ExpansionParams::new(n, ell, mode)?;
        Ok(SchemeParams { n, t, epsilon, mode, ell, expansion })
    }
}

fn log2_inv(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Parameter {
            bound: "0 < epsilon <= 1",
            detail: format!("epsilon = {epsilon}"),
        });
    }
    Ok(-epsilon.log2())
}

/// `ceil(x)`, ignoring floating-point noise just above an integer.
fn bit_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x.ceil()
    }
}

/// Key length in bits: `ceil(n − t + 2·log2(1/ε) − 5)` classically,
/// `ceil(n − t + 2·log2(1/ε) + 3)` for qubits.
pub fn derive_key_length(n: usize, t: f64, epsilon: f64, mode: Mode) -> Result<usize> {
    let l = log2_inv(epsilon)?;
    if !t.is_finite() {
        return Err(Error::Parameter { bound: "t finite", detail: format!("t = {t}") });
    }
    let nf = n as f64;
    let slack = match mode {
        Mode::Classical => {
            if t < 2.0 * l - 5.0 - 1e-9 {
                return Err(Error::Parameter {
                    bound: "t >= 2 log2(1/epsilon) - 5",
                    detail: format!("t = {t}, 2 log2(1/epsilon) - 5 = {}", 2.0 * l - 5.0),
                });
            }
            CLASSICAL_SLACK
        }
        Mode::Quantum => {
            if t < -nf || t > nf {
                return Err(Error::Parameter {
                    bound: "-n <= t <= n",
                    detail: format!("t = {t}, n = {n}"),
                });
            }
            QUANTUM_SLACK
        }
    };
    checked_length(n, bit_ceil(nf - t + 2.0 * l + slack), mode)
}

/// Key length for quantum entropic *indistinguishability* alone,
/// `ceil(n − t + 2·log2(1/ε))`. Advisory; encryption always uses
/// [`derive_key_length`].
pub fn indistinguishability_key_length(n: usize, t: f64, epsilon: f64) -> Result<usize> {
    let l = log2_inv(epsilon)?;
    checked_length(n, bit_ceil(n as f64 - t + 2.0 * l), Mode::Quantum)
}

fn checked_length(n: usize, ell: f64, mode: Mode) -> Result<usize> {
    let (max, bound) = match mode {
        Mode::Classical => (n as f64, "1 <= ell <= n"),
        Mode::Quantum => (2.0 * n as f64, "1 <= ell <= 2n"),
    };
    if !(1.0..=max).contains(&ell) {
        return Err(Error::Parameter {
            bound,
            detail: format!("derived ell = {ell}, n = {n}"),
        });
    }
    Ok(ell as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_example() {
        assert_eq!(derive_key_length(128, 64.0, 2f64.powi(-32), Mode::Classical).unwrap(), 123);
    }

    #[test]
    fn quantum_examples() {
        assert_eq!(derive_key_length(128, 0.0, 2f64.powi(-10), Mode::Quantum).unwrap(), 151);
        assert_eq!(indistinguishability_key_length(128, 0.0, 2f64.powi(-10)).unwrap(), 148);
        assert_eq!(derive_key_length(32, 0.0, 2f64.powi(-5), Mode::Quantum).unwrap(), 45);
    }

    #[test]
    fn fractional_lengths_round_up() {
        // 2 log2(1/0.3) = 3.47..., 16 - 8 + 3.47 - 5 = 6.47 -> 7
        assert_eq!(derive_key_length(16, 8.0, 0.3, Mode::Classical).unwrap(), 7);
        assert_eq!(derive_key_length(16, 8.5, 0.125, Mode::Classical).unwrap(), 9);
    }

    #[test]
    fn bounds_are_named() {
        let e = derive_key_length(128, 10.0, 2f64.powi(-32), Mode::Classical).unwrap_err();
        assert!(matches!(e, Error::Parameter { bound: "t >= 2 log2(1/epsilon) - 5", .. }));
        let e = derive_key_length(8, 0.0, 0.0, Mode::Classical).unwrap_err();
        assert!(matches!(e, Error::Parameter { bound: "0 < epsilon <= 1", .. }));
        let e = derive_key_length(8, 9.0, 0.5, Mode::Quantum).unwrap_err();
        assert!(matches!(e, Error::Parameter { bound: "-n <= t <= n", .. }));
        // n - t + 2 log - 5 = 4 - 4 + 2 - 5 < 1
        let e = derive_key_length(4, 4.0, 0.5, Mode::Classical).unwrap_err();
        assert!(matches!(e, Error::Parameter { bound: "1 <= ell <= n", .. }));
        let e = derive_key_length(4, -4.0, 2f64.powi(-4), Mode::Quantum).unwrap_err();
        assert!(matches!(e, Error::Parameter { bound: "1 <= ell <= 2n", .. }));
    }

    #[test]
    fn scheme_params_carry_expansion() {
        let p = SchemeParams::derive(16, 8.0, 0.125, Mode::Classical).unwrap();
        assert_eq!(p.ell, 9);
        assert_eq!(p.expansion.lambda, 9);
        assert_eq!(p.expansion.tail_len, 7);
    }
}
