//! Plaintext distributions spanning the min-entropy range.

use serde::{Deserialize, Serialize};

use super::dist::Distribution;
use crate::error::{precondition, Result};

/// Longest geometric tail; keeps weights inside `u128`.
const GEOMETRIC_MAX_SUPPORT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Uniform,
    /// Uniform on the `2^t` strings whose bits at or above `t` are zero.
    Flat { t: usize },
    /// `p(i) = 2^-(i+1)` for `i < m−1` and `p(m−1) = 2^-(m−1)`,
    /// `m = min(2^n, 64)`.
    Geometric,
    PointMass { at: u64 },
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::Uniform => "uniform".into(),
            Family::Flat { t } => format!("flat(t={t})"),
            Family::Geometric => "geometric".into(),
            Family::PointMass { at } => format!("point({at})"),
        }
    }

    pub fn distribution(&self, n: usize) -> Result<Distribution> {
        if n == 0 || n > 32 {
            return Err(precondition("plaintext families need 1 <= n <= 32"));
        }
        match *self {
            Family::Uniform => Distribution::from_weights(n, (0..1u64 << n).map(|x| (x, 1))),
            Family::Flat { t } => {
                if t > n {
                    return Err(precondition(format!("flat family needs t <= n, got t = {t}")));
                }
                Distribution::from_weights(n, (0..1u64 << t).map(|x| (x, 1)))
            }
            Family::Geometric => geometric(n, (1usize << n.min(6)).min(GEOMETRIC_MAX_SUPPORT)),
            Family::PointMass { at } => Distribution::from_weights(n, [(at, 1)]),
        }
    }

    /// Every family at width `n`: uniform, flat for `t = 0..=n`, geometric
    /// and the point mass at zero.
    pub fn grid(n: usize) -> Vec<Family> {
        let mut out = vec![Family::Uniform];
        out.extend((0..=n).map(|t| Family::Flat { t }));
        out.push(Family::Geometric);
        out.push(Family::PointMass { at: 0 });
        out
    }
}

fn geometric(n: usize, m: usize) -> Result<Distribution> {
    // common denominator 2^(m-1)
    let top = m - 1;
    let pairs = (0..m).map(|i| {
        let exp = if i < top { top - i - 1 } else { 0 };
        (i as u64, 1u128 << exp)
    });
    Distribution::from_weights(n, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statlab::{collision_entropy, min_entropy};

    #[test]
    fn entropies_of_families() {
        let n = 4;
        let u = Family::Uniform.distribution(n).unwrap();
        assert_eq!(min_entropy(&u), 4.0);
        assert_eq!(collision_entropy(&u), 4.0);
        for t in 0..=n {
            let f = Family::Flat { t }.distribution(n).unwrap();
            assert_eq!(min_entropy(&f), t as f64);
        }
        let g = Family::Geometric.distribution(n).unwrap();
        assert_eq!(g.total(), 1 << 15);
        assert_eq!(min_entropy(&g), 1.0);
        assert!(collision_entropy(&g) >= min_entropy(&g));
        let p = Family::PointMass { at: 3 }.distribution(n).unwrap();
        assert_eq!(min_entropy(&p), 0.0);
    }

    #[test]
    fn geometric_tail_doubles_last_weight() {
        let g = Family::Geometric.distribution(2).unwrap();
        // 1/2, 1/4, 1/8, 1/8
        let w: Vec<u128> = g.iter().map(|(_, w)| w).collect();
        assert_eq!(w, vec![4, 2, 1, 1]);
    }
}
