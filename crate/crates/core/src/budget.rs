//! Enumeration budgets for the exhaustive labs.

use crate::error::{Error, Result};

/// Default cap on weighted enumeration terms.
pub const DEFAULT_BUDGET: u128 = 1 << 30;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "ENTROSEAL_BUDGET";

/// `ENTROSEAL_BUDGET` if set and parseable (decimal or `2^k`), else the default.
pub fn budget_from_env() -> Result<u128> {
    match std::env::var(BUDGET_ENV) {
        Ok(s) => parse_budget(&s),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

pub fn parse_budget(s: &str) -> Result<u128> {
    let s = s.trim();
    let parsed = match s.strip_prefix("2^") {
        Some(exp) => exp.parse::<u32>().ok().and_then(|e| 1u128.checked_shl(e)),
        None => s.parse::<u128>().ok(),
    };
    parsed.ok_or_else(|| Error::Config(format!("invalid budget `{s}`")))
}

/// `Err(Budget)` when `required` terms exceed `budget`.
pub fn ensure(required: u128, budget: u128) -> Result<()> {
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    Ok(())
}

/// `2^bits`, saturating.
pub(crate) fn pow2(bits: usize) -> u128 {
    if bits >= 128 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_forms() {
        assert_eq!(parse_budget("1024").unwrap(), 1024);
        assert_eq!(parse_budget("2^20").unwrap(), 1 << 20);
        assert!(parse_budget("2^200").is_err());
        assert!(parse_budget("lots").is_err());
    }

    #[test]
    fn ensure_names_both_numbers() {
        assert_eq!(ensure(5, 4), Err(Error::Budget { required: 5, budget: 4 }));
        assert!(ensure(4, 4).is_ok());
    }
}
