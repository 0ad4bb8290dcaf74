//! Size caps that keep every computation at desk scale.

use crate::error::{Error, Result};

/// Environment variable overriding [`Budget::dense_cap`].
pub const DENSE_CAP_ENV: &str = "DESIGNKIT_DENSE_CAP";

pub const DEFAULT_DENSE_CAP: usize = 8192;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest dimension of a dense matrix.
    pub dense_cap: usize,
    /// Largest compressed subspace handed to the eigensolver.
    pub structured_cap: usize,
    /// Largest label space (entries) of a diagonal indicator.
    pub label_cap: u64,
    /// Largest number of matrices a permutation-check enumeration visits.
    pub enumeration_cap: u64,
    /// Largest dimension of a sampled circuit or Hamiltonian evolution.
    pub sample_cap: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            dense_cap: DEFAULT_DENSE_CAP,
            structured_cap: 10_000,
            label_cap: 1 << 26,
            enumeration_cap: 1 << 26,
            sample_cap: 1024,
        }
    }
}

impl Budget {
    /// Defaults, with the dense cap taken from [`DENSE_CAP_ENV`] when set.
    pub fn from_env() -> Result<Self> {
        let mut b = Budget::default();
        if let Ok(v) = std::env::var(DENSE_CAP_ENV) {
            b.dense_cap = v
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("{DENSE_CAP_ENV}={v} is not an integer")))?;
        }
        Ok(b)
    }

    pub fn check_dense(&self, dim: u128) -> Result<()> {
        check("dense dimension", dim, self.dense_cap as u128)
    }

    pub fn check_structured(&self, dim: u128) -> Result<()> {
        check("compressed subspace", dim, self.structured_cap as u128)
    }

    pub fn check_labels(&self, n: u128) -> Result<()> {
        check("label space", n, self.label_cap as u128)
    }

    pub fn check_enumeration(&self, n: u128) -> Result<()> {
        check("enumeration", n, self.enumeration_cap as u128)
    }

    pub fn check_sample(&self, dim: u128) -> Result<()> {
        check("sample dimension", dim, self.sample_cap as u128)
    }
}

fn check(what: &'static str, required: u128, cap: u128) -> Result<()> {
    if required > cap {
        Err(Error::BudgetExceeded { what, required, cap })
    } else {
        Ok(())
    }
}

/// `base^exp` without overflow; saturates at `u128::MAX`.
pub fn pow_u128(base: u128, exp: u32) -> u128 {
    base.checked_pow(exp).unwrap_or(u128::MAX)
}
