//! Dispatcher for conjugacy in `Out(F_3)`: invariant profiles, branch
//! routing, and verdicts with transcripts.

pub mod decide;
pub mod parse;
pub mod profile;
pub mod search;

pub use decide::{decide, recheck, Branch, Certificate, Decision};
pub use parse::{format_automorphism, parse_automorphism, parse_input, Envelope};
pub use profile::{profile, InvariantProfile, ProfileKey};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::traintrack::lamination::LaminationBudget;
use crate::traintrack::upg::UpgBudget;
use crate::twisted::TwistedBudget;

pub const BUDGET_ENV: &str = "OUTF3_BUDGET";
pub const DEFAULT_SEARCH: usize = 4;
pub const MAX_SEARCH: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Conjugators are searched as products of up to this many elementary
    /// automorphisms.
    pub search_length: usize,
    pub twisted: TwistedBudget,
    pub upg: UpgBudget,
    pub lamination: LaminationBudget,
    pub rose_candidates: usize,
    pub lamination_attempts: usize,
    pub periodic_length: usize,
    pub periodic_bases: usize,
    pub complement_length: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            search_length: DEFAULT_SEARCH,
            twisted: TwistedBudget::default(),
            upg: UpgBudget::default(),
            lamination: LaminationBudget::default(),
            rose_candidates: 64,
            lamination_attempts: 6,
            periodic_length: 5,
            periodic_bases: 8,
            complement_length: 5,
        }
    }
}

impl Budgets {
    pub fn with_search(n: usize) -> Result<Budgets> {
        if !(1..=MAX_SEARCH).contains(&n) {
            return Err(CoreError::Budget(format!("search length must be in 1..={MAX_SEARCH}, got {n}")));
        }
        Ok(Budgets { search_length: n, ..Budgets::default() })
    }

    /// Defaults, with the search length taken from `OUTF3_BUDGET` if set.
    pub fn from_env() -> Result<Budgets> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => {
                let n = v.trim().parse().map_err(|_| CoreError::Budget(format!("{BUDGET_ENV}={v:?} is not a number")))?;
                Budgets::with_search(n)
            }
            Err(_) => Ok(Budgets::default()),
        }
    }
}
