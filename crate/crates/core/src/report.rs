//! Shared report shapes for the verification checks.

use serde::{Deserialize, Serialize};

/// How a family of instances is covered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

impl CheckMode {
    pub fn label(&self) -> &'static str {
        match self {
            CheckMode::Exhaustive => "exhaustive",
            CheckMode::Sampled { .. } => "sampled",
        }
    }
}

/// `{check, level, mode, instances, violations, max_slack}`; slack is
/// `rhs - lhs` of the checked inequality in the check's own units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub level: u32,
    pub mode: String,
    pub instances: u64,
    pub violations: u64,
    pub max_slack: String,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub(crate) fn big_decimal<S: serde::Serializer>(v: &num_bigint::BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub(crate) fn big_decimal_opt<S: serde::Serializer>(
    v: &Option<num_bigint::BigUint>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}
