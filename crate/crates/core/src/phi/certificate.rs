use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::inverse::{NegativeMass, Validity};
use crate::idist::LevyTriplet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    Member,
    NonMember,
    Undecided,
}

impl Verdict {
    pub(crate) fn from_validity(v: &Validity) -> Self {
        match v {
            Validity::Valid => Verdict::Member,
            Validity::Invalid { .. } => Verdict::NonMember,
            Validity::Undecided { .. } => Verdict::Undecided,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct LevelVerdict {
    pub level: u32,
    pub verdict: Verdict,
    /// Validity of the factor `ρ_{level+1}`.
    pub validity: Validity,
}

/// Membership of `μ` in `L_m(b)` with the chain of factors as witness.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MembershipCertificate {
    pub b: f64,
    /// Requested level `m`.
    pub level: u32,
    /// Verdict at the requested level.
    pub verdict: Verdict,
    /// Verdicts for levels `0..=m` (up to the first non-member level).
    pub levels: Vec<LevelVerdict>,
    /// `ρ_1, ρ_2, ...` with `ρ_{j} = ρ_{j+1}(b^{-1}·)^{-1} * ...`; signed if invalid.
    pub factors: Vec<LevyTriplet>,
    /// Factorization residual at `residual_level`: of `μ` against `ρ_1` at
    /// level 0, of `ρ_j` against `ρ_{j+1}` at level `j`. The positive part of
    /// the factor is used when it is not valid.
    pub residual: Option<f64>,
    /// The first non-member level, or 0.
    pub residual_level: u32,
}

impl MembershipCertificate {
    pub fn is_member(&self) -> bool {
        self.verdict == Verdict::Member
    }

    /// Level and negative-mass witness of the first invalid factor.
    pub fn first_violation(&self) -> Option<(u32, Option<&NegativeMass>)> {
        self.levels.iter().find_map(|l| match &l.validity {
            Validity::Invalid { witness, .. } => Some((l.level, witness.as_ref())),
            _ => None,
        })
    }
}
