//! Abstract operation tallies used to compare search strategies
//! independently of hardware.

use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

/// Per-class operation counts. Divisions are tallied as multiplications
/// and subtractions as additions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpCounts {
    pub adds: u64,
    pub mults: u64,
    pub compares: u64,
    pub sqrts: u64,
    pub abss: u64,
    pub lookups: u64,
}

impl OpCounts {
    pub const ZERO: OpCounts = OpCounts {
        adds: 0,
        mults: 0,
        compares: 0,
        sqrts: 0,
        abss: 0,
        lookups: 0,
    };

    pub fn total(&self) -> u64 {
        self.adds + self.mults + self.compares + self.sqrts + self.abss + self.lookups
    }

    /// Counts scaled by an integer factor, for costs repeated per series.
    pub fn times(self, k: u64) -> OpCounts {
        OpCounts {
            adds: self.adds * k,
            mults: self.mults * k,
            compares: self.compares * k,
            sqrts: self.sqrts * k,
            abss: self.abss * k,
            lookups: self.lookups * k,
        }
    }
}

impl Add for OpCounts {
    type Output = OpCounts;

    fn add(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            adds: self.adds + rhs.adds,
            mults: self.mults + rhs.mults,
            compares: self.compares + rhs.compares,
            sqrts: self.sqrts + rhs.sqrts,
            abss: self.abss + rhs.abss,
            lookups: self.lookups + rhs.lookups,
        }
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: OpCounts) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for OpCounts {
    fn sum<I: Iterator<Item = OpCounts>>(iter: I) -> OpCounts {
        iter.fold(OpCounts::ZERO, |acc, c| acc + c)
    }
}
