use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

/// Bit-level gate tally: ANDs are the expensive operation, XORs the cheap one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpCount {
    pub ands: u64,
    pub xors: u64,
}

impl OpCount {
    pub const ZERO: OpCount = OpCount { ands: 0, xors: 0 };

    pub const fn new(ands: u64, xors: u64) -> Self {
        OpCount { ands, xors }
    }

    pub const fn xors(xors: u64) -> Self {
        OpCount { ands: 0, xors }
    }
}

impl Add for OpCount {
    type Output = OpCount;

    fn add(self, rhs: OpCount) -> OpCount {
        OpCount {
            ands: self.ands + rhs.ands,
            xors: self.xors + rhs.xors,
        }
    }
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, rhs: OpCount) {
        self.ands += rhs.ands;
        self.xors += rhs.xors;
    }
}

impl Sum for OpCount {
    fn sum<I: Iterator<Item = OpCount>>(iter: I) -> OpCount {
        iter.fold(OpCount::ZERO, Add::add)
    }
}
