use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Element of the cyclic group Z_5 with representatives `-2..=2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Z5(i8);

/// All five elements in the order -2, -1, 0, 1, 2.
pub const Z5_ALL: [Z5; 5] = [Z5(-2), Z5(-1), Z5(0), Z5(1), Z5(2)];

impl Z5 {
    pub fn new(k: i64) -> Self {
        let r = k.rem_euclid(5) as i8;
        Z5(if r > 2 { r - 5 } else { r })
    }

    pub fn value(self) -> i32 {
        i32::from(self.0)
    }

    /// Position in arrays laid out as `[-2, -1, 0, 1, 2]`.
    pub fn index(self) -> usize {
        (self.0 + 2) as usize
    }

    pub fn from_index(i: usize) -> Self {
        Z5_ALL[i]
    }
}

impl From<i32> for Z5 {
    fn from(k: i32) -> Self {
        Z5::new(i64::from(k))
    }
}

impl Add<i32> for Z5 {
    type Output = Z5;
    fn add(self, rhs: i32) -> Z5 {
        Z5::new(i64::from(self.0) + i64::from(rhs))
    }
}

impl Sub<i32> for Z5 {
    type Output = Z5;
    fn sub(self, rhs: i32) -> Z5 {
        Z5::new(i64::from(self.0) - i64::from(rhs))
    }
}

impl Neg for Z5 {
    type Output = Z5;
    fn neg(self) -> Z5 {
        Z5::new(-i64::from(self.0))
    }
}

impl fmt::Display for Z5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
