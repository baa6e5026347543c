use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A lattice point `k = (k1, k2)` of `Z+^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub k1: usize,
    pub k2: usize,
}

impl Point {
    pub const ORIGIN: Point = Point { k1: 0, k2: 0 };

    pub const fn new(k1: usize, k2: usize) -> Self {
        Point { k1, k2 }
    }

    /// `k + e1`
    pub const fn right(self) -> Self {
        Point::new(self.k1 + 1, self.k2)
    }

    /// `k + e2`
    pub const fn up(self) -> Self {
        Point::new(self.k1, self.k2 + 1)
    }

    pub const fn offset(self, d1: usize, d2: usize) -> Self {
        Point::new(self.k1 + d1, self.k2 + d2)
    }

    pub const fn degree(self) -> usize {
        self.k1 + self.k2
    }
}

impl From<(usize, usize)> for Point {
    fn from((k1, k2): (usize, usize)) -> Self {
        Point::new(k1, k2)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k1, self.k2)
    }
}

/// The finite rectangle `{0..=k1_max} x {0..=k2_max}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeWindow {
    pub k1_max: usize,
    pub k2_max: usize,
}

impl LatticeWindow {
    pub const fn new(k1_max: usize, k2_max: usize) -> Self {
        LatticeWindow { k1_max, k2_max }
    }

    /// Window with `n1` points along `k1` and `n2` along `k2`.
    ///
    /// Returns `None` when either side is empty.
    pub fn sized(n1: usize, n2: usize) -> Option<Self> {
        (n1 > 0 && n2 > 0).then(|| LatticeWindow::new(n1 - 1, n2 - 1))
    }

    pub const fn square(k_max: usize) -> Self {
        LatticeWindow::new(k_max, k_max)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.k1 <= self.k1_max && p.k2 <= self.k2_max
    }

    pub fn len(&self) -> usize {
        (self.k1_max + 1) * (self.k2_max + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Drops the last column and row, the region on which a transform
    /// computed from this window's weights can be compared to its input.
    pub fn shrink(&self) -> Option<Self> {
        (self.k1_max > 0 && self.k2_max > 0)
            .then(|| LatticeWindow::new(self.k1_max - 1, self.k2_max - 1))
    }

    pub fn grow(&self, by: usize) -> Self {
        LatticeWindow::new(self.k1_max + by, self.k2_max + by)
    }

    /// Points in row-major order (`k2` outer, `k1` inner).
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let (m1, m2) = (self.k1_max, self.k2_max);
        (0..=m2).flat_map(move |k2| (0..=m1).map(move |k1| Point::new(k1, k2)))
    }
}

impl fmt::Display for LatticeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.k1_max + 1, self.k2_max + 1)
    }
}

/// Parses `"N1xN2"` (point counts per side), e.g. `"6x6"`.
impl FromStr for LatticeWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::Parse(format!("window `{s}` is not of the form N1xN2")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("window `{s}`: {e}")))
        };
        LatticeWindow::sized(parse(a)?, parse(b)?)
            .ok_or_else(|| Error::Parse(format!("window `{s}` is empty")))
    }
}
