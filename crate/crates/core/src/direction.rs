use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// One of the `2d` signed unit vectors `±e_1, …, ±e_d`.
///
/// Directions double as urn colours: colour `2k` is `+e_{k+1}` and colour
/// `2k + 1` is `-e_{k+1}` (zero-based), so each axis owns an adjacent pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StepDirection {
    axis: usize,
    negative: bool,
}

impl StepDirection {
    pub const fn positive(axis: usize) -> Self {
        Self {
            axis,
            negative: false,
        }
    }

    pub const fn negative(axis: usize) -> Self {
        Self {
            axis,
            negative: true,
        }
    }

    #[inline]
    pub fn from_colour(colour: usize) -> Self {
        Self {
            axis: colour / 2,
            negative: colour % 2 == 1,
        }
    }

    #[inline]
    pub fn colour(self) -> usize {
        2 * self.axis + usize::from(self.negative)
    }

    #[inline]
    pub fn axis(self) -> usize {
        self.axis
    }

    /// `+1` or `-1`.
    #[inline]
    pub fn sign(self) -> i64 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn opposite(self) -> Self {
        Self {
            axis: self.axis,
            negative: !self.negative,
        }
    }

    /// The direction as a `dim`-vector of integers.
    pub fn to_vector(self, dim: usize) -> Vec<i64> {
        let mut v = vec![0; dim];
        v[self.axis] = self.sign();
        v
    }

    /// All `2 * dim` directions in colour order.
    pub fn all(dim: usize) -> impl Iterator<Item = StepDirection> {
        (0..2 * dim).map(StepDirection::from_colour)
    }
}

impl fmt::Display for StepDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.negative { '-' } else { '+' };
        write!(f, "{sign}e{}", self.axis + 1)
    }
}

impl FromStr for StepDirection {
    type Err = Error;

    /// Parses `+e1`, `-e3`, `e2` (positive) with one-based axes.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse direction {s:?}, expected e.g. +e1 or -e2"));
        let s = s.trim();
        let (negative, rest) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let digits = rest.strip_prefix('e').ok_or_else(bad)?;
        let axis: usize = digits.parse().map_err(|_| bad())?;
        if axis == 0 {
            return Err(bad());
        }
        Ok(Self {
            axis: axis - 1,
            negative,
        })
    }
}

impl Serialize for StepDirection {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colour_map_is_a_bijection() {
        for dim in 1..6 {
            let dirs: Vec<_> = StepDirection::all(dim).collect();
            assert_eq!(dirs.len(), 2 * dim);
            for (c, dir) in dirs.iter().enumerate() {
                assert_eq!(dir.colour(), c);
                assert!(dir.axis() < dim);
            }
            let mut uniq = dirs.clone();
            uniq.sort();
            uniq.dedup();
            assert_eq!(uniq.len(), 2 * dim);
        }
    }

    #[test]
    fn colour_pairs_match_axis_signs() {
        assert_eq!(StepDirection::from_colour(0), StepDirection::positive(0));
        assert_eq!(StepDirection::from_colour(1), StepDirection::negative(0));
        assert_eq!(StepDirection::from_colour(4), StepDirection::positive(2));
        assert_eq!(StepDirection::negative(1).to_vector(3), vec![0, -1, 0]);
        assert_eq!(StepDirection::positive(1).opposite(), StepDirection::negative(1));
    }

    #[test]
    fn display_round_trips() {
        for dir in StepDirection::all(4) {
            assert_eq!(dir.to_string().parse::<StepDirection>().unwrap(), dir);
        }
        assert_eq!("e2".parse::<StepDirection>().unwrap(), StepDirection::positive(1));
        assert!("+e0".parse::<StepDirection>().is_err());
        assert!("x1".parse::<StepDirection>().is_err());
    }
}
