//! Model parameters `(d, p, q)` and the probability type that carries them.
//!
//! Probabilities remember their exact rational value when one is known
//! (`"3/4"`, or a finite decimal such as `"0.625"`), so that the critical
//! memory parameter can be hit exactly from textual input.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use serde::Serialize;

use crate::direction::StepDirection;
use crate::error::{Error, Result};

/// A real number with an optional exact rational representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probability {
    value: f64,
    exact: Option<Rational64>,
}

impl Probability {
    /// A probability known only as a float.
    pub fn from_f64(value: f64) -> Self {
        Self { value, exact: None }
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Parse {
                input: format!("{numer}/{denom}"),
                reason: "zero denominator".into(),
            });
        }
        Ok(Self::from_rational(Rational64::new(numer, denom)))
    }

    pub fn from_rational(r: Rational64) -> Self {
        let value = *r.numer() as f64 / *r.denom() as f64;
        Self {
            value,
            exact: Some(r),
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> Option<Rational64> {
        self.exact
    }

    /// Exact rational value, falling back to the binary expansion of the float.
    pub fn to_big_rational(&self) -> BigRational {
        match self.exact {
            Some(r) => BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            None => BigRational::from_float(self.value).unwrap_or_else(BigRational::zero),
        }
    }

    fn strictly_inside_unit_interval(&self) -> bool {
        match self.exact {
            Some(r) => *r.numer() > 0 && r.numer() < r.denom(),
            None => self.value > 0.0 && self.value < 1.0,
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(r) if *r.denom() != 1 => write!(f, "{}/{}", r.numer(), r.denom()),
            Some(r) => write!(f, "{}", r.numer()),
            None => write!(f, "{}", self.value),
        }
    }
}

impl FromStr for Probability {
    type Err = Error;

    /// Accepts `a/b`, plain decimals (kept exact) and anything else `f64` parses.
    fn from_str(input: &str) -> Result<Self> {
        let s = input.trim();
        let err = |reason: &str| Error::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| err("bad numerator"))?;
            let den: i64 = den.trim().parse().map_err(|_| err("bad denominator"))?;
            return Self::from_ratio(num, den);
        }
        if let Some(r) = parse_decimal(s) {
            return Ok(Self {
                value: s.parse().map_err(|_| err("not a number"))?,
                exact: Some(r),
            });
        }
        let value: f64 = s.parse().map_err(|_| err("not a number"))?;
        if !value.is_finite() {
            return Err(err("not finite"));
        }
        Ok(Self::from_f64(value))
    }
}

/// Parses `[-+]digits[.digits]` into an exact rational when it fits in `i64`.
fn parse_decimal(s: &str) -> Option<Rational64> {
    let (negative, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    if digits.len() > 18 {
        return None;
    }
    let numer: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let denom = 10i64.checked_pow(frac_part.len() as u32)?;
    let numer = if negative { -numer } else { numer };
    Some(Rational64::new(numer, denom))
}

impl Serialize for Probability {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Probability", 2)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field(
            "exact",
            &self.exact.map(|r| format!("{}/{}", r.numer(), r.denom())),
        )?;
        st.end()
    }
}

/// Dimension `d`, memory parameter `p` and first-step parameter `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    #[serde(rename = "d")]
    dim: usize,
    #[serde(rename = "p")]
    memory: Probability,
    #[serde(rename = "q")]
    first_step: Probability,
    /// The direction the first step takes with probability `q`.
    designated: StepDirection,
}

impl ModelParams {
    pub fn new(dim: usize, memory: Probability, first_step: Probability) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "d",
                value: dim.to_string(),
                bound: "dimension must be at least 1",
            });
        }
        if dim > u32::MAX as usize / 4 {
            return Err(Error::InvalidParameter {
                name: "d",
                value: dim.to_string(),
                bound: "dimension too large",
            });
        }
        if !memory.strictly_inside_unit_interval() {
            return Err(Error::InvalidParameter {
                name: "p",
                value: memory.to_string(),
                bound: "p must lie in (0,1)",
            });
        }
        if !first_step.strictly_inside_unit_interval() {
            return Err(Error::InvalidParameter {
                name: "q",
                value: first_step.to_string(),
                bound: "q must lie in (0,1)",
            });
        }
        Ok(Self {
            dim,
            memory,
            first_step,
            designated: StepDirection::positive(0),
        })
    }

    /// Float shorthand for tests and bindings.
    pub fn from_f64(dim: usize, p: f64, q: f64) -> Result<Self> {
        Self::new(dim, Probability::from_f64(p), Probability::from_f64(q))
    }

    /// Parse `p` and `q` from text (`"3/4"`, `"0.7"`).
    pub fn parse(dim: usize, p: &str, q: &str) -> Result<Self> {
        Self::new(dim, p.parse()?, q.parse()?)
    }

    pub fn with_designated(mut self, dir: StepDirection) -> Result<Self> {
        if dir.axis() >= self.dim {
            return Err(Error::InvalidParameter {
                name: "designated direction",
                value: dir.to_string(),
                bound: "axis must not exceed the dimension",
            });
        }
        self.designated = dir;
        Ok(self)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of step directions (urn colours), `2d`.
    #[inline]
    pub fn colours(&self) -> usize {
        2 * self.dim
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.memory.value()
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.first_step.value()
    }

    pub fn memory(&self) -> Probability {
        self.memory
    }

    pub fn first_step(&self) -> Probability {
        self.first_step
    }

    pub fn designated(&self) -> StepDirection {
        self.designated
    }

    /// `(2d + 1) / (4d)` as a float.
    pub fn critical_memory(&self) -> f64 {
        let d = self.dim as f64;
        (2.0 * d + 1.0) / (4.0 * d)
    }

    /// `(2dp − 1) / (2d − 1)`.
    pub fn alpha(&self) -> f64 {
        let d = self.dim as f64;
        (2.0 * d * self.p() - 1.0) / (2.0 * d - 1.0)
    }
}

/// Exact `(2d + 1) / (4d)`.
pub fn critical_memory_exact(dim: usize) -> Rational64 {
    let d = dim as i64;
    Rational64::new(2 * d + 1, 4 * d)
}
