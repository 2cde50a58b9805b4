//! Ordered fuzzy numbers restricted to four integer components.
//!
//! An [`Ofn`] is the tuple `(a1, a2, a3, a4)` describing a triangular or
//! trapezoidal fuzzy quantity. All arithmetic is componentwise, so the tuple
//! produced by a subtraction may be improper (`a2 > a3` and so on); such values
//! are legal and are carried through the calculus unchanged.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OfnError {
    #[error("integer overflow in {op} of {lhs} and {rhs}")]
    Overflow {
        op: &'static str,
        lhs: Ofn,
        rhs: Ofn,
    },
    #[error("divisor must be positive, got {0}")]
    InvalidDivisor(i64),
    #[error("cannot parse ordered fuzzy number from {0:?}")]
    Parse(String),
}

/// Ordered fuzzy number with integer components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Ofn([i64; 4]);

impl Ofn {
    pub const ZERO: Ofn = Ofn([0; 4]);
    pub const ONE: Ofn = Ofn([1; 4]);

    pub const fn new(a1: i64, a2: i64, a3: i64, a4: i64) -> Self {
        Ofn([a1, a2, a3, a4])
    }

    /// Degenerate number `(c, c, c, c)`.
    pub const fn crisp(c: i64) -> Self {
        Ofn([c; 4])
    }

    pub const fn from_array(components: [i64; 4]) -> Self {
        Ofn(components)
    }

    pub const fn components(&self) -> [i64; 4] {
        self.0
    }

    /// Component `i` using the 1-based numbering of the `(a1, a2, a3, a4)` notation.
    pub fn get(&self, i: usize) -> i64 {
        assert!((1..=4).contains(&i), "component index {i} out of 1..=4");
        self.0[i - 1]
    }

    pub fn is_crisp(&self) -> bool {
        self.0.iter().all(|&c| c == self.0[0])
    }

    /// Components are non-decreasing.
    pub fn is_proper(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn min_component(&self) -> i64 {
        *self.0.iter().min().expect("four components")
    }

    pub fn max_component(&self) -> i64 {
        *self.0.iter().max().expect("four components")
    }

    /// Every component of `self` is `<=` the matching component of `other`.
    pub fn le_componentwise(&self, other: &Ofn) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn all(&self, mut f: impl FnMut(i64) -> bool) -> bool {
        self.0.iter().all(|&c| f(c))
    }

    /// Components sorted ascending.
    pub fn sorted(&self) -> Ofn {
        let mut c = self.0;
        c.sort_unstable();
        Ofn(c)
    }

    fn zip_checked(
        self,
        rhs: Ofn,
        op: &'static str,
        f: impl Fn(i64, i64) -> Option<i64>,
    ) -> Result<Ofn, OfnError> {
        let mut out = [0i64; 4];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = f(self.0[i], rhs.0[i]).ok_or(OfnError::Overflow { op, lhs: self, rhs })?;
        }
        Ok(Ofn(out))
    }

    pub fn checked_add(self, rhs: Ofn) -> Result<Ofn, OfnError> {
        self.zip_checked(rhs, "addition", i64::checked_add)
    }

    pub fn checked_sub(self, rhs: Ofn) -> Result<Ofn, OfnError> {
        self.zip_checked(rhs, "subtraction", i64::checked_sub)
    }

    /// Componentwise minimum.
    pub fn min(self, rhs: Ofn) -> Ofn {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o = (*o).min(r);
        }
        Ofn(out)
    }

    /// Componentwise minimum of a non-empty collection.
    pub fn min_all<I: IntoIterator<Item = Ofn>>(values: I) -> Option<Ofn> {
        values.into_iter().reduce(Ofn::min)
    }

    /// Divides every component by `n` and rounds to the nearest integer,
    /// ties away from zero.
    pub fn div_int(self, n: i64) -> Result<Ofn, OfnError> {
        if n <= 0 {
            return Err(OfnError::InvalidDivisor(n));
        }
        Ok(Ofn(self.0.map(|a| round_div(a, n))))
    }

    /// Degree to which `condition` holds for the components of `self`.
    ///
    /// With `m` the number of components satisfying the condition (repeated
    /// components counted separately), component `i` of the result is 1 iff
    /// `m >= 5 - i`. The output is always one of the five monotone 0/1 tuples
    /// from `(0,0,0,0)` to `(1,1,1,1)`.
    pub fn satisfies(&self, condition: IntPredicate) -> Ofn {
        let m = self.0.iter().filter(|&&c| condition.test(c)).count() as i64;
        Ofn([1, 2, 3, 4].map(|i| i64::from(m >= 5 - i)))
    }
}

/// Integer division rounded to nearest, halves away from zero. `n > 0`.
fn round_div(a: i64, n: i64) -> i64 {
    let (a, n) = (i128::from(a), i128::from(n));
    let q = (2 * a.abs() + n) / (2 * n);
    (a.signum() * q) as i64
}

impl Add for Ofn {
    type Output = Ofn;

    /// Panics on overflow; use [`Ofn::checked_add`] to handle it.
    fn add(self, rhs: Ofn) -> Ofn {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for Ofn {
    type Output = Ofn;

    /// Panics on overflow; use [`Ofn::checked_sub`] to handle it.
    fn sub(self, rhs: Ofn) -> Ofn {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl From<[i64; 4]> for Ofn {
    fn from(c: [i64; 4]) -> Self {
        Ofn(c)
    }
}

impl fmt::Display for Ofn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// Accepts `a1,a2,a3,a4` with optional surrounding parentheses and whitespace.
impl FromStr for Ofn {
    type Err = OfnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        let inner = trimmed
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(trimmed);
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(OfnError::Parse(s.to_string()));
        }
        let mut out = [0i64; 4];
        for (slot, part) in out.iter_mut().zip(parts) {
            *slot = part.parse().map_err(|_| OfnError::Parse(s.to_string()))?;
        }
        Ok(Ofn(out))
    }
}

impl Serialize for Ofn {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ofn {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Integer condition checked against individual OFN components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntPredicate {
    EqualsZero,
    GreaterThanZero,
    Equals(i64),
    LessThan(i64),
    GreaterOrEqual(i64),
}

impl IntPredicate {
    pub fn test(self, value: i64) -> bool {
        match self {
            IntPredicate::EqualsZero => value == 0,
            IntPredicate::GreaterThanZero => value > 0,
            IntPredicate::Equals(k) => value == k,
            IntPredicate::LessThan(k) => value < k,
            IntPredicate::GreaterOrEqual(k) => value >= k,
        }
    }
}
