//! Probabilistic ranking of two ordered fuzzy numbers and the uncertainty of
//! choosing between them.
//!
//! Each number is read as a trapezoid over its sorted components. The
//! probability that `A < B` is the average, over alpha in `[0, 1]`, of the
//! probability that a uniform draw from the alpha-cut of `A` lies below a
//! uniform draw from the alpha-cut of `B`. The average is taken with the
//! trapezoidal rule on a uniform grid of alpha levels.

use serde::{Deserialize, Serialize};

use crate::ofn::Ofn;

pub const DEFAULT_LEVELS: usize = 101;

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(
            lo <= hi,
            "interval lower bound {lo} exceeds upper bound {hi}"
        );
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// Alpha-cut of the trapezoid spanned by the sorted components of `a`.
pub fn alpha_cut(a: Ofn, alpha: f64) -> Interval {
    debug_assert!((0.0..=1.0).contains(&alpha));
    let [s1, s2, s3, s4] = a.sorted().components().map(|c| c as f64);
    Interval::new(s1 + alpha * (s2 - s1), s4 - alpha * (s4 - s3))
}

/// `P(x < y)` for `x ~ U(i)` and `y ~ U(j)`.
///
/// Identical point intervals give 0; the caller owns the tie mass.
pub fn interval_prob_less(i: Interval, j: Interval) -> f64 {
    match (i.is_point(), j.is_point()) {
        (true, true) => f64::from(u8::from(i.lo < j.lo)),
        (true, false) => ((j.hi - i.lo) / j.width()).clamp(0.0, 1.0),
        (false, true) => ((j.lo - i.lo) / i.width()).clamp(0.0, 1.0),
        (false, false) => {
            // Integral over i of the survival function of j, via its antiderivative.
            let (c, d, w) = (j.lo, j.hi, j.width());
            let antiderivative = |x: f64| {
                if x <= c {
                    x
                } else if x >= d {
                    c + w / 2.0
                } else {
                    c + (w * w - (d - x) * (d - x)) / (2.0 * w)
                }
            };
            ((antiderivative(i.hi) - antiderivative(i.lo)) / i.width()).clamp(0.0, 1.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    /// `P(A < B)`
    pub p_less: f64,
    /// `P(B < A)`
    pub p_greater: f64,
    pub p_equal: f64,
}

impl ComparisonResult {
    /// Decision uncertainty `1 - max(P12, P21) + min(P12, P21)`.
    pub fn uncertainty(&self) -> f64 {
        uncertainty_from(self.p_less, self.p_greater)
    }
}

pub fn uncertainty_from(p12: f64, p21: f64) -> f64 {
    1.0 - p12.max(p21) + p12.min(p21)
}

/// Alpha-grid comparison with a configurable number of levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Comparator {
    levels: usize,
}

impl Default for Comparator {
    fn default() -> Self {
        Comparator {
            levels: DEFAULT_LEVELS,
        }
    }
}

impl Comparator {
    /// Panics if `levels < 2`.
    pub fn new(levels: usize) -> Self {
        assert!(
            levels >= 2,
            "alpha grid needs at least two levels, got {levels}"
        );
        Comparator { levels }
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn compare(&self, a: Ofn, b: Ofn) -> ComparisonResult {
        if a == b && a.is_crisp() {
            return ComparisonResult {
                p_less: 0.0,
                p_greater: 0.0,
                p_equal: 1.0,
            };
        }
        let last = (self.levels - 1) as f64;
        let (mut less, mut greater) = (0.0, 0.0);
        for k in 0..self.levels {
            let alpha = k as f64 / last;
            let weight = if k == 0 || k + 1 == self.levels {
                0.5
            } else {
                1.0
            };
            let (ca, cb) = (alpha_cut(a, alpha), alpha_cut(b, alpha));
            if ca.is_point() && ca == cb {
                // Coinciding cores of distinct numbers: no side is favoured.
                less += 0.5 * weight;
                greater += 0.5 * weight;
            } else {
                less += interval_prob_less(ca, cb) * weight;
                greater += interval_prob_less(cb, ca) * weight;
            }
        }
        ComparisonResult {
            p_less: less / last,
            p_greater: greater / last,
            p_equal: 0.0,
        }
    }

    pub fn uncertainty(&self, d1: Ofn, d2: Ofn) -> f64 {
        self.compare(d1, d2).uncertainty()
    }
}

/// [`Comparator::compare`] on the default grid.
pub fn prob_less(a: Ofn, b: Ofn) -> ComparisonResult {
    Comparator::default().compare(a, b)
}

/// [`Comparator::uncertainty`] on the default grid.
pub fn uncertainty(d1: Ofn, d2: Ofn) -> f64 {
    Comparator::default().uncertainty(d1, d2)
}
