//! Closed real intervals over `f64`.
//!
//! Endpoints use native round-to-nearest arithmetic. Construction rejects
//! NaN, infinities and inverted bounds, so every `Interval` in circulation
//! satisfies `lo <= hi` with both endpoints finite.

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval endpoint is not finite: [{lo}, {hi}]")]
    NonFinite { lo: f64, hi: f64 },
    #[error("inverted interval: lower bound {lo} exceeds upper bound {hi}")]
    Inverted { lo: f64, hi: f64 },
}

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(IntervalError::NonFinite { lo, hi });
        }
        if lo > hi {
            return Err(IntervalError::Inverted { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Result<Self, IntervalError> {
        Self::new(x, x)
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// `true` iff `lo <= x <= hi`. No tolerance is applied.
    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `true` iff `self` is a subset of `other`.
    #[inline]
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn try_add(self, other: Interval) -> Result<Interval, IntervalError> {
        Interval::new(self.lo + other.lo, self.hi + other.hi)
    }

    pub fn try_mul(self, other: Interval) -> Result<Interval, IntervalError> {
        let p = [
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    }

    /// `[1 - hi, 1 - lo]`, the image of `x -> 1 - x`.
    pub fn one_minus(self) -> Interval {
        Interval {
            lo: 1.0 - self.hi,
            hi: 1.0 - self.lo,
        }
    }

    /// Smallest interval containing both.
    pub fn hull(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Intersection, or `None` when disjoint.
    pub fn intersect(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

/// Panics if the sum overflows to infinity; use [`Interval::try_add`] to handle that case.
impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        self.try_add(rhs).expect("interval addition overflowed")
    }
}

/// Panics if the product overflows to infinity; use [`Interval::try_mul`] to handle that case.
impl Mul for Interval {
    type Output = Interval;

    fn mul(self, rhs: Interval) -> Interval {
        self.try_mul(rhs).expect("interval multiplication overflowed")
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lo: f64,
            hi: f64,
        }
        let raw = Raw::deserialize(d)?;
        Interval::new(raw.lo, raw.hi).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(iv(1.0, 2.0) + iv(3.0, 4.0), iv(4.0, 6.0));
        assert_eq!(iv(0.0, 0.0) + iv(-0.25, 7.5), iv(-0.25, 7.5));
        assert_eq!(iv(-1.0, 1.0) + iv(-1.0, 1.0), iv(-2.0, 2.0));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(iv(2.0, 3.0) * iv(4.0, 5.0), iv(8.0, 15.0));
        assert_eq!(iv(-1.0, 2.0) * iv(3.0, 4.0), iv(-4.0, 8.0));
        let z = iv(0.0, 0.0) * iv(-3.0, 5.0);
        assert_eq!(z.lo(), 0.0);
        assert_eq!(z.hi(), 0.0);
    }

    #[test]
    fn one_minus_examples() {
        let r = iv(0.2, 0.5).one_minus();
        assert_eq!(r, iv(0.5, 0.8));
        assert_eq!(iv(0.0, 1.0).one_minus(), iv(0.0, 1.0));
        assert_eq!(iv(1.0, 1.0).one_minus(), iv(0.0, 0.0));
    }

    #[test]
    fn contains_is_closed() {
        let u = Interval::UNIT;
        assert!(u.contains(0.5));
        assert!(u.contains(1.0));
        assert!(u.contains(0.0));
        assert!(!u.contains(1.0000001));
    }

    #[test]
    fn construction_rejects_bad_endpoints() {
        assert!(matches!(
            Interval::new(2.0, 1.0),
            Err(IntervalError::Inverted { .. })
        ));
        assert!(matches!(
            Interval::new(f64::NAN, 1.0),
            Err(IntervalError::NonFinite { .. })
        ));
        assert!(matches!(
            Interval::new(0.0, f64::INFINITY),
            Err(IntervalError::NonFinite { .. })
        ));
    }

    #[test]
    fn overflow_is_an_error() {
        let big = iv(f64::MAX, f64::MAX);
        assert!(big.try_add(big).is_err());
        assert!(big.try_mul(iv(2.0, 2.0)).is_err());
    }

    #[test]
    fn deserialize_validates() {
        let ok: Interval = serde_json::from_str(r#"{"lo":0.1,"hi":0.2}"#).unwrap();
        assert_eq!(ok, iv(0.1, 0.2));
        assert!(serde_json::from_str::<Interval>(r#"{"lo":1,"hi":0}"#).is_err());
    }

    fn interval_strategy() -> impl Strategy<Value = Interval> {
        (-100.0f64..100.0, 0.0f64..50.0).prop_map(|(lo, w)| iv(lo, lo + w))
    }

    /// Draws a point of `a` from a unit fraction.
    fn inside(a: Interval, t: f64) -> f64 {
        (a.lo() + t * a.width()).clamp(a.lo(), a.hi())
    }

    proptest! {
        #[test]
        fn soundness_by_sampling(a in interval_strategy(), b in interval_strategy(),
                                 samples in prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 100)) {
            let sum = a + b;
            let prod = a * b;
            let neg = a.one_minus();
            for (s, t) in samples {
                let (x, y) = (inside(a, s), inside(b, t));
                prop_assert!(sum.contains(x + y));
                prop_assert!(prod.contains(x * y));
                prop_assert!(neg.contains(1.0 - x));
            }
        }

        #[test]
        fn inclusion_monotone(a in interval_strategy(), b in interval_strategy(),
                              ga in 0.0f64..10.0, gb in 0.0f64..10.0) {
            let a2 = iv(a.lo() - ga, a.hi() + ga);
            let b2 = iv(b.lo() - gb, b.hi() + gb);
            prop_assert!((a + b).is_subset_of(&(a2 + b2)));
            prop_assert!((a * b).is_subset_of(&(a2 * b2)));
            prop_assert!(a.one_minus().is_subset_of(&a2.one_minus()));
        }

        #[test]
        fn degenerate_exactness(x in -1e6f64..1e6, y in -1e6f64..1e6) {
            let (px, py) = (iv(x, x), iv(y, y));
            prop_assert_eq!(px + py, iv(x + y, x + y));
            prop_assert_eq!(px * py, iv(x * y, x * y));
            prop_assert_eq!(px.one_minus(), iv(1.0 - x, 1.0 - x));
        }
    }

    #[test]
    fn soundness_ten_thousand_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let a = iv(-1.5, 2.25);
        let b = iv(0.125, 3.0);
        let (sum, prod, neg) = (a + b, a * b, a.one_minus());
        for _ in 0..10_000 {
            let x = rng.gen_range(a.lo()..=a.hi());
            let y = rng.gen_range(b.lo()..=b.hi());
            assert!(sum.contains(x + y));
            assert!(prod.contains(x * y));
            assert!(neg.contains(1.0 - x));
        }
    }
}
