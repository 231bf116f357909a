use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Closed real interval, or the distinguished empty interval.
///
/// Arithmetic follows the endpoint-wise conventions used throughout the
/// invariant-set formulas:
///
/// * `[a,b] + [c,d] = [a+c, b+d]`, and anything plus `Empty` is `Empty`;
/// * `[a,b] - [c,d] = [a-c, b-d]` (endpoint-wise, *not* the Minkowski
///   difference), `x - Empty = x`, and a result with `lo > hi` is `Empty`.
///
/// A sum over zero intervals is `Empty` (see [`Interval::sum`]), which is why
/// subtracting such a sum leaves an interval unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Interval {
    #[default]
    Empty,
    Closed {
        lo: f64,
        hi: f64,
    },
}

impl Interval {
    /// `[lo, hi]`, or `Empty` when `lo > hi`.
    pub fn new(lo: f64, hi: f64) -> Self {
        if lo > hi {
            Interval::Empty
        } else {
            Interval::Closed { lo, hi }
        }
    }

    pub fn point(x: f64) -> Self {
        Interval::Closed { lo: x, hi: x }
    }

    pub fn symmetric(r: f64) -> Self {
        Interval::new(-r, r)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Interval::Empty)
    }

    pub fn lo(&self) -> Option<f64> {
        match *self {
            Interval::Closed { lo, .. } => Some(lo),
            Interval::Empty => None,
        }
    }

    pub fn hi(&self) -> Option<f64> {
        match *self {
            Interval::Closed { hi, .. } => Some(hi),
            Interval::Empty => None,
        }
    }

    /// Both endpoints, if nonempty.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            Interval::Closed { lo, hi } => Some((lo, hi)),
            Interval::Empty => None,
        }
    }

    pub fn width(&self) -> f64 {
        self.bounds().map_or(0.0, |(lo, hi)| hi - lo)
    }

    pub fn midpoint(&self) -> Option<f64> {
        self.bounds().map(|(lo, hi)| 0.5 * (lo + hi))
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.bounds().is_some_and(|(lo, hi)| x >= lo - tol && x <= hi + tol)
    }

    /// `c + [a,b] = [c+a, c+b]`.
    pub fn shift(&self, c: f64) -> Self {
        match *self {
            Interval::Closed { lo, hi } => Interval::Closed { lo: lo + c, hi: hi + c },
            Interval::Empty => Interval::Empty,
        }
    }

    /// `α[a,b] = [αa, αb]` for `α ≥ 0`.
    pub fn scale(&self, alpha: f64) -> Self {
        debug_assert!(alpha >= 0.0);
        match *self {
            Interval::Closed { lo, hi } => Interval::Closed { lo: alpha * lo, hi: alpha * hi },
            Interval::Empty => Interval::Empty,
        }
    }

    /// Set intersection.
    pub fn intersect(&self, other: &Interval) -> Interval {
        match (self.bounds(), other.bounds()) {
            (Some((a, b)), Some((c, d))) => Interval::new(a.max(c), b.min(d)),
            _ => Interval::Empty,
        }
    }

    /// Closest point of the interval to `x`.
    pub fn clamp(&self, x: f64) -> Option<f64> {
        self.bounds().map(|(lo, hi)| x.clamp(lo, hi))
    }

    /// Sum of a sequence of intervals; the sum of no intervals is `Empty`.
    pub fn sum<I: IntoIterator<Item = Interval>>(items: I) -> Interval {
        let mut iter = items.into_iter();
        let Some(first) = iter.next() else {
            return Interval::Empty;
        };
        iter.fold(first, |acc, x| acc + x)
    }

    /// Intersection of a sequence of intervals (the whole line for none).
    pub fn intersect_all<I: IntoIterator<Item = Interval>>(items: I) -> Interval {
        items.into_iter().fold(Interval::new(f64::NEG_INFINITY, f64::INFINITY), |acc, x| acc.intersect(&x))
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        match (self, rhs) {
            (Interval::Closed { lo: a, hi: b }, Interval::Closed { lo: c, hi: d }) => {
                Interval::Closed { lo: a + c, hi: b + d }
            }
            _ => Interval::Empty,
        }
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, rhs: Interval) -> Interval {
        match (self, rhs) {
            (Interval::Closed { lo: a, hi: b }, Interval::Closed { lo: c, hi: d }) => Interval::new(a - c, b - d),
            (a, Interval::Empty) => a,
            (Interval::Empty, _) => Interval::Empty,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interval::Closed { lo, hi } => write!(f, "[{lo}, {hi}]"),
            Interval::Empty => write!(f, "∅"),
        }
    }
}

// JSON: `[lo, hi]` or `null` for the empty interval.
impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.bounds().map(|(lo, hi)| [lo, hi]).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Option<[f64; 2]> = Option::deserialize(d)?;
        Ok(raw.map_or(Interval::Empty, |[lo, hi]| Interval::new(lo, hi)))
    }
}
