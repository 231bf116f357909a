use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{HPolytope, Interval};
use crate::error::{Error, Result};

/// Default cap on the dimension for corner enumeration.
pub const VERTEX_CAP: usize = 20;

/// Axis-aligned box `Π [lo_k, hi_k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperbox {
    intervals: Vec<Interval>,
}

impl Hyperbox {
    pub fn new(intervals: Vec<Interval>) -> Self {
        Hyperbox { intervals }
    }

    pub fn from_bounds(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch(format!("box bounds {} vs {}", lo.len(), hi.len())));
        }
        Ok(Hyperbox::new(lo.iter().zip(hi).map(|(&l, &h)| Interval::new(l, h)).collect()))
    }

    /// `[-r, r]^dim`.
    pub fn symmetric(dim: usize, r: f64) -> Self {
        Hyperbox::new(vec![Interval::symmetric(r); dim])
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn interval(&self, k: usize) -> Interval {
        self.intervals[k]
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.iter().any(Interval::is_empty)
    }

    /// Lower corner; `None` if empty.
    pub fn lo(&self) -> Option<Vec<f64>> {
        self.intervals.iter().map(Interval::lo).collect()
    }

    pub fn hi(&self) -> Option<Vec<f64>> {
        self.intervals.iter().map(Interval::hi).collect()
    }

    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        z.len() == self.dim() && self.intervals.iter().zip(z).all(|(iv, &x)| iv.contains(x, tol))
    }

    /// Cartesian product `self × other`.
    pub fn product(&self, other: &Hyperbox) -> Hyperbox {
        let mut v = self.intervals.clone();
        v.extend_from_slice(&other.intervals);
        Hyperbox::new(v)
    }

    /// Coordinates `range` of the box.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Hyperbox {
        Hyperbox::new(self.intervals[range].to_vec())
    }

    /// `sup_{z ∈ B} dir·z`, analytically.
    pub fn support(&self, dir: &[f64]) -> Result<f64> {
        if dir.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "support direction has {} entries, box has dimension {}",
                dir.len(),
                self.dim()
            )));
        }
        let mut s = 0.0;
        for (iv, &d) in self.intervals.iter().zip(dir) {
            let (lo, hi) = iv.bounds().ok_or(Error::EmptySet)?;
            s += if d >= 0.0 { d * hi } else { d * lo };
        }
        Ok(s)
    }

    /// Product of widths (0 for an empty box).
    pub fn volume(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.intervals.iter().map(Interval::width).product()
    }

    /// All corners, lexicographic with `lo` before `hi` in every coordinate.
    /// Collapsed coordinates (`lo == hi`) contribute a single value.
    pub fn vertices(&self) -> Result<Vec<Vec<f64>>> {
        self.vertices_capped(VERTEX_CAP)
    }

    pub fn vertices_capped(&self, cap: usize) -> Result<Vec<Vec<f64>>> {
        if self.dim() > cap {
            return Err(Error::DimensionTooLarge { dim: self.dim(), cap });
        }
        let mut out = vec![Vec::with_capacity(self.dim())];
        for iv in &self.intervals {
            let (lo, hi) = iv.bounds().ok_or(Error::EmptySet)?;
            let choices: &[f64] = if lo == hi { &[lo] } else { &[lo, hi] };
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    choices.iter().map(move |&c| {
                        let mut v = prefix.clone();
                        v.push(c);
                        v
                    })
                })
                .collect();
        }
        Ok(out)
    }

    /// Multilinear barycentric weights of `v` with respect to [`Self::vertices`].
    ///
    /// The weight of a corner `e` is `Π_k w_k` with
    /// `w_k = (hi_k - v_k)/(hi_k - lo_k)` when `e_k = lo_k` and
    /// `(v_k - lo_k)/(hi_k - lo_k)` otherwise. The weights are nonnegative,
    /// sum to one and reproduce `v`.
    pub fn convex_weights(&self, v: &[f64]) -> Result<Vec<(Vec<f64>, f64)>> {
        const TOL: f64 = 1e-9;
        if !self.contains(v, TOL) {
            return Err(Error::PointOutsideBox);
        }
        let verts = self.vertices()?;
        let factors: Vec<Option<(f64, f64, f64)>> = self
            .intervals
            .iter()
            .zip(v)
            .map(|(iv, &x)| {
                let (lo, hi) = iv.bounds().expect("nonempty");
                if lo == hi {
                    None
                } else {
                    let t = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
                    Some((lo, 1.0 - t, t))
                }
            })
            .collect();
        Ok(verts
            .into_iter()
            .map(|e| {
                let w = e
                    .iter()
                    .zip(&factors)
                    .map(|(&ek, f)| match f {
                        None => 1.0,
                        Some((lo, wl, wh)) => {
                            if ek == *lo {
                                *wl
                            } else {
                                *wh
                            }
                        }
                    })
                    .product();
                (e, w)
            })
            .collect())
    }

    /// H-representation: `z_k ≤ hi_k` and `-z_k ≤ -lo_k` per coordinate.
    pub fn to_hpolytope(&self) -> HPolytope {
        let d = self.dim();
        if self.is_empty() {
            return HPolytope::empty(d);
        }
        let mut a = DMatrix::zeros(2 * d, d);
        let mut b = DVector::zeros(2 * d);
        for (k, iv) in self.intervals.iter().enumerate() {
            let (lo, hi) = iv.bounds().expect("nonempty");
            a[(2 * k, k)] = 1.0;
            b[2 * k] = hi;
            a[(2 * k + 1, k)] = -1.0;
            b[2 * k + 1] = -lo;
        }
        HPolytope::from_normalized(a, b)
    }
}

#[derive(Serialize, Deserialize)]
struct BoxJson {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Serialize for Hyperbox {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (lo, hi) =
            self.intervals.iter().map(|iv| iv.bounds().unwrap_or((f64::INFINITY, f64::NEG_INFINITY))).unzip();
        BoxJson { lo, hi }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hyperbox {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BoxJson::deserialize(d)?;
        Hyperbox::from_bounds(&raw.lo, &raw.hi).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn support_and_volume() {
        let b = Hyperbox::symmetric(2, 1.0);
        assert_eq!(b.support(&[1.0, 0.0]).unwrap(), 1.0);
        let c = Hyperbox::symmetric(5, 0.3);
        assert!((c.support(&[1.0; 5]).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(Hyperbox::symmetric(3, 1.0).volume(), 8.0);
        assert_eq!(Hyperbox::new(vec![Interval::Empty]).volume(), 0.0);
        assert_eq!(Hyperbox::new(vec![Interval::Empty]).support(&[1.0]), Err(Error::EmptySet));
    }

    #[test]
    fn corner_order() {
        let b = Hyperbox::from_bounds(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(b.vertices().unwrap(), vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
        let d = Hyperbox::from_bounds(&[0.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(d.vertices().unwrap(), vec![vec![0.0, 0.0], vec![0.0, 1.0]]);
        let c = Hyperbox::symmetric(3, 0.7);
        let v = c.vertices().unwrap();
        assert_eq!(v.len(), 8);
        assert!(v.iter().flatten().all(|x| (x.abs() - 0.7).abs() < 1e-15));
        assert!(matches!(Hyperbox::symmetric(21, 1.0).vertices(), Err(Error::DimensionTooLarge { dim: 21, cap: 20 })));
        // zero-dimensional box has exactly one (empty) corner
        assert_eq!(Hyperbox::new(vec![]).vertices().unwrap(), vec![Vec::<f64>::new()]);
    }

    #[test]
    fn weights_examples() {
        let b = Hyperbox::from_bounds(&[0.0], &[1.0]).unwrap();
        let w = b.convex_weights(&[0.25]).unwrap();
        assert_eq!(w, vec![(vec![0.0], 0.75), (vec![1.0], 0.25)]);

        let sq = Hyperbox::from_bounds(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let w = sq.convex_weights(&[1.0, 0.0]).unwrap();
        for (e, a) in &w {
            let expect = if e == &vec![1.0, 0.0] { 1.0 } else { 0.0 };
            assert_eq!(*a, expect);
        }
        let w = sq.convex_weights(&[0.5, 0.5]).unwrap();
        assert!(w.iter().all(|(_, a)| (*a - 0.25).abs() < 1e-15));
        assert_eq!(sq.convex_weights(&[1.5, 0.0]), Err(Error::PointOutsideBox));
    }

    proptest! {
        #[test]
        fn weights_reconstruct(
            bounds in prop::collection::vec((-3.0f64..3.0, 0.0f64..2.0, 0.0f64..=1.0), 0..6),
            degenerate in prop::collection::vec(any::<bool>(), 6),
        ) {
            let lo: Vec<f64> = bounds.iter().map(|b| b.0).collect();
            let hi: Vec<f64> = bounds.iter().zip(&degenerate).map(|(b, &z)| if z { b.0 } else { b.0 + b.1 }).collect();
            let v: Vec<f64> = bounds.iter().zip(lo.iter().zip(&hi)).map(|(b, (l, h))| l + b.2 * (h - l)).collect();
            let bx = Hyperbox::from_bounds(&lo, &hi).unwrap();
            let w = bx.convex_weights(&v).unwrap();
            let total: f64 = w.iter().map(|p| p.1).sum();
            prop_assert!((total - 1.0).abs() <= 1e-9);
            prop_assert!(w.iter().all(|p| p.1 >= -1e-12));
            for k in 0..v.len() {
                let rec: f64 = w.iter().map(|(e, a)| a * e[k]).sum();
                prop_assert!((rec - v[k]).abs() <= 1e-9);
            }
        }

        #[test]
        fn volume_is_product_of_widths(widths in prop::collection::vec(0.0f64..3.0, 1..6)) {
            let lo = vec![0.0; widths.len()];
            let hi = widths.clone();
            let bx = Hyperbox::from_bounds(&lo, &hi).unwrap();
            let expected: f64 = widths.iter().product();
            prop_assert_eq!(bx.volume(), expected);
        }
    }
}
