use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{HPolytope, Hyperbox};
use crate::error::{Error, Result};

/// A disturbance or constraint set: either a box or a general H-polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConvexSet {
    Box(Hyperbox),
    Poly(HPolytope),
}

impl ConvexSet {
    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Box(b) => b.dim(),
            ConvexSet::Poly(p) => p.dim(),
        }
    }

    pub fn support(&self, dir: &DVector<f64>) -> Result<f64> {
        match self {
            ConvexSet::Box(b) => b.support(dir.as_slice()),
            ConvexSet::Poly(p) => p.support(dir),
        }
    }

    pub fn to_hpolytope(&self) -> HPolytope {
        match self {
            ConvexSet::Box(b) => b.to_hpolytope(),
            ConvexSet::Poly(p) => p.clone(),
        }
    }

    pub fn as_box(&self) -> Option<&Hyperbox> {
        match self {
            ConvexSet::Box(b) => Some(b),
            ConvexSet::Poly(_) => None,
        }
    }

    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        match self {
            ConvexSet::Box(b) => b.contains(z, tol),
            ConvexSet::Poly(p) => p.contains_point(z, tol),
        }
    }

    pub fn is_empty(&self) -> Result<bool> {
        match self {
            ConvexSet::Box(b) => Ok(b.is_empty()),
            ConvexSet::Poly(p) => p.is_empty(),
        }
    }

    pub fn bounding_box(&self) -> Result<Hyperbox> {
        match self {
            ConvexSet::Box(b) if b.is_empty() => Err(Error::EmptySet),
            ConvexSet::Box(b) => Ok(b.clone()),
            ConvexSet::Poly(p) => p.bounding_box(),
        }
    }

    /// `S × S × … × S` (`k` factors) as an H-polytope.
    pub fn power(&self, k: usize) -> HPolytope {
        let p = self.to_hpolytope();
        (0..k).fold(HPolytope::universe(0), |acc, _| acc.product(&p))
    }
}

impl From<Hyperbox> for ConvexSet {
    fn from(b: Hyperbox) -> Self {
        ConvexSet::Box(b)
    }
}

impl From<HPolytope> for ConvexSet {
    fn from(p: HPolytope) -> Self {
        ConvexSet::Poly(p)
    }
}
