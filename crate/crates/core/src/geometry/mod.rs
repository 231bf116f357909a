//! Geometric kernel: intervals, boxes, H-polytopes and a dense LP solver.

mod hyperbox;
mod interval;
pub mod lp;
mod polytope;
mod set;

pub use hyperbox::{Hyperbox, VERTEX_CAP};
pub use interval::Interval;
pub use lp::{LpResult, LpStatus, EPS_LP};
pub use polytope::{HPolytope, EPS_SET};
pub use set::ConvexSet;
