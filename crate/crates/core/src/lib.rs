//! Robust controlled invariant sets for discrete-time linear systems whose
//! disturbances are previewed a fixed number of steps ahead.

pub mod error;
pub mod fmt;
pub mod geometry;

pub use error::{Error, Result};
pub mod brunovsky;
pub mod casestudies;
pub mod invariance;
pub mod simulation;
pub mod systems;
