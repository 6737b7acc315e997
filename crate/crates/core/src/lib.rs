//! Monge-Ampère capacities of toric compacts in the unit polydisk, computed
//! through copolar covolumes, together with weighted extremal functions,
//! their toric geodesics, and numerical checks of the Brunn-Minkowski type
//! inequalities they satisfy.

// NaN-rejecting checks are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covolume;
pub mod error;
pub mod extremal;
pub mod harness;
pub mod lp;
pub mod orthant;
pub mod sampling;
pub mod toric;

pub use covolume::{capacity, covolume, weighted_energy, CovolumeResult, Method, MethodKind};
pub use error::{Error, Result};
pub use extremal::{eval_extremal, GeodesicSpec, WeightedExtremal};
pub use orthant::{GeneratorSet, HalfSpaceSet};
pub use toric::ReinhardtSpec;
