//! Co-circular central configurations of the Newtonian four-body problem.
//!
//! Configurations are handled in mutual-distance space. The unique critical
//! point of the potential on `{I = 1, P = 0}` (P the Ptolemy expression) is
//! found by Newton descent on a product of two spheres, certified through the
//! leading principal minors of the Lagrangian Hessian, and classified as
//! co-circular when it is geometrically realizable (`K = 0`).
//!
//! Module map:
//!
//! * [`geometry`]: distance/mass types and the scalar functions U, I, P, H, K, Q.
//! * [`chart`]: normalized `p` coordinates and the double-sphere `(v, w)` chart.
//! * [`solver`]: minimization, multiplier recovery, Hessian certification.
//! * [`inverse`]: masses from a cyclic shape.
//! * [`oracle`]: slower independent routes used to cross-check everything else.

pub mod chart;
pub mod error;
pub mod geometry;
pub mod inverse;
pub mod json;
pub mod oracle;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{DistanceVector, MassVector, ScalarReport};
