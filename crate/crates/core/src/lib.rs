//! Variational trajectory planning on Riemannian manifolds: Riemannian cubics
//! in tension with navigation-function obstacle avoidance, their left-invariant
//! reduction on SE(2) and the unicycle-constrained variant.

// `!(x > y)` is used on purpose wherever NaN must be rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod lie_group;
pub mod navigation;
pub mod report;
pub mod solver;
pub mod subriemannian;

pub use error::{Error, Result};
pub use geometry::{Christoffel, CurveJet, ManifoldModel};
pub use lie_group::{BodyState, LieAlgebraModel};
pub use navigation::{CircleObstacle, NavigationField};
pub use report::RunReport;
pub use solver::{solve, solve_from, Scenario, Solution, Trajectory, WarmStart};
pub use subriemannian::{ConstraintSet, MultiplierState};
