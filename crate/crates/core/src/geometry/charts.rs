//! Registered charts: Euclidean space, the SE(2) chart `(x, y, θ)` and the
//! round unit sphere in colatitude/longitude `(θ, φ)`.

use nalgebra::{DMatrix, DVector};

use super::{Christoffel, ManifoldModel};

/// Index of the heading angle in the SE(2) chart `(x, y, θ)`.
pub const SE2_THETA: usize = 2;

impl ManifoldModel {
    /// `ℝⁿ` with the identity metric.
    pub fn euclidean(dim: usize) -> Self {
        ManifoldModel::from_metric(format!("euclidean{dim}"), dim, move |_| DMatrix::identity(dim, dim))
            .with_christoffel(move |_| Christoffel::zeros(dim))
            .with_flat(true)
    }

    /// SE(2) in the chart `(x, y, θ)` with the planar rigid body metric
    /// `diag(m, m, J)`.
    pub fn se2(mass: f64, inertia: f64) -> Self {
        ManifoldModel::from_metric("se2", 3, move |_| {
            DMatrix::from_diagonal(&DVector::from_vec(vec![mass, mass, inertia]))
        })
        .with_christoffel(|_| Christoffel::zeros(3))
        .with_flat(true)
        .with_angle_coords(vec![SE2_THETA])
    }

    /// Round unit sphere, `g = diag(1, sin²θ)` in `(θ, φ)`.
    pub fn round_sphere() -> Self {
        Self::round_sphere_fd().with_christoffel(|p| {
            let (s, c) = p[0].sin_cos();
            let mut g = Christoffel::zeros(2);
            g.set(0, 1, 1, -s * c);
            g.set_symmetric(1, 0, 1, c / s);
            g
        })
    }

    /// Round sphere without the analytic Christoffel override.
    pub fn round_sphere_fd() -> Self {
        ManifoldModel::from_metric("sphere", 2, |p| {
            let s = p[0].sin();
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, s * s]))
        })
        .with_angle_coords(vec![1])
    }
}
