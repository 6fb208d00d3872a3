//! The planar rigid body on SE(2).
//!
//! Algebra vectors are ordered `(e₁, e₂, e₃)` = (rotation, body x, body y);
//! group elements use the chart `(x, y, θ)` of [`ManifoldModel::se2`].

use nalgebra::{DVector, Matrix3, Vector3};

use super::{reduced_el_rhs, reduced_jets, BodyState, LieAlgebraModel};
use crate::dynamics::{circle_repulsion, Se2Jet};
use crate::error::Result;
use crate::geometry::{CurveJet, ManifoldModel};
use crate::navigation::NavigationField;

/// Closed form of the se(2) connection for `𝕀 = diag(J, m, m)`:
/// `∇_v w = −v₁(w₃e₂ − w₂e₃)`.
pub fn connection_closed_form(v: &Vector3<f64>, w: &Vector3<f64>) -> Vector3<f64> {
    Vector3::new(0.0, -v.x * w.z, v.x * w.y)
}

/// `T_e L_g`: body-frame algebra vector to chart velocity `(ẋ, ẏ, θ̇)`.
pub fn left_translate(pose: &Vector3<f64>, w: &Vector3<f64>) -> Vector3<f64> {
    let (s, c) = pose.z.sin_cos();
    Vector3::new(w.y * c - w.z * s, w.y * s + w.z * c, w.x)
}

/// `T_g L_{g⁻¹}`: chart vector at `pose` to body frame.
pub fn body_from_chart(pose: &Vector3<f64>, w: &Vector3<f64>) -> Vector3<f64> {
    let (s, c) = pose.z.sin_cos();
    Vector3::new(w.z, c * w.x + s * w.y, -s * w.x + c * w.y)
}

/// Reconstruction equation `ġ = T_e L_g v`:
/// `θ′ = v₁`, `x′ = v₂ cos θ − v₃ sin θ`, `y′ = v₂ sin θ + v₃ cos θ`.
pub fn body_kinematics(pose: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
    left_translate(pose, v)
}

/// Advances `pose` for time `dt` under constant body velocity `v`,
/// i.e. `g · exp(dt v)`.
pub fn reconstruct(pose: &Vector3<f64>, v: &Vector3<f64>, dt: f64) -> Vector3<f64> {
    let omega = v.x * dt;
    let (bx, by) = (v.y * dt, v.z * dt);
    // body-frame displacement of the exponential
    let (dx, dy) = if omega.abs() < 1e-9 {
        (bx - 0.5 * omega * by, by + 0.5 * omega * bx)
    } else {
        let (s, c) = omega.sin_cos();
        ((s * bx - (1.0 - c) * by) / omega, ((1.0 - c) * bx + s * by) / omega)
    };
    let (s0, c0) = pose.z.sin_cos();
    Vector3::new(pose.x + c0 * dx - s0 * dy, pose.y + s0 * dx + c0 * dy, pose.z + omega)
}

/// Matrix of `Ad_g` in the basis `(e₁, e₂, e₃)`.
pub fn adjoint_matrix(pose: &Vector3<f64>) -> Matrix3<f64> {
    let (s, c) = pose.z.sin_cos();
    Matrix3::new(
        1.0, 0.0, 0.0, //
        pose.y, c, -s, //
        -pose.x, s, c,
    )
}

/// Pose of `g⁻¹`.
pub fn inverse_pose(pose: &Vector3<f64>) -> Vector3<f64> {
    let (s, c) = pose.z.sin_cos();
    Vector3::new(-(c * pose.x + s * pose.y), s * pose.x - c * pose.y, -pose.z)
}

/// `‖Ad_{g⁻¹} e₁‖²` under `𝕀 = diag(J, m, m)`; equals `J + m(x² + y²)`.
pub fn adjoint_norm_squared(pose: &Vector3<f64>, mass: f64, inertia: f64) -> f64 {
    let w = adjoint_matrix(&inverse_pose(pose)) * Vector3::x();
    inertia * w.x * w.x + mass * (w.y * w.y + w.z * w.z)
}

/// Body-frame gradient of `V = τ/(x² + y² − 1)`:
/// `T_xL_{x⁻¹}(grad V) = −(2V²/(mτ))(0, x cos θ + y sin θ, y cos θ − x sin θ)`.
pub fn se2_body_potential_gradient(pose: &Vector3<f64>, tau: f64, mass: f64) -> Result<Vector3<f64>> {
    // 2V²/(mτ) = 2τ/(mρ²)
    let k = 2.0 * circle_repulsion(pose.x, pose.y, tau, mass)?;
    let (s, c) = pose.z.sin_cos();
    Ok(Vector3::new(0.0, -k * (pose.x * c + pose.y * s), -k * (pose.y * c - pose.x * s)))
}

/// Explicit reduced equations of the planar rigid body around the unit circle:
///
/// ```text
/// v₁‴ = σv₁′
/// v₂‴ = 3v₁v₁′v₂ + 3v₁²v₂′ − (v₁³ − v₁″)v₃ + 3v₁′v₃′ + 3v₁v₃″ + σ(v₂′ − v₁v₃) + (V²/(mτ))(x cos θ + y sin θ)
/// v₃‴ = 3v₁v₁′v₃ + 3v₁²v₃′ + (v₁³ − v₁″)v₂ − 3v₁′v₂′ − 3v₁v₂″ + σ(v₃′ + v₁v₂) + (V²/(mτ))(y cos θ − x sin θ)
/// ```
///
/// The tension term of `v₂‴` carries `−v₁v₃`; this is the sign under which the
/// reduced flow reconstructs the coordinate flow exactly.
pub fn se2_reduced_rhs(
    pose: &Vector3<f64>,
    v: &Vector3<f64>,
    dv: &Vector3<f64>,
    ddv: &Vector3<f64>,
    sigma: f64,
    tau: f64,
    mass: f64,
) -> Result<Vector3<f64>> {
    let k = circle_repulsion(pose.x, pose.y, tau, mass)?;
    let (s, c) = pose.z.sin_cos();
    let (v1, v2, v3) = (v.x, v.y, v.z);
    let (d1, d2, d3) = (dv.x, dv.y, dv.z);
    let (dd1, dd2, dd3) = (ddv.x, ddv.y, ddv.z);
    let cubic = v1 * v1 * v1 - dd1;
    Ok(Vector3::new(
        sigma * d1,
        3.0 * v1 * d1 * v2 + 3.0 * v1 * v1 * d2 - cubic * v3
            + 3.0 * d1 * d3
            + 3.0 * v1 * dd3
            + sigma * (d2 - v1 * v3)
            + k * (pose.x * c + pose.y * s),
        3.0 * v1 * d1 * v3 + 3.0 * v1 * v1 * d3 + cubic * v2 - 3.0 * d1 * d2 - 3.0 * v1 * dd2
            + sigma * (d3 + v1 * v2)
            + k * (pose.y * c - pose.x * s),
    ))
}

fn v3(v: &DVector<f64>) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

fn dv(v: &Vector3<f64>) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

/// Left-invariant reduced flow on SE(2): state `(g, v, v′, v″)` with
/// `g = (x, y, θ)`.
#[derive(Debug, Clone)]
pub struct Se2ReducedSystem {
    pub algebra: LieAlgebraModel,
    pub chart: ManifoldModel,
}

impl Se2ReducedSystem {
    pub fn new(mass: f64, inertia: f64) -> Result<Self> {
        Ok(Self { algebra: LieAlgebraModel::se2(mass, inertia)?, chart: ManifoldModel::se2(mass, inertia) })
    }

    /// Left-translated potential gradient at `pose`.
    pub fn body_gradient(&self, pose: &Vector3<f64>, nav: Option<&NavigationField>) -> Result<Vector3<f64>> {
        match nav {
            Some(nav) if !nav.is_inert() => {
                let grad = nav.gradient(&self.chart, &dv(pose))?;
                Ok(body_from_chart(pose, &v3(&grad)))
            }
            _ => Ok(Vector3::zeros()),
        }
    }

    /// Derivative of the 12-dimensional state `(g, v, v′, v″)`.
    ///
    /// The tension part uses the explicit se(2) equations (identical to
    /// [`reduced_el_rhs`] for this algebra); the potential enters through the
    /// left-translated gradient of `nav`, so shifted obstacles and the cutoff
    /// variant are supported.
    pub fn flow(&self, state: &DVector<f64>, sigma: f64, nav: Option<&NavigationField>) -> Result<DVector<f64>> {
        let at = |k: usize| Vector3::new(state[k], state[k + 1], state[k + 2]);
        let (pose, v, d1, d2) = (at(0), at(3), at(6), at(9));
        let grad = self.body_gradient(&pose, nav)?;
        let dddv = se2_reduced_rhs(&pose, &v, &d1, &d2, sigma, 0.0, 1.0)? - grad * 0.5;
        let g_dot = body_kinematics(&pose, &v);
        let mut out = DVector::zeros(12);
        for (k, block) in [g_dot, d1, d2, dddv].iter().enumerate() {
            out.rows_mut(3 * k, 3).copy_from(block);
        }
        Ok(out)
    }

    /// [`Self::flow`] assembled from the generic algebra formulas instead.
    pub fn flow_generic(
        &self,
        state: &DVector<f64>,
        sigma: f64,
        nav: Option<&NavigationField>,
    ) -> Result<DVector<f64>> {
        let body = BodyState::from_state(state, 3, 3);
        let pose = v3(&body.g);
        let grad = self.body_gradient(&pose, nav)?;
        let dddv = reduced_el_rhs(&self.algebra, &body, sigma, &dv(&grad));
        let g_dot = body_kinematics(&pose, &v3(&body.v));
        let mut out = DVector::zeros(12);
        out.rows_mut(0, 3).copy_from(&dv(&g_dot));
        out.rows_mut(3, 3).copy_from(&body.dv);
        out.rows_mut(6, 3).copy_from(&body.ddv);
        out.rows_mut(9, 3).copy_from(&dddv);
        Ok(out)
    }

    /// Covariant chart jet of the curve described by a body state.
    pub fn to_chart_jet(&self, body: &BodyState) -> CurveJet {
        let pose = v3(&body.g);
        let jets = reduced_jets(&self.algebra, body);
        let lt = |w: &DVector<f64>| dv(&left_translate(&pose, &v3(w)));
        CurveJet::new(body.g.clone(), lt(&body.v), lt(&jets.acceleration), lt(&jets.jerk))
    }

    /// Inverse of [`Self::to_chart_jet`].
    pub fn from_chart_jet(&self, jet: &CurveJet) -> BodyState {
        let pose = v3(&jet.x);
        let body = |w: &DVector<f64>| dv(&body_from_chart(&pose, &v3(w)));
        let nabla = |a: &DVector<f64>, b: &DVector<f64>| self.algebra.connection(a, b);
        let v = body(&jet.u);
        let v_v = nabla(&v, &v);
        let dv1 = body(&jet.a) - &v_v;
        let ddv = body(&jet.j) - nabla(&dv1, &v) - nabla(&v, &dv1) * 2.0 - nabla(&v, &v_v);
        BodyState::new(jet.x.clone(), v, dv1, ddv)
    }

    pub fn to_se2_jet(&self, body: &BodyState) -> Se2Jet {
        Se2Jet::from_curve_jet(&self.to_chart_jet(body))
    }
}
