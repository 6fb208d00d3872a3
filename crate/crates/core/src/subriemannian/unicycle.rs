//! The unicycle: SE(2) with the rolling constraint `ẋ sin θ − ẏ cos θ = 0`.
//!
//! Chart order is `(x, y, θ)` throughout. The multiplier is carried as state;
//! its derivative is fixed by requiring the third derivative of the
//! constraint to vanish, which only involves `λ′` (with coefficient `1/m`).

use nalgebra::{DVector, Matrix3, Vector3};

use super::{ConstraintSet, MultiplierState};
use crate::dynamics::{circle_repulsion, Se2Jet};
use crate::error::{Error, Result};
use crate::geometry::{CurveJet, ManifoldModel, SE2_THETA};
use crate::navigation::NavigationField;

/// Components of `ω = sin θ dx − cos θ dy`.
pub fn unicycle_one_form(theta: f64) -> Vector3<f64> {
    let (s, c) = theta.sin_cos();
    Vector3::new(s, -c, 0.0)
}

/// `Y₁ = ω♯ = (1/m)(sin θ ∂x − cos θ ∂y)`.
pub fn unicycle_y1(theta: f64, mass: f64) -> Vector3<f64> {
    unicycle_one_form(theta) / mass
}

/// `S(U) = (u_θ/m)(cos θ ∂x + sin θ ∂y) − (1/J)(u_x cos θ + u_y sin θ)∂θ`.
pub fn s_tensor_unicycle(u: &Vector3<f64>, theta: f64, mass: f64, inertia: f64) -> Vector3<f64> {
    let (s, c) = theta.sin_cos();
    Vector3::new(u.z * c / mass, u.z * s / mass, -(u.x * c + u.y * s) / inertia)
}

/// Columns `Y₁`, `Y₂ = (1/J)∂θ`, `Y₃ = (1/m)(cos θ ∂x + sin θ ∂y)`.
pub fn unicycle_frame(theta: f64, mass: f64, inertia: f64) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    Matrix3::from_columns(&[
        unicycle_y1(theta, mass),
        Vector3::new(0.0, 0.0, 1.0 / inertia),
        Vector3::new(c / mass, s / mass, 0.0),
    ])
}

/// The unicycle constraint set on `ManifoldModel::se2(m, J)`, with the
/// analytic S-tensor registered.
pub fn unicycle_constraints(mass: f64, inertia: f64) -> ConstraintSet {
    ConstraintSet::new(ManifoldModel::se2(mass, inertia)).with_form_and_s(
        |p| DVector::from_column_slice(unicycle_one_form(p[SE2_THETA]).as_slice()),
        move |p, u| {
            let u = Vector3::new(u[0], u[1], u[2]);
            DVector::from_column_slice(s_tensor_unicycle(&u, p[SE2_THETA], mass, inertia).as_slice())
        },
    )
}

/// Explicit constrained equations around the unit circle:
///
/// ```text
/// x⁽⁴⁾ = σx″ + τx/(m(x²+y²−1)²) + (1/m)λ′ sin θ + (1/m)λθ′ cos θ
/// y⁽⁴⁾ = σy″ + τy/(m(x²+y²−1)²) − (1/m)λ′ cos θ + (1/m)λθ′ sin θ
/// θ⁽⁴⁾ = σθ″ − (1/J)λ(x′ cos θ + y′ sin θ)
/// ```
#[allow(clippy::too_many_arguments)]
pub fn unicycle_dae_rhs(
    jet: &Se2Jet,
    lambda: f64,
    lambda_prime: f64,
    sigma: f64,
    tau: f64,
    mass: f64,
    inertia: f64,
) -> Result<Vector3<f64>> {
    let (x, y, th) = (jet.pose.x, jet.pose.y, jet.pose.z);
    let k = circle_repulsion(x, y, tau, mass)?;
    let (s, c) = th.sin_cos();
    let (xd, yd, thd) = (jet.vel.x, jet.vel.y, jet.vel.z);
    Ok(Vector3::new(
        sigma * jet.acc.x + k * x + lambda_prime * s / mass + lambda * thd * c / mass,
        sigma * jet.acc.y + k * y - lambda_prime * c / mass + lambda * thd * s / mass,
        sigma * jet.acc.z - lambda * (xd * c + yd * s) / inertia,
    ))
}

/// `(sin θ)^{(k)}` and `(cos θ)^{(k)}` for `k = 0..=3`.
fn trig_derivatives(th: f64, d1: f64, d2: f64, d3: f64) -> ([f64; 4], [f64; 4]) {
    let (s, c) = th.sin_cos();
    (
        [s, c * d1, -s * d1 * d1 + c * d2, -c * d1 * d1 * d1 - 3.0 * s * d1 * d2 + c * d3],
        [c, -s * d1, -c * d1 * d1 - s * d2, s * d1 * d1 * d1 - 3.0 * c * d1 * d2 - s * d3],
    )
}

/// `g = ẋ sin θ − ẏ cos θ` and its first three time derivatives, given the
/// fourth derivatives `snap` of the chart coordinates.
pub fn constraint_derivatives(jet: &Se2Jet, snap: &Vector3<f64>) -> [f64; 4] {
    let x = [jet.vel.x, jet.acc.x, jet.jerk.x, snap.x];
    let y = [jet.vel.y, jet.acc.y, jet.jerk.y, snap.y];
    let (s, c) = trig_derivatives(jet.pose.z, jet.vel.z, jet.acc.z, jet.jerk.z);
    let binom = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    let mut g = [0.0; 4];
    for (n, row) in binom.iter().enumerate() {
        for k in 0..=n {
            g[n] += row[k] * (x[n - k] * s[k] - y[n - k] * c[k]);
        }
    }
    g
}

/// `g‴` without the `x⁽⁴⁾, y⁽⁴⁾` terms.
fn third_derivative_remainder(jet: &Se2Jet) -> f64 {
    constraint_derivatives(jet, &Vector3::zeros())[3]
}

/// Solves `g‴ = 0` for `λ′` with `λ` given.
///
/// The fourth derivative is `base + λ′Y₁ + λS(u)` with
/// `base = σa − ½ grad V`; since `ω(Y₁) = 1/m` and `ω(S(u)) = 0`,
/// `λ′ = −m (ω(base) + remainder)`.
pub fn multiplier_closure(
    jet: &Se2Jet,
    lambda: f64,
    sigma: f64,
    nav: Option<&NavigationField>,
    chart: &ManifoldModel,
    mass: f64,
) -> Result<MultiplierState> {
    let mut base = jet.acc * sigma;
    if let Some(nav) = nav {
        if !nav.is_inert() {
            let g = nav.gradient(chart, &DVector::from_column_slice(jet.pose.as_slice()))?;
            base -= Vector3::new(g[0], g[1], g[2]) * 0.5;
        }
    }
    let omega = unicycle_one_form(jet.pose.z);
    let lambda_prime = -mass * (omega.dot(&base) + third_derivative_remainder(jet));
    Ok(MultiplierState::scalar(lambda, lambda_prime))
}

/// Jet with `g = g′ = g″ = 0` built in the heading frame from the free data
/// `(a_l, θ″, j_l, θ‴)`; `vel` must already satisfy the constraint.
///
/// The lateral components are fixed by `a_n = −θ′v_l` and
/// `j_n = −2θ′a_l − θ″v_l` where `v_l = ẋ cos θ + ẏ sin θ`.
pub fn consistent_jet(pose: &Vector3<f64>, vel: &Vector3<f64>, free: &[f64; 4]) -> Se2Jet {
    let (s, c) = pose.z.sin_cos();
    let [a_l, th_dd, j_l, th_ddd] = *free;
    let v_l = vel.x * c + vel.y * s;
    let a_n = -vel.z * v_l;
    let j_n = -2.0 * vel.z * a_l - th_dd * v_l;
    let planar = |l: f64, n: f64| (l * c + n * s, l * s - n * c);
    let (ax, ay) = planar(a_l, a_n);
    let (jx, jy) = planar(j_l, j_n);
    Se2Jet::new(*pose, *vel, Vector3::new(ax, ay, th_dd), Vector3::new(jx, jy, th_ddd))
}

/// Inverse of [`consistent_jet`]: the free heading-frame data of a jet.
pub fn heading_frame_data(jet: &Se2Jet) -> [f64; 4] {
    let (s, c) = jet.pose.z.sin_cos();
    [jet.acc.x * c + jet.acc.y * s, jet.acc.z, jet.jerk.x * c + jet.jerk.y * s, jet.jerk.z]
}

/// Rejects jets violating `g = g′ = g″ = 0` beyond `tol` (relative to the jet
/// magnitude).
pub fn check_consistency(jet: &Se2Jet, tol: f64) -> Result<()> {
    let g = constraint_derivatives(jet, &Vector3::zeros());
    let scale = 1.0 + jet.vel.amax() + jet.acc.amax() + jet.jerk.amax();
    for (order, value) in g.iter().take(3).enumerate() {
        if value.abs() > tol * scale {
            return Err(Error::Initialization(format!(
                "constraint derivative of order {order} is {value:.3e}, expected 0"
            )));
        }
    }
    Ok(())
}

/// The unicycle as a first-order system on `(q, q′, q″, q‴, λ)` (13 states).
#[derive(Debug, Clone)]
pub struct UnicycleSystem {
    pub mass: f64,
    pub inertia: f64,
    pub constraints: ConstraintSet,
}

pub const UNICYCLE_STATE_DIM: usize = 13;

impl UnicycleSystem {
    pub fn new(mass: f64, inertia: f64) -> Self {
        Self { mass, inertia, constraints: unicycle_constraints(mass, inertia) }
    }

    pub fn chart(&self) -> &ManifoldModel {
        self.constraints.model()
    }

    pub fn state(jet: &Se2Jet, lambda: f64) -> DVector<f64> {
        let mut s = DVector::zeros(UNICYCLE_STATE_DIM);
        s.rows_mut(0, 12).copy_from(&jet.to_curve_jet().to_state());
        s[12] = lambda;
        s
    }

    pub fn split(state: &DVector<f64>) -> (Se2Jet, f64) {
        let jet = CurveJet::from_state(&state.rows(0, 12).into_owned(), 3);
        (Se2Jet::from_curve_jet(&jet), state[12])
    }

    /// Multiplier state and fourth derivatives at one state.
    pub fn evaluate(
        &self,
        jet: &Se2Jet,
        lambda: f64,
        sigma: f64,
        nav: Option<&NavigationField>,
    ) -> Result<(MultiplierState, Vector3<f64>)> {
        let mult = multiplier_closure(jet, lambda, sigma, nav, self.chart(), self.mass)?;
        let snap = self.constraints.constrained_el_rhs(&jet.to_curve_jet(), sigma, nav, &mult)?;
        Ok((mult, Vector3::new(snap[0], snap[1], snap[2])))
    }

    pub fn flow(&self, state: &DVector<f64>, sigma: f64, nav: Option<&NavigationField>) -> Result<DVector<f64>> {
        let (jet, lambda) = Self::split(state);
        let (mult, snap) = self.evaluate(&jet, lambda, sigma, nav)?;
        let mut out = DVector::zeros(UNICYCLE_STATE_DIM);
        out.rows_mut(0, 9).copy_from(&state.rows(3, 9));
        out.rows_mut(9, 3).copy_from(&snap);
        out[12] = mult.lambda_prime[0];
        Ok(out)
    }
}
