//! Right-hand sides of the variational equations.
//!
//! Extremals of `J(x) = ∫ ½(‖D²x/dt²‖² + σ‖dx/dt‖² + V(x)) dt` satisfy
//!
//! ```text
//! D⁴x/dt⁴ = −R(D²x/dt², dx/dt) dx/dt + σ D²x/dt² − ½ grad V(x)
//! ```
//!
//! which is reduced here to a first-order system in the covariant jet
//! `(x, u, a, j)`.

use nalgebra::{DVector, Vector3};

use crate::error::{Error, Result};
use crate::geometry::{CurveJet, ManifoldModel};
use crate::navigation::{NavigationField, DEFAULT_GUARD};

/// Jet of a curve plus the parameters that enter its Euler–Lagrange equation.
#[derive(Debug, Clone, Copy)]
pub struct ElState<'a> {
    pub jet: &'a CurveJet,
    pub sigma: f64,
    pub nav: Option<&'a NavigationField>,
}

impl<'a> ElState<'a> {
    pub fn new(jet: &'a CurveJet, sigma: f64, nav: Option<&'a NavigationField>) -> Self {
        debug_assert!(sigma >= 0.0);
        Self { jet, sigma, nav }
    }
}

/// Cubic-in-tension right-hand side `−R(a, u)u + σa` (no potential).
pub fn tension_cubic_rhs(model: &ManifoldModel, jet: &CurveJet, sigma: f64) -> Result<DVector<f64>> {
    let curvature = model.curvature(&jet.a, &jet.u, &jet.u, &jet.x)?;
    Ok(&jet.a * sigma - curvature)
}

/// Covariant fourth derivative `D⁴x/dt⁴` dictated by the Euler–Lagrange equation.
pub fn el_rhs(model: &ManifoldModel, state: &ElState<'_>) -> Result<DVector<f64>> {
    let rhs = tension_cubic_rhs(model, state.jet, state.sigma)?;
    match state.nav {
        Some(nav) => Ok(rhs - nav.gradient(model, &state.jet.x)? * 0.5),
        None => Ok(rhs),
    }
}

/// Time derivative of the stacked state `(x, u, a, j)`.
///
/// Only `a` and `j` are covariant; their coordinate derivatives pick up the
/// Christoffel corrections `ȧ = j − Γ(u, a)` and `j̇ = D⁴x − Γ(u, j)`.
pub fn first_order_rhs(model: &ManifoldModel, state: &ElState<'_>) -> Result<DVector<f64>> {
    let jet = state.jet;
    let n = jet.dim();
    let d4 = el_rhs(model, state)?;
    let mut out = DVector::zeros(4 * n);
    out.rows_mut(0, n).copy_from(&jet.u);
    if model.is_flat() {
        out.rows_mut(n, n).copy_from(&jet.a);
        out.rows_mut(2 * n, n).copy_from(&jet.j);
        out.rows_mut(3 * n, n).copy_from(&d4);
    } else {
        let gamma = model.levi_civita_christoffels(&jet.x)?;
        out.rows_mut(n, n).copy_from(&(&jet.a - gamma.contract(&jet.u, &jet.u)));
        out.rows_mut(2 * n, n).copy_from(&(&jet.j - gamma.contract(&jet.u, &jet.a)));
        out.rows_mut(3 * n, n).copy_from(&(d4 - gamma.contract(&jet.u, &jet.j)));
    }
    Ok(out)
}

/// `I = ⟨j, u⟩ − ½⟨a, a⟩ − ½σ⟨u, u⟩ + ½V(x)`, constant along extremals.
pub fn first_integral(model: &ManifoldModel, jet: &CurveJet, sigma: f64, nav: Option<&NavigationField>) -> Result<f64> {
    let g = model.metric_at(&jet.x);
    let v = nav.map(|n| n.value_at(&jet.x)).transpose()?.unwrap_or(0.0);
    Ok((&g * &jet.u).dot(&jet.j) - 0.5 * (&g * &jet.a).dot(&jet.a) - 0.5 * sigma * (&g * &jet.u).dot(&jet.u) + 0.5 * v)
}

/// Magnitude of the individual terms of [`first_integral`]; the scale against
/// which its drift is measured.
pub fn first_integral_scale(
    model: &ManifoldModel,
    jet: &CurveJet,
    sigma: f64,
    nav: Option<&NavigationField>,
) -> Result<f64> {
    let g = model.metric_at(&jet.x);
    let v = nav.map(|n| n.value_at(&jet.x)).transpose()?.unwrap_or(0.0);
    Ok((&g * &jet.u).dot(&jet.j).abs()
        + 0.5 * (&g * &jet.a).dot(&jet.a)
        + 0.5 * sigma * (&g * &jet.u).dot(&jet.u)
        + 0.5 * v.abs())
}

/// `dI/dt` along the flow, using metric compatibility:
/// `⟨D⁴x, u⟩ − σ⟨a, u⟩ + ½ dV(u)`, which collapses to `−⟨R(a,u)u, u⟩`.
pub fn first_integral_rate(model: &ManifoldModel, state: &ElState<'_>) -> Result<f64> {
    let jet = state.jet;
    let d4 = el_rhs(model, state)?;
    let dv_u = match state.nav {
        Some(nav) => nav.differential_at(&jet.x)?.dot(&jet.u),
        None => 0.0,
    };
    Ok(model.inner(&jet.x, &d4, &jet.u) - state.sigma * model.inner(&jet.x, &jet.a, &jet.u) + 0.5 * dv_u)
}

/// Coordinate jet of a curve in the SE(2) chart `(x, y, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Se2Jet {
    pub pose: Vector3<f64>,
    pub vel: Vector3<f64>,
    pub acc: Vector3<f64>,
    pub jerk: Vector3<f64>,
}

impl Se2Jet {
    pub fn new(pose: Vector3<f64>, vel: Vector3<f64>, acc: Vector3<f64>, jerk: Vector3<f64>) -> Self {
        Self { pose, vel, acc, jerk }
    }

    pub fn to_curve_jet(&self) -> CurveJet {
        let dv = |v: &Vector3<f64>| DVector::from_column_slice(v.as_slice());
        CurveJet::new(dv(&self.pose), dv(&self.vel), dv(&self.acc), dv(&self.jerk))
    }

    pub fn from_curve_jet(jet: &CurveJet) -> Self {
        let v3 = |v: &DVector<f64>| Vector3::new(v[0], v[1], v[2]);
        Self::new(v3(&jet.x), v3(&jet.u), v3(&jet.a), v3(&jet.j))
    }
}

/// Planar repulsion `τ/(m ρ²)` of the unit-circle potential, shared by the
/// explicit SE(2) systems.
pub(crate) fn circle_repulsion(x: f64, y: f64, tau: f64, mass: f64) -> Result<f64> {
    if tau == 0.0 {
        return Ok(0.0);
    }
    let rho = x * x + y * y - 1.0;
    if !(rho > DEFAULT_GUARD) {
        return Err(Error::ObstaclePenetration { point: vec![x, y], clearance: rho, guard: DEFAULT_GUARD });
    }
    Ok(tau / (mass * rho * rho))
}

/// Explicit fourth derivatives of the planar rigid body around the unit
/// circle, in chart order `(x, y, θ)`:
///
/// ```text
/// x⁽⁴⁾ = σx″ + τx/(m(x²+y²−1)²)
/// y⁽⁴⁾ = σy″ + τy/(m(x²+y²−1)²)
/// θ⁽⁴⁾ = σθ″
/// ```
pub fn se2_coordinate_rhs(jet: &Se2Jet, sigma: f64, tau: f64, mass: f64) -> Result<Vector3<f64>> {
    let (x, y) = (jet.pose.x, jet.pose.y);
    let k = circle_repulsion(x, y, tau, mass)?;
    Ok(Vector3::new(sigma * jet.acc.x + k * x, sigma * jet.acc.y + k * y, sigma * jet.acc.z))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_4;

    use approx::assert_relative_eq;
    use nalgebra::dvector;
    use proptest::prelude::*;

    use super::*;

    fn vec3() -> impl Strategy<Value = Vector3<f64>> {
        (-2.0..2.0, -2.0..2.0, -2.0..2.0).prop_map(|(a, b, c)| Vector3::new(a, b, c))
    }

    fn exterior_pose() -> impl Strategy<Value = Vector3<f64>> {
        (1.1_f64..4.0, -3.2_f64..3.2, -6.0_f64..6.0)
            .prop_map(|(r, phi, th)| Vector3::new(r * phi.cos(), r * phi.sin(), th))
    }

    #[test]
    fn free_flat_cubic_has_zero_fourth_derivative() {
        let m = ManifoldModel::euclidean(2);
        let jet = CurveJet::new(dvector![1.0, 2.0], dvector![0.3, -1.0], dvector![5.0, 1.0], dvector![-2.0, 0.5]);
        assert_eq!(el_rhs(&m, &ElState::new(&jet, 0.0, None)).unwrap(), dvector![0.0, 0.0]);
    }

    #[test]
    fn tension_term() {
        let m = ManifoldModel::euclidean(2);
        let jet = CurveJet::new(dvector![0.0, 0.0], dvector![1.0, 1.0], dvector![1.0, 0.0], dvector![0.0, 0.0]);
        assert_eq!(el_rhs(&m, &ElState::new(&jet, 2.0, None)).unwrap(), dvector![2.0, 0.0]);
    }

    #[test]
    fn sphere_curvature_term() {
        // u, a orthonormal at p: R(a,u)u = a, so D⁴x = −a
        let m = ManifoldModel::round_sphere();
        let p = dvector![1.0_f64, 0.5];
        let s = p[0].sin();
        let jet = CurveJet::new(p, dvector![0.0, 1.0 / s], dvector![1.0, 0.0], dvector![0.3, 0.1]);
        let d4 = el_rhs(&m, &ElState::new(&jet, 0.0, None)).unwrap();
        assert_relative_eq!(d4, dvector![-1.0, 0.0], epsilon = 1e-6);
    }

    #[test]
    fn flat_first_order_rhs_is_verbatim() {
        let m = ManifoldModel::euclidean(2);
        let jet = CurveJet::new(dvector![1.0, 2.0], dvector![0.5, 0.0], dvector![1.0, -1.0], dvector![3.0, 0.0]);
        let d = first_order_rhs(&m, &ElState::new(&jet, 1.5, None)).unwrap();
        assert_eq!(d, dvector![0.5, 0.0, 1.0, -1.0, 3.0, 0.0, 1.5, -1.5]);
    }

    #[test]
    fn sphere_first_order_rhs_picks_up_christoffels() {
        let m = ManifoldModel::round_sphere();
        let jet = CurveJet::new(dvector![FRAC_PI_4, 0.0], dvector![0.0, 1.0], dvector![0.0, 0.0], dvector![0.0, 0.0]);
        let d = first_order_rhs(&m, &ElState::new(&jet, 0.0, None)).unwrap();
        assert_relative_eq!(d[2], 0.5, epsilon = 1e-12);
        assert_relative_eq!(d[3], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rest_state_stays_at_rest() {
        let jet = CurveJet::at_rest(dvector![0.7, -0.2]);
        for m in [ManifoldModel::euclidean(2), ManifoldModel::round_sphere()] {
            let d = first_order_rhs(&m, &ElState::new(&jet, 3.0, None)).unwrap();
            assert_eq!(d, DVector::zeros(8));
        }
    }

    #[test]
    fn se2_coordinate_examples() {
        let jet = Se2Jet::new(Vector3::new(2.0, 0.0, 0.0), Vector3::zeros(), Vector3::zeros(), Vector3::zeros());
        let d4 = se2_coordinate_rhs(&jet, 0.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(d4, Vector3::new(2.0 / 9.0, 0.0, 0.0), epsilon = 1e-15);

        let jet =
            Se2Jet::new(Vector3::new(0.1, 0.0, 0.0), Vector3::new(1.0, 2.0, 3.0), Vector3::zeros(), Vector3::zeros());
        assert_eq!(se2_coordinate_rhs(&jet, 0.0, 0.0, 1.0).unwrap(), Vector3::zeros());

        let jet = Se2Jet::new(Vector3::zeros(), Vector3::zeros(), Vector3::new(3.0, 0.0, 0.0), Vector3::zeros());
        assert_eq!(se2_coordinate_rhs(&jet, 1.0, 0.0, 1.0).unwrap().x, 3.0);

        let inside = Se2Jet::new(Vector3::new(0.5, 0.0, 0.0), Vector3::zeros(), Vector3::zeros(), Vector3::zeros());
        assert!(matches!(se2_coordinate_rhs(&inside, 0.0, 1.0, 1.0), Err(Error::ObstaclePenetration { .. })));
    }

    #[test]
    fn navigation_penetration_propagates() {
        let m = ManifoldModel::se2(1.0, 1.0);
        let nav = NavigationField::unit_circle(1.0);
        let jet = CurveJet::at_rest(dvector![0.2, 0.2, 0.0]);
        assert!(el_rhs(&m, &ElState::new(&jet, 0.0, Some(&nav))).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn coordinate_system_matches_general_equation(
            pose in exterior_pose(), vel in vec3(), acc in vec3(), jerk in vec3(),
            sigma in 0.0_f64..5.0, tau in 0.0_f64..3.0, mass in 0.2_f64..4.0, inertia in 0.2_f64..4.0,
        ) {
            let jet = Se2Jet::new(pose, vel, acc, jerk);
            let explicit = se2_coordinate_rhs(&jet, sigma, tau, mass).unwrap();
            let model = ManifoldModel::se2(mass, inertia);
            let nav = NavigationField::unit_circle(tau);
            let cj = jet.to_curve_jet();
            let general = el_rhs(&model, &ElState::new(&cj, sigma, Some(&nav))).unwrap();
            for i in 0..3 {
                prop_assert!((explicit[i] - general[i]).abs() <= 1e-12 * (1.0 + explicit[i].abs()));
            }
        }

        #[test]
        fn without_potential_el_is_the_tension_cubic(
            th in 0.3_f64..2.8, ph in -3.0_f64..3.0,
            u in proptest::collection::vec(-2.0..2.0, 2),
            a in proptest::collection::vec(-2.0..2.0, 2),
            sigma in 0.0_f64..5.0,
        ) {
            let m = ManifoldModel::round_sphere();
            let jet = CurveJet::new(dvector![th, ph], DVector::from_vec(u), DVector::from_vec(a), dvector![0.0, 0.0]);
            let el = el_rhs(&m, &ElState::new(&jet, sigma, None)).unwrap();
            prop_assert_eq!(el, tension_cubic_rhs(&m, &jet, sigma).unwrap());
        }

        #[test]
        fn first_integral_is_stationary(
            th in 0.3_f64..2.8, ph in -3.0_f64..3.0,
            u in proptest::collection::vec(-2.0..2.0, 2),
            a in proptest::collection::vec(-2.0..2.0, 2),
            j in proptest::collection::vec(-2.0..2.0, 2),
            sigma in 0.0_f64..5.0,
        ) {
            let m = ManifoldModel::round_sphere();
            let jet = CurveJet::new(dvector![th, ph], DVector::from_vec(u), DVector::from_vec(a), DVector::from_vec(j));
            let rate = first_integral_rate(&m, &ElState::new(&jet, sigma, None)).unwrap();
            let scale = 1.0 + jet.u.norm().powi(3) * jet.a.norm() / th.sin().powi(2);
            prop_assert!(rate.abs() <= 1e-6 * scale, "rate {rate}");
        }

        #[test]
        fn first_integral_is_stationary_with_potential(
            pose in exterior_pose(), vel in vec3(), acc in vec3(), jerk in vec3(),
            sigma in 0.0_f64..5.0, tau in 0.0_f64..3.0,
        ) {
            let m = ManifoldModel::se2(1.3, 0.6);
            let nav = NavigationField::unit_circle(tau);
            let jet = Se2Jet::new(pose, vel, acc, jerk).to_curve_jet();
            let rate = first_integral_rate(&m, &ElState::new(&jet, sigma, Some(&nav))).unwrap();
            let dv = nav.differential_at(&jet.x).unwrap().norm() * jet.u.norm();
            prop_assert!(rate.abs() <= 1e-13 * (1.0 + dv + sigma * jet.a.norm() * jet.u.norm()));
        }
    }
}
