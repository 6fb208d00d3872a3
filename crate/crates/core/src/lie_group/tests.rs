use approx::assert_relative_eq;
use nalgebra::{dvector, DMatrix, DVector, Matrix3, Vector3};
use proptest::prelude::*;

use super::se2::*;
use super::*;

fn e(i: usize) -> DVector<f64> {
    DVector::from_fn(3, |k, _| if k == i { 1.0 } else { 0.0 })
}

fn to_v3(v: &DVector<f64>) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

/// Rigid body in three dimensions: so(3) with a non-isotropic inertia.
fn so3() -> LieAlgebraModel {
    LieAlgebraModel::new(
        3,
        |k, i, j| match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (1, 0, 2) | (2, 1, 0) | (0, 2, 1) => -1.0,
            _ => 0.0,
        },
        DMatrix::from_diagonal(&dvector![1.0, 2.0, 3.5]),
    )
    .unwrap()
}

fn vec3() -> impl Strategy<Value = DVector<f64>> {
    proptest::collection::vec(-2.0..2.0, 3).prop_map(DVector::from_vec)
}

#[test]
fn se2_brackets() {
    let g = LieAlgebraModel::se2(1.3, 0.4).unwrap();
    assert_eq!(g.bracket(&e(0), &e(1)), e(2));
    assert_eq!(g.bracket(&e(1), &e(2)), DVector::zeros(3));
    assert_eq!(g.bracket(&e(2), &e(0)), e(1));
    assert_eq!(g.antisymmetry_defect(), 0.0);
    assert_eq!(g.jacobi_defect(), 0.0);
    assert_eq!(so3().jacobi_defect(), 0.0);
}

#[test]
fn se2_brackets_match_matrix_commutators() {
    // ξ = (a, b) ↦ [[0, −a, b₁], [a, 0, b₂], [0, 0, 0]]
    let mat = |v: &DVector<f64>| Matrix3::new(0.0, -v[0], v[1], v[0], 0.0, v[2], 0.0, 0.0, 0.0);
    let g = LieAlgebraModel::se2(1.0, 1.0).unwrap();
    let (a, b) = (dvector![0.3, -1.2, 0.7], dvector![1.1, 0.4, -0.5]);
    let comm = mat(&a) * mat(&b) - mat(&b) * mat(&a);
    assert_relative_eq!(comm, mat(&g.bracket(&a, &b)), epsilon = 1e-15);
}

#[test]
fn sharp_inverts_flat() {
    let g = so3();
    let u = dvector![0.2, -1.0, 3.0];
    assert_relative_eq!(g.sharp(&g.flat(&u)), u, epsilon = 1e-15);
}

#[test]
fn degenerate_inertia_is_rejected() {
    assert!(LieAlgebraModel::se2(0.0, 1.0).is_err());
    assert!(LieAlgebraModel::abelian(DMatrix::from_diagonal(&dvector![1.0, -2.0])).is_err());
}

#[test]
fn se2_connection_examples() {
    let g = LieAlgebraModel::se2(2.0, 0.3).unwrap();
    assert_relative_eq!(g.connection(&e(0), &e(1)), e(2), epsilon = 1e-15);
    assert_relative_eq!(g.connection(&e(1), &e(0)), DVector::zeros(3), epsilon = 1e-15);
    let ab = LieAlgebraModel::abelian(DMatrix::identity(3, 3)).unwrap();
    assert_eq!(ab.connection(&dvector![1.0, 2.0, 3.0], &dvector![-1.0, 0.5, 2.0]), DVector::zeros(3));
}

#[test]
fn connection_on_basis_pairs_matches_closed_form() {
    let g = LieAlgebraModel::se2(0.7, 2.2).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let general = g.connection(&e(i), &e(j));
            let closed = connection_closed_form(&to_v3(&e(i)), &to_v3(&e(j)));
            assert_relative_eq!(to_v3(&general), closed, epsilon = 1e-15);
        }
    }
}

#[test]
fn reduced_jet_examples() {
    let ab = LieAlgebraModel::abelian(DMatrix::identity(3, 3)).unwrap();
    let rest = BodyState::new(DVector::zeros(3), dvector![1.0, -2.0, 0.5], DVector::zeros(3), DVector::zeros(3));
    let jets = reduced_jets(&ab, &rest);
    assert_eq!(jets.acceleration, DVector::zeros(3));
    assert_eq!(jets.jerk, DVector::zeros(3));
    assert_eq!(jets.snap_remainder, DVector::zeros(3));

    let g = LieAlgebraModel::se2(1.0, 1.0).unwrap();
    let state = BodyState::new(DVector::zeros(3), dvector![1.0, 0.0, 1.0], DVector::zeros(3), DVector::zeros(3));
    let jets = reduced_jets(&g, &state);
    assert_relative_eq!(jets.acceleration, dvector![0.0, -1.0, 0.0], epsilon = 1e-15);
    assert_relative_eq!(jets.jerk, dvector![0.0, 0.0, -1.0], epsilon = 1e-15);
}

#[test]
fn reduced_el_examples() {
    let ab = LieAlgebraModel::abelian(DMatrix::identity(3, 3)).unwrap();
    let state =
        BodyState::new(DVector::zeros(3), dvector![1.0, 2.0, 3.0], dvector![0.5, -1.0, 2.0], dvector![1.0, 1.0, 1.0]);
    let zero = DVector::zeros(3);
    assert_eq!(reduced_el_rhs(&ab, &state, 0.0, &zero), DVector::zeros(3));
    assert_eq!(reduced_el_rhs(&ab, &state, 3.0, &zero), &state.dv * 3.0);
}

#[test]
fn se2_reduced_examples() {
    let z = Vector3::zeros();
    let pose = Vector3::new(3.0, 1.0, 0.2);
    assert_eq!(se2_reduced_rhs(&pose, &Vector3::new(1.0, 0.0, 0.0), &z, &z, 0.0, 0.0, 1.0).unwrap(), z);
    // planar translation decouples
    let v = Vector3::new(0.0, 1.5, -0.3);
    let d = Vector3::new(0.0, 0.2, 0.1);
    let dd = Vector3::new(0.0, -1.0, 0.4);
    assert_eq!(se2_reduced_rhs(&pose, &v, &d, &dd, 0.0, 0.0, 1.0).unwrap(), z);
    // potential term at (2, 0, 0): V²/(mτ)·x = (1/9)·2
    let r = se2_reduced_rhs(&Vector3::new(2.0, 0.0, 0.0), &z, &z, &z, 0.0, 1.0, 1.0).unwrap();
    assert_relative_eq!(r, Vector3::new(0.0, 2.0 / 9.0, 0.0), epsilon = 1e-15);
}

#[test]
fn body_kinematics_examples() {
    let v = Vector3::new(0.3, -1.0, 2.0);
    assert_eq!(body_kinematics(&Vector3::new(5.0, -1.0, 0.0), &v), Vector3::new(-1.0, 2.0, 0.3));
    let turned = body_kinematics(&Vector3::new(0.0, 0.0, std::f64::consts::FRAC_PI_2), &Vector3::new(0.0, 1.0, 0.0));
    assert_relative_eq!(turned, Vector3::new(0.0, 1.0, 0.0), epsilon = 1e-15);
    assert_eq!(body_kinematics(&Vector3::new(1.0, 2.0, 3.0), &Vector3::zeros()), Vector3::zeros());
}

#[test]
fn reconstruct_matches_integrated_kinematics() {
    let pose0 = Vector3::new(0.5, -1.0, 0.8);
    for v in [Vector3::new(1.3, 0.5, -0.2), Vector3::new(0.0, 1.0, 2.0), Vector3::new(1e-12, 1.0, 0.0)] {
        let exact = reconstruct(&pose0, &v, 0.7);
        let n = 2000;
        let h = 0.7 / n as f64;
        let mut p = pose0;
        for _ in 0..n {
            let k1 = body_kinematics(&p, &v);
            let k2 = body_kinematics(&(p + k1 * (h / 2.0)), &v);
            let k3 = body_kinematics(&(p + k2 * (h / 2.0)), &v);
            let k4 = body_kinematics(&(p + k3 * h), &v);
            p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        assert_relative_eq!(exact, p, epsilon = 1e-12);
    }
}

#[test]
fn body_potential_gradient_examples() {
    let g = se2_body_potential_gradient(&Vector3::new(2.0, 0.0, 0.0), 1.0, 1.0).unwrap();
    assert_relative_eq!(g, Vector3::new(0.0, -4.0 / 9.0, 0.0), epsilon = 1e-15);
    assert_eq!(se2_body_potential_gradient(&Vector3::new(0.0, 0.0, 0.0), 0.0, 1.0).unwrap(), Vector3::zeros());
    assert!(se2_body_potential_gradient(&Vector3::new(0.5, 0.0, 0.0), 1.0, 1.0).is_err());
}

#[test]
fn adjoint_matches_matrix_conjugation() {
    let homo = |p: &Vector3<f64>| {
        let (s, c) = p.z.sin_cos();
        Matrix3::new(c, -s, p.x, s, c, p.y, 0.0, 0.0, 1.0)
    };
    let mat = |v: &Vector3<f64>| Matrix3::new(0.0, -v.x, v.y, v.x, 0.0, v.z, 0.0, 0.0, 0.0);
    let pose = Vector3::new(1.2, -0.7, 2.1);
    let xi = Vector3::new(0.4, 1.0, -2.0);
    let g = homo(&pose);
    let conj = g * mat(&xi) * g.try_inverse().unwrap();
    assert_relative_eq!(conj, mat(&(adjoint_matrix(&pose) * xi)), epsilon = 1e-14);
    assert_relative_eq!(homo(&inverse_pose(&pose)), g.try_inverse().unwrap(), epsilon = 1e-14);
}

#[test]
fn adjoint_norm_is_inertia_plus_planar_radius() {
    let (m, j) = (1.7, 0.35);
    for pose in [Vector3::new(2.0, 0.0, 0.0), Vector3::new(-1.0, 3.0, 1.0), Vector3::new(0.2, 0.1, -2.0)] {
        let expected = j + m * (pose.x * pose.x + pose.y * pose.y);
        assert_relative_eq!(adjoint_norm_squared(&pose, m, j), expected, epsilon = 1e-13);
    }
}

#[test]
fn system_body_gradient_matches_explicit_formula() {
    let sys = Se2ReducedSystem::new(1.4, 0.6).unwrap();
    let nav = crate::navigation::NavigationField::unit_circle(0.8);
    let pose = Vector3::new(-1.3, 2.2, 0.9);
    let generic = sys.body_gradient(&pose, Some(&nav)).unwrap();
    let explicit = se2_body_potential_gradient(&pose, 0.8, 1.4).unwrap();
    assert_relative_eq!(generic, explicit, epsilon = 1e-14);
}

fn pose() -> impl Strategy<Value = Vector3<f64>> {
    (1.1_f64..4.0, -3.2_f64..3.2, -7.0_f64..7.0).prop_map(|(r, phi, th)| Vector3::new(r * phi.cos(), r * phi.sin(), th))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn connection_matches_closed_form(v in vec3(), w in vec3(), m in 0.1_f64..5.0, j in 0.1_f64..5.0) {
        let g = LieAlgebraModel::se2(m, j).unwrap();
        let general = to_v3(&g.connection(&v, &w));
        let closed = connection_closed_form(&to_v3(&v), &to_v3(&w));
        prop_assert!((general - closed).amax() <= 1e-12);
    }

    #[test]
    fn algebra_connection_is_metric_and_torsion_free(w in vec3(), u in vec3(), z in vec3(), m in 0.1_f64..5.0, j in 0.1_f64..5.0) {
        for g in [LieAlgebraModel::se2(m, j).unwrap(), so3()] {
            let compat = g.inner(&g.connection(&w, &u), &z) + g.inner(&u, &g.connection(&w, &z));
            prop_assert!(compat.abs() <= 1e-12 * (1.0 + w.norm() * u.norm() * z.norm() * m.max(j)));
            let torsion = g.connection(&w, &u) - g.connection(&u, &w) - g.bracket(&w, &u);
            prop_assert!(torsion.amax() <= 1e-12 * (1.0 + w.norm() * u.norm()));
        }
    }

    #[test]
    fn se2_curvature_vanishes(u in vec3(), v in vec3(), w in vec3(), m in 0.1_f64..5.0, j in 0.1_f64..5.0) {
        let g = LieAlgebraModel::se2(m, j).unwrap();
        prop_assert!(g.curvature(&u, &v, &w).amax() <= 1e-12 * (1.0 + u.norm() * v.norm() * w.norm()));
        let ab = LieAlgebraModel::abelian(DMatrix::from_diagonal(&dvector![m, j, 1.0])).unwrap();
        prop_assert_eq!(ab.curvature(&u, &v, &w), DVector::zeros(3));
        prop_assert_eq!(so3().curvature(&u, &u, &w), DVector::zeros(3));
    }

    #[test]
    fn so3_curvature_has_pair_symmetry(x in vec3(), y in vec3(), z in vec3(), w in vec3()) {
        let g = so3();
        let lhs = g.inner(&g.curvature(&x, &y, &z), &w);
        let rhs = g.inner(&g.curvature(&w, &z, &y), &x);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + x.norm() * y.norm() * z.norm() * w.norm()));
    }

    #[test]
    fn generic_reduced_equation_matches_se2_system(
        pose in pose(), v in vec3(), dv in vec3(), ddv in vec3(),
        sigma in 0.0_f64..5.0, tau in 0.0_f64..3.0, m in 0.2_f64..4.0, j in 0.2_f64..4.0,
    ) {
        let g = LieAlgebraModel::se2(m, j).unwrap();
        let grad = se2_body_potential_gradient(&pose, tau, m).unwrap();
        let state = BodyState::new(DVector::from_column_slice(pose.as_slice()), v.clone(), dv.clone(), ddv.clone());
        let generic = to_v3(&reduced_el_rhs(&g, &state, sigma, &DVector::from_column_slice(grad.as_slice())));
        let explicit = se2_reduced_rhs(&pose, &to_v3(&v), &to_v3(&dv), &to_v3(&ddv), sigma, tau, m).unwrap();
        for i in 0..3 {
            prop_assert!((generic[i] - explicit[i]).abs() <= 1e-12 * (1.0 + explicit[i].abs()), "{i}: {generic} {explicit}");
        }
    }

    #[test]
    fn chart_jet_conversion_round_trips(pose in pose(), v in vec3(), dv in vec3(), ddv in vec3()) {
        let sys = Se2ReducedSystem::new(1.1, 0.9).unwrap();
        let body = BodyState::new(DVector::from_column_slice(pose.as_slice()), v, dv, ddv);
        let back = sys.from_chart_jet(&sys.to_chart_jet(&body));
        prop_assert!((back.v - &body.v).amax() <= 1e-12);
        prop_assert!((back.dv - &body.dv).amax() <= 1e-12);
        prop_assert!((back.ddv - &body.ddv).amax() <= 1e-11);
    }

    #[test]
    fn fast_flow_matches_generic_flow(
        pose in pose(), v in vec3(), dv in vec3(), ddv in vec3(), sigma in 0.0_f64..4.0, tau in 0.0_f64..2.0,
    ) {
        let sys = Se2ReducedSystem::new(1.2, 0.8).unwrap();
        let nav = crate::navigation::NavigationField::unit_circle(tau).with_cutoff(3.0);
        let state = BodyState::new(DVector::from_column_slice(pose.as_slice()), v, dv, ddv).to_state();
        let fast = sys.flow(&state, sigma, Some(&nav)).unwrap();
        let generic = sys.flow_generic(&state, sigma, Some(&nav)).unwrap();
        prop_assert!((&fast - &generic).amax() <= 1e-12 * (1.0 + generic.amax()));
    }

    #[test]
    fn body_gradient_co_rotates(pose in pose(), phi in -3.0_f64..3.0, tau in 0.1_f64..3.0) {
        let (s, c) = phi.sin_cos();
        let rotated = Vector3::new(c * pose.x - s * pose.y, s * pose.x + c * pose.y, pose.z + phi);
        let a = se2_body_potential_gradient(&pose, tau, 1.3).unwrap();
        let b = se2_body_potential_gradient(&rotated, tau, 1.3).unwrap();
        prop_assert!((a - b).amax() <= 1e-12 * (1.0 + a.amax()));
    }
}
