//! Fixtures shared by the benchmarks.

use nalgebra::{dvector, DVector};
use riemnav::{CurveJet, Scenario};

/// A generic jet away from the obstacle, in `(x, y, θ)` order.
pub fn se2_jet() -> CurveJet {
    CurveJet::new(
        dvector![1.8, -1.2, 0.4],
        dvector![-0.6, 0.9, 0.7],
        dvector![0.3, -0.2, -0.5],
        dvector![0.1, 0.4, 0.2],
    )
}

/// Sphere jet in `(θ, φ)`.
pub fn sphere_jet() -> CurveJet {
    CurveJet::new(dvector![1.1, 0.3], dvector![0.4, -0.7], dvector![0.2, 0.1], DVector::from_element(2, 0.3))
}

pub fn scenario(json: &str) -> Scenario {
    Scenario::from_json(json).expect("benchmark scenario is valid")
}

pub fn hermite() -> Scenario {
    scenario(
        r#"{"manifold":{"type":"euclidean","dim":1},"sigma":0,
            "boundary":{"p0":[0],"v0":[0],"pT":[1],"vT":[0],"T":1}}"#,
    )
}

/// SE(2) crossing of the unit disk at strength `tau`, on the given pathway.
pub fn crossing(kind: &str, tau: f64, steps: usize) -> Scenario {
    scenario(&format!(
        r#"{{"manifold":{{"type":"{kind}","mass":1,"inertia":1}},"sigma":0,"navigation":{{"tau":{tau}}},
            "boundary":{{"p0":[-2,-2,0],"v0":[0,0,0],"pT":[2,2,0],"vT":[0,0,0],"T":2}},
            "solver":{{"steps":{steps}}}}}"#
    ))
}

pub fn unicycle(steps: usize) -> Scenario {
    scenario(&format!(
        r#"{{"manifold":{{"type":"se2","mass":1,"inertia":1}},"sigma":0.5,"navigation":{{"tau":0.5}},
            "constraints":"unicycle",
            "boundary":{{"p0":[-2.5,-1.5,0],"v0":[1,0,0],"pT":[2.5,-1.5,0],"vT":[1,0,0],"T":5}},
            "solver":{{"steps":{steps}}}}}"#
    ))
}
