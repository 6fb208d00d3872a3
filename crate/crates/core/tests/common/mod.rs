//! Scenarios shared by the integration tests.
#![allow(dead_code)]

use riemnav::Scenario;

pub fn parse(json: &str) -> Scenario {
    Scenario::from_json(json).expect("fixture scenario is valid")
}

/// 1-D flat rest-to-rest transfer from 0 to 1 in unit time.
pub fn line_1d(sigma: f64) -> Scenario {
    parse(&format!(
        r#"{{"manifold":{{"type":"euclidean","dim":1}},"sigma":{sigma},
            "boundary":{{"p0":[0],"v0":[0],"pT":[1],"vT":[0],"T":1}}}}"#
    ))
}

/// Rigid body crossing the unit-disk obstacle diagonally.
pub fn se2_crossing(kind: &str, tau: f64) -> Scenario {
    parse(&format!(
        r#"{{"manifold":{{"type":"{kind}","mass":1,"inertia":1}},"sigma":0,"navigation":{{"tau":{tau}}},
            "boundary":{{"p0":[-2,-2,0],"v0":[0,0,0],"pT":[2,2,0],"vT":[0,0,0],"T":2}}}}"#
    ))
}

/// Unicycle driving past the obstacle at constant heading.
pub fn unicycle_pass() -> Scenario {
    parse(
        r#"{"manifold":{"type":"se2","mass":1,"inertia":1},"sigma":0.5,"navigation":{"tau":0.5},
            "constraints":"unicycle",
            "boundary":{"p0":[-2.5,-1.5,0],"v0":[1,0,0],"pT":[2.5,-1.5,0],"vT":[1,0,0],"T":5}}"#,
    )
}

/// `3t² − 2t³` and its first two derivatives.
pub fn hermite(t: f64) -> [f64; 3] {
    [3.0 * t * t - 2.0 * t.powi(3), 6.0 * t - 6.0 * t * t, 6.0 - 12.0 * t]
}
