//! Run reports and the trajectory CSV format.
//!
//! Columns: `t`, the chart coordinates (angles wrapped), the coordinate
//! velocities, `acc_norm`, `V`, `constraint`, `lambda` (the last two empty
//! when unconstrained), followed by the covariant acceleration and jerk
//! components so that a stored trajectory carries its full jet. Floats are
//! written with 17 significant digits, which round-trips exactly.

use std::fmt::Write as _;

use nalgebra::{DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CurveJet, SE2_THETA};
use crate::solver::scenario::{Constraints, ManifoldSpec, Scenario};
use crate::solver::{Diagnostics, Solution, Trajectory};
use crate::subriemannian::unicycle::unicycle_one_form;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub converged: bool,
    pub newton_iterations: Option<usize>,
    #[serde(flatten)]
    pub diagnostics: Diagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunReport {
    pub fn from_solution(scen: &Scenario, sol: &Solution) -> Result<Self> {
        let diagnostics = Diagnostics::compute(&sol.trajectory, scen)?;
        Ok(Self {
            scenario: scen.clone(),
            converged: sol.converged && diagnostics.boundary_residual <= scen.solver.newton_tol,
            newton_iterations: Some(sol.newton_iterations),
            diagnostics,
            error: sol.failure.as_ref().map(|e| e.to_string()),
            wall_time_s: None,
        })
    }

    /// Report recomputed from a stored trajectory; the Newton history is not
    /// recoverable and is left empty.
    pub fn from_trajectory(scen: &Scenario, traj: &Trajectory) -> Result<Self> {
        let diagnostics = Diagnostics::compute(traj, scen)?;
        Ok(Self {
            scenario: scen.clone(),
            converged: diagnostics.boundary_residual <= scen.solver.newton_tol,
            newton_iterations: None,
            diagnostics,
            error: None,
            wall_time_s: None,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn coordinate_names(spec: &ManifoldSpec) -> Vec<String> {
    match spec {
        ManifoldSpec::Euclidean { dim } => (0..*dim).map(|i| format!("x{i}")).collect(),
        _ => vec!["x".into(), "y".into(), "theta".into()],
    }
}

pub fn csv_header(scen: &Scenario) -> Vec<String> {
    let names = coordinate_names(&scen.manifold);
    let mut cols = vec!["t".to_string()];
    cols.extend(names.iter().cloned());
    cols.extend(names.iter().map(|n| format!("d{n}")));
    cols.extend(["acc_norm", "V", "constraint", "lambda"].map(String::from));
    cols.extend(names.iter().map(|n| format!("a_{n}")));
    cols.extend(names.iter().map(|n| format!("j_{n}")));
    cols
}

fn push_float(line: &mut String, v: f64) {
    write!(line, ",{v:.16e}").expect("writing to a string");
}

/// Serialises a trajectory (angles already wrapped) as CSV.
pub fn trajectory_to_csv(scen: &Scenario, traj: &Trajectory) -> Result<String> {
    let chart = scen.chart();
    let nav = scen.navigation_field();
    let mut out = csv_header(scen).join(",");
    out.push('\n');
    for (i, (t, jet)) in traj.times.iter().zip(&traj.jets).enumerate() {
        let mut line = format!("{t:.16e}");
        for v in jet.x.iter().chain(jet.u.iter()) {
            push_float(&mut line, *v);
        }
        push_float(&mut line, chart.norm_squared(&jet.x, &jet.a).sqrt());
        let v = nav.as_ref().map(|n| n.value_at(&jet.x)).transpose()?.unwrap_or(0.0);
        push_float(&mut line, v);
        match (scen.constraints, &traj.lambda) {
            (Constraints::Unicycle, Some(lambda)) => {
                let omega = unicycle_one_form(jet.x[SE2_THETA]);
                push_float(&mut line, omega.dot(&Vector3::new(jet.u[0], jet.u[1], jet.u[2])));
                push_float(&mut line, lambda[i]);
            }
            _ => line.push_str(",,"),
        }
        for v in jet.a.iter().chain(jet.j.iter()) {
            push_float(&mut line, *v);
        }
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

/// Reads a trajectory written by [`trajectory_to_csv`] for the same scenario.
pub fn trajectory_from_csv(scen: &Scenario, text: &str) -> Result<Trajectory> {
    let n = scen.dim();
    let header = csv_header(scen);
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let got: Vec<&str> = first.split(',').map(str::trim).collect();
    if got != header {
        return Err(parse_err(1, format!("expected header {}", header.join(","))));
    }
    let lambda_col = 1 + 2 * n + 3;
    let jet_col = lambda_col + 1;
    let mut traj = Trajectory {
        times: Vec::new(),
        jets: Vec::new(),
        lambda: (scen.constraints == Constraints::Unicycle).then(Vec::new),
    };
    for (idx, line) in lines {
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != header.len() {
            return Err(parse_err(lineno, format!("expected {} fields, got {}", header.len(), fields.len())));
        }
        let num = |k: usize| -> Result<f64> {
            let v: f64 = fields[k]
                .parse()
                .map_err(|_| parse_err(lineno, format!("column {} is not a number: {:?}", header[k], fields[k])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(lineno, format!("column {} is not finite", header[k])))
            }
        };
        let block = |start: usize| -> Result<DVector<f64>> {
            Ok(DVector::from_vec((0..n).map(|i| num(start + i)).collect::<Result<_>>()?))
        };
        traj.times.push(num(0)?);
        traj.jets.push(CurveJet::new(block(1)?, block(1 + n)?, block(jet_col)?, block(jet_col + n)?));
        if let Some(l) = &mut traj.lambda {
            l.push(num(lambda_col)?);
        }
    }
    traj.validate()?;
    Ok(traj)
}
