//! The three shooting formulations: covariant jets in a chart, the
//! left-invariant reduced system on SE(2), and the unicycle with its
//! multiplier.

use nalgebra::{DVector, Vector3};

use super::integrate::{integrate, time_at};
use super::scenario::{Constraints, ManifoldSpec, Scenario};
use super::trajectory::Trajectory;
use crate::dynamics::{first_order_rhs, ElState, Se2Jet};
use crate::error::Result;
use crate::geometry::{CurveJet, ManifoldModel};
use crate::lie_group::se2::{body_from_chart, left_translate, Se2ReducedSystem};
use crate::lie_group::BodyState;
use crate::navigation::NavigationField;
use crate::subriemannian::unicycle::{consistent_jet, heading_frame_data, UnicycleSystem};

#[derive(Debug, Clone)]
pub enum Pathway {
    /// Unknowns `a(0), j(0)`.
    Coordinate(ManifoldModel),
    /// Unknowns `v′(0), v″(0)`.
    Reduced(Se2ReducedSystem),
    /// Unknowns `a_l(0), θ″(0), j_l(0), θ‴(0), λ(0)` in the heading frame.
    Unicycle(UnicycleSystem),
}

/// A two-point boundary-value problem posed as an initial-value problem in a
/// handful of unknowns.
#[derive(Debug, Clone)]
pub struct Shooting {
    pub pathway: Pathway,
    pub chart: ManifoldModel,
    pub sigma: f64,
    pub p0: DVector<f64>,
    pub v0: DVector<f64>,
    pub p_t: DVector<f64>,
    pub v_t: DVector<f64>,
    pub horizon: f64,
    pub steps: usize,
}

fn v3(v: &DVector<f64>) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

fn dv(v: &Vector3<f64>) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

impl Shooting {
    pub fn from_scenario(scen: &Scenario) -> Self {
        let pathway = match (&scen.manifold, scen.constraints) {
            (ManifoldSpec::Se2 { mass, inertia }, Constraints::Unicycle) => {
                Pathway::Unicycle(UnicycleSystem::new(*mass, *inertia))
            }
            (ManifoldSpec::Se2Reduced { mass, inertia }, _) => {
                Pathway::Reduced(Se2ReducedSystem::new(*mass, *inertia).expect("validated rigid body parameters"))
            }
            (spec, _) => Pathway::Coordinate(spec.chart()),
        };
        let b = &scen.boundary;
        let vec = |v: &Vec<f64>| DVector::from_column_slice(v);
        Self {
            pathway,
            chart: scen.chart(),
            sigma: scen.sigma,
            p0: vec(&b.p0),
            v0: vec(&b.v0),
            p_t: vec(&b.p_t),
            v_t: vec(&b.v_t),
            horizon: b.horizon,
            steps: scen.solver.steps,
        }
    }

    pub fn unknowns(&self) -> usize {
        match &self.pathway {
            Pathway::Coordinate(m) => 2 * m.dim(),
            Pathway::Reduced(_) => 6,
            Pathway::Unicycle(_) => 5,
        }
    }

    /// Coordinate second and third derivatives at `t = 0` of the cubic
    /// through the boundary data.
    pub fn hermite_derivatives(&self) -> (DVector<f64>, DVector<f64>) {
        let t = self.horizon;
        let dp = &self.p_t - &self.p0;
        let xdd = (&dp * 6.0 - (&self.v0 * 4.0 + &self.v_t * 2.0) * t) / (t * t);
        let xddd = (&dp * -12.0 + (&self.v0 + &self.v_t) * (6.0 * t)) / (t * t * t);
        (xdd, xddd)
    }

    /// Initial guess from the Hermite cubic; `λ(0) = 0`.
    pub fn hermite_guess(&self) -> Result<DVector<f64>> {
        let (xdd, xddd) = self.hermite_derivatives();
        let jet = self.chart.jets_from_coordinates(&self.p0, &self.v0, &xdd, &xddd)?;
        Ok(self
            .unknowns_from_chart_jet(&jet, &DVector::zeros(self.unknowns()))
            .expect("every pathway accepts a chart jet"))
    }

    /// Covariant chart jet at `t = 0` for the unknowns `z`.
    pub fn initial_chart_jet(&self, z: &DVector<f64>) -> CurveJet {
        let state = self.initial_state(z);
        self.chart_jet(&state).0
    }

    /// Unknowns reproducing the given initial chart jet as closely as the
    /// pathway allows; `previous` supplies anything the jet does not fix.
    pub fn unknowns_from_chart_jet(&self, jet: &CurveJet, previous: &DVector<f64>) -> Option<DVector<f64>> {
        let n = jet.dim();
        match &self.pathway {
            Pathway::Coordinate(_) => {
                let mut z = DVector::zeros(2 * n);
                z.rows_mut(0, n).copy_from(&jet.a);
                z.rows_mut(n, n).copy_from(&jet.j);
                Some(z)
            }
            Pathway::Reduced(sys) => {
                let body = sys.from_chart_jet(jet);
                let mut z = DVector::zeros(6);
                z.rows_mut(0, 3).copy_from(&body.dv);
                z.rows_mut(3, 3).copy_from(&body.ddv);
                Some(z)
            }
            Pathway::Unicycle(_) => {
                let free = heading_frame_data(&Se2Jet::from_curve_jet(jet));
                let mut z = DVector::zeros(5);
                z.rows_mut(0, 4).copy_from_slice(&free);
                z[4] = previous.get(4).copied().unwrap_or(0.0);
                Some(z)
            }
        }
    }

    pub fn initial_state(&self, z: &DVector<f64>) -> DVector<f64> {
        match &self.pathway {
            Pathway::Coordinate(m) => {
                let n = m.dim();
                let jet = CurveJet::new(
                    self.p0.clone(),
                    self.v0.clone(),
                    z.rows(0, n).into_owned(),
                    z.rows(n, n).into_owned(),
                );
                jet.to_state()
            }
            Pathway::Reduced(_) => {
                let v = dv(&body_from_chart(&v3(&self.p0), &v3(&self.v0)));
                BodyState::new(self.p0.clone(), v, z.rows(0, 3).into_owned(), z.rows(3, 3).into_owned()).to_state()
            }
            Pathway::Unicycle(_) => {
                let free = [z[0], z[1], z[2], z[3]];
                let jet = consistent_jet(&v3(&self.p0), &v3(&self.v0), &free);
                UnicycleSystem::state(&jet, z[4])
            }
        }
    }

    pub fn flow(&self, state: &DVector<f64>, nav: Option<&NavigationField>) -> Result<DVector<f64>> {
        match &self.pathway {
            Pathway::Coordinate(m) => {
                let jet = CurveJet::from_state(state, m.dim());
                first_order_rhs(m, &ElState::new(&jet, self.sigma, nav))
            }
            Pathway::Reduced(sys) => sys.flow(state, self.sigma, nav),
            Pathway::Unicycle(sys) => sys.flow(state, self.sigma, nav),
        }
    }

    /// Chart jet and multiplier of one state.
    pub fn chart_jet(&self, state: &DVector<f64>) -> (CurveJet, Option<f64>) {
        match &self.pathway {
            Pathway::Coordinate(m) => (CurveJet::from_state(state, m.dim()), None),
            Pathway::Reduced(sys) => (sys.to_chart_jet(&BodyState::from_state(state, 3, 3)), None),
            Pathway::Unicycle(_) => {
                let (jet, lambda) = UnicycleSystem::split(state);
                (jet.to_curve_jet(), Some(lambda))
            }
        }
    }

    pub fn integrate(&self, z: &DVector<f64>, nav: Option<&NavigationField>) -> Result<Vec<DVector<f64>>> {
        integrate(|s| self.flow(s, nav), &self.initial_state(z), self.horizon, self.steps)
    }

    /// Terminal mismatch of the integrated curve.
    pub fn terminal_residual(&self, terminal: &DVector<f64>) -> DVector<f64> {
        match &self.pathway {
            Pathway::Unicycle(_) => {
                let (jet, _) = UnicycleSystem::split(terminal);
                let (s, c) = self.p_t[2].sin_cos();
                let dpose = jet.pose - v3(&self.p_t);
                let dvel = jet.vel - v3(&self.v_t);
                DVector::from_vec(vec![dpose.x, dpose.y, dpose.z, dvel.x * c + dvel.y * s, dvel.z])
            }
            Pathway::Reduced(_) => {
                let body = BodyState::from_state(terminal, 3, 3);
                let pose = v3(&body.g);
                let vel = left_translate(&pose, &v3(&body.v));
                let mut r = DVector::zeros(6);
                r.rows_mut(0, 3).copy_from(&(&body.g - &self.p_t));
                r.rows_mut(3, 3).copy_from(&(dv(&vel) - &self.v_t));
                r
            }
            Pathway::Coordinate(m) => {
                let n = m.dim();
                let mut r = DVector::zeros(2 * n);
                r.rows_mut(0, n).copy_from(&(terminal.rows(0, n) - &self.p_t));
                r.rows_mut(n, n).copy_from(&(terminal.rows(n, n) - &self.v_t));
                r
            }
        }
    }

    pub fn residual(&self, z: &DVector<f64>, nav: Option<&NavigationField>) -> Result<DVector<f64>> {
        let states = self.integrate(z, nav)?;
        Ok(self.terminal_residual(states.last().expect("at least one state")))
    }

    pub fn trajectory(&self, states: &[DVector<f64>]) -> Trajectory {
        let mut times = Vec::with_capacity(states.len());
        let mut jets = Vec::with_capacity(states.len());
        let mut lambda = Vec::new();
        for (i, s) in states.iter().enumerate() {
            let (jet, l) = self.chart_jet(s);
            times.push(time_at(self.horizon, self.steps, i));
            jets.push(jet);
            if let Some(l) = l {
                lambda.push(l);
            }
        }
        let lambda = matches!(self.pathway, Pathway::Unicycle(_)).then_some(lambda);
        Trajectory { times, jets, lambda }
    }
}
