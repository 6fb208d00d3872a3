//! Directional derivatives of `J` along random admissible variations.
//!
//! A variation field `X` vanishes together with its first derivative at both
//! ends. The varied curve is `x + rX` in chart coordinates and
//! `dJ/dr|₀ ≈ (J(r) − J(−r)) / 2r`. For an extremal this vanishes; the
//! reported number is its magnitude relative to the Cauchy–Schwarz bound
//! `√(2E(X))·√(2E(x)) + ½∫|dV(X)|` with `E(y) = ½∫(‖ÿ‖² + σ‖ẏ‖²)`.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::trajectory::{simpson, Trajectory};
use crate::error::Result;
use crate::geometry::{ManifoldModel, SE2_THETA};
use crate::navigation::NavigationField;

/// Amplitude of the two-sided difference.
pub const VARIATION_STEP: f64 = 1e-4;
/// Degree of the random factor multiplying the bump `s²(1 − s)²`.
const BUMP_DEGREE: usize = 3;

/// Polynomial in `s ∈ [0, 1]` with coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
struct Poly(Vec<f64>);

impl Poly {
    /// `s²(1 − s)² · Σ c_p s^p`.
    fn bump(coeffs: &[f64]) -> Self {
        let base = [0.0, 0.0, 1.0, -2.0, 1.0];
        let mut out = vec![0.0; base.len() + coeffs.len() - 1];
        for (i, b) in base.iter().enumerate() {
            for (j, c) in coeffs.iter().enumerate() {
                out[i + j] += b * c;
            }
        }
        Poly(out)
    }

    fn random_bump(rng: &mut ChaCha8Rng) -> Self {
        let coeffs: Vec<f64> = (0..=BUMP_DEGREE).map(|_| rng.random_range(-1.0..1.0)).collect();
        Self::bump(&coeffs)
    }

    /// Value and first two derivatives with respect to `t = s·horizon`.
    fn eval(&self, t: f64, horizon: f64) -> [f64; 3] {
        let s = t / horizon;
        let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for (k, c) in self.0.iter().enumerate().rev() {
            let k = k as f64;
            v = v * s + c;
            d1 = d1 * s + k * c;
            d2 = d2 * s + k * (k - 1.0) * c;
        }
        // d1 and d2 above hold s·p′(s) and s²·p″(s)
        let (d1, d2) = if s == 0.0 { (self.coeff(1), 2.0 * self.coeff(2)) } else { (d1 / s, d2 / (s * s)) };
        [v, d1 / horizon, d2 / (horizon * horizon)]
    }

    fn coeff(&self, k: usize) -> f64 {
        self.0.get(k).copied().unwrap_or(0.0)
    }
}

/// A variation field sampled on the trajectory grid with its first two
/// coordinate derivatives.
#[derive(Debug, Clone)]
pub struct Variation {
    pub x: Vec<DVector<f64>>,
    pub xd: Vec<DVector<f64>>,
    pub xdd: Vec<DVector<f64>>,
}

/// Unconstrained random field: every coordinate an independent bump.
fn free_variation(traj: &Trajectory, rng: &mut ChaCha8Rng) -> Variation {
    let n = traj.jets[0].dim();
    let horizon = traj.horizon();
    let polys: Vec<Poly> = (0..n).map(|_| Poly::random_bump(rng)).collect();
    let mut var = Variation {
        x: Vec::with_capacity(traj.len()),
        xd: Vec::with_capacity(traj.len()),
        xdd: Vec::with_capacity(traj.len()),
    };
    for &t in &traj.times {
        let vals: Vec<[f64; 3]> = polys.iter().map(|p| p.eval(t - traj.times[0], horizon)).collect();
        var.x.push(DVector::from_fn(n, |k, _| vals[k][0]));
        var.xd.push(DVector::from_fn(n, |k, _| vals[k][1]));
        var.xdd.push(DVector::from_fn(n, |k, _| vals[k][2]));
    }
    var
}

/// Cumulative integral of `f` from its derivative samples `f′, f″` by the
/// fourth-order Hermite trapezoid rule.
fn hermite_cumulative(d1: &[f64], d2: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; d1.len()];
    for i in 1..d1.len() {
        out[i] = out[i - 1] + 0.5 * h * (d1[i - 1] + d1[i]) + h * h / 12.0 * (d2[i - 1] - d2[i]);
    }
    out
}

/// Variation tangent to the unicycle distribution on the SE(2) chart.
///
/// In the heading frame `e_l = (cos θ, sin θ)`, `e_n = (sin θ, −cos θ)` the
/// field is `X = p e_l + q e_n + δθ ∂θ`; the linearised constraint
/// `q′ − θ′p + δθ v_l = 0` determines `q` from random bumps `p, δθ`, and a
/// multiple of one more bump closes `q(T) = 0`.
fn unicycle_variation(traj: &Trajectory, rng: &mut ChaCha8Rng) -> Variation {
    let horizon = traj.horizon();
    let h = horizon / (traj.len() - 1) as f64;
    let p_poly = Poly::random_bump(rng);
    let th_poly = Poly::random_bump(rng);
    let phi_poly = Poly::bump(&[1.0]);

    struct Local {
        th: f64,
        thd: f64,
        thdd: f64,
        vl: f64,
        vl_d: f64,
    }
    let local: Vec<Local> = traj
        .jets
        .iter()
        .map(|jet| {
            let (s, c) = jet.x[SE2_THETA].sin_cos();
            let (ux, uy, thd) = (jet.u[0], jet.u[1], jet.u[SE2_THETA]);
            // flat chart: the covariant acceleration is ẍ
            let (ax, ay, thdd) = (jet.a[0], jet.a[1], jet.a[SE2_THETA]);
            Local {
                th: jet.x[SE2_THETA],
                thd,
                thdd,
                vl: ux * c + uy * s,
                vl_d: ax * c + ay * s + thd * (uy * c - ux * s),
            }
        })
        .collect();
    let eval =
        |poly: &Poly| -> Vec<[f64; 3]> { traj.times.iter().map(|&t| poly.eval(t - traj.times[0], horizon)).collect() };
    let (p, dth, phi) = (eval(&p_poly), eval(&th_poly), eval(&phi_poly));

    // q′ and q″ for given (p, δθ) samples
    let q_derivs = |p: &[[f64; 3]], dth: &[[f64; 3]]| -> (Vec<f64>, Vec<f64>) {
        let d1 = local.iter().enumerate().map(|(i, l)| l.thd * p[i][0] - dth[i][0] * l.vl).collect();
        let d2 = local
            .iter()
            .enumerate()
            .map(|(i, l)| l.thdd * p[i][0] + l.thd * p[i][1] - dth[i][1] * l.vl - dth[i][0] * l.vl_d)
            .collect();
        (d1, d2)
    };
    let zero = vec![[0.0; 3]; traj.len()];
    let end = |p: &[[f64; 3]], dth: &[[f64; 3]]| {
        let (d1, d2) = q_derivs(p, dth);
        *hermite_cumulative(&d1, &d2, h).last().expect("non-empty")
    };
    let q_end = end(&p, &dth);
    let via_heading = end(&zero, &phi);
    let via_longitudinal = end(&phi, &zero);
    let scaled = |base: &[[f64; 3]], c: f64| -> Vec<[f64; 3]> {
        base.iter().zip(&phi).map(|(b, f)| [b[0] + c * f[0], b[1] + c * f[1], b[2] + c * f[2]]).collect()
    };
    let (p, dth) = if via_heading.abs() >= via_longitudinal.abs() && via_heading != 0.0 {
        (p, scaled(&dth, -q_end / via_heading))
    } else if via_longitudinal != 0.0 {
        (scaled(&p, -q_end / via_longitudinal), dth)
    } else {
        (p, dth)
    };
    let (q1, q2) = q_derivs(&p, &dth);
    let q0 = hermite_cumulative(&q1, &q2, h);

    let mut var = Variation {
        x: Vec::with_capacity(traj.len()),
        xd: Vec::with_capacity(traj.len()),
        xdd: Vec::with_capacity(traj.len()),
    };
    for (i, l) in local.iter().enumerate() {
        let (s, c) = l.th.sin_cos();
        let frame = |along: f64, across: f64, ang: f64| {
            DVector::from_vec(vec![along * c + across * s, along * s - across * c, ang])
        };
        let [pv, pd, pdd] = p[i];
        let [tv, td, tdd] = dth[i];
        let (qv, qd, qdd) = (q0[i], q1[i], q2[i]);
        let a = pd + qv * l.thd;
        let b = qd - pv * l.thd;
        let a_d = pdd + qd * l.thd + qv * l.thdd;
        let b_d = qdd - pd * l.thd - pv * l.thdd;
        var.x.push(frame(pv, qv, tv));
        var.xd.push(frame(a, b, td));
        var.xdd.push(frame(a_d + b * l.thd, b_d - a * l.thd, tdd));
    }
    var
}

/// `J` of the curve `x + rX`.
pub fn varied_functional(
    traj: &Trajectory,
    var: &Variation,
    r: f64,
    chart: &ManifoldModel,
    sigma: f64,
    nav: Option<&NavigationField>,
) -> Result<f64> {
    let mut integrand = Vec::with_capacity(traj.len());
    for (i, jet) in traj.jets.iter().enumerate() {
        let (xd, xdd, _) = chart.jets_to_coordinates(jet)?;
        let x = &jet.x + &var.x[i] * r;
        let u = xd + &var.xd[i] * r;
        let a = chart.covariant_acceleration(&x, &u, &(xdd + &var.xdd[i] * r))?;
        let v = nav.map(|n| n.value_at(&x)).transpose()?.unwrap_or(0.0);
        integrand.push(0.5 * (chart.norm_squared(&x, &a) + sigma * chart.norm_squared(&x, &u) + v));
    }
    Ok(simpson(&integrand, traj.horizon()))
}

/// Central difference of `J` along `X`.
pub fn directional_derivative(
    traj: &Trajectory,
    var: &Variation,
    chart: &ManifoldModel,
    sigma: f64,
    nav: Option<&NavigationField>,
) -> Result<f64> {
    let r = VARIATION_STEP;
    Ok((varied_functional(traj, var, r, chart, sigma, nav)? - varied_functional(traj, var, -r, chart, sigma, nav)?)
        / (2.0 * r))
}

/// `(√(2E(X))·√(2E(x)) + ½∫|dV(X)|)`, the natural size of `dJ(X)`, plus a
/// floor proportional to `1 + 2E(X)` so that exact extremals with vanishing
/// energy do not divide by zero.
fn variation_scale(
    traj: &Trajectory,
    var: &Variation,
    chart: &ManifoldModel,
    sigma: f64,
    nav: Option<&NavigationField>,
) -> Result<f64> {
    let mut ex = Vec::with_capacity(traj.len());
    let mut ec = Vec::with_capacity(traj.len());
    let mut dv = Vec::with_capacity(traj.len());
    for (i, jet) in traj.jets.iter().enumerate() {
        let p = &jet.x;
        ex.push(chart.norm_squared(p, &var.xdd[i]) + sigma * chart.norm_squared(p, &var.xd[i]));
        ec.push(chart.norm_squared(p, &jet.a) + sigma * chart.norm_squared(p, &jet.u));
        let d = match nav {
            Some(n) => n.differential_at(p)?.dot(&var.x[i]).abs(),
            None => 0.0,
        };
        dv.push(0.5 * d);
    }
    let horizon = traj.horizon();
    let (ex, ec, dv) = (simpson(&ex, horizon), simpson(&ec, horizon), simpson(&dv, horizon));
    Ok(ex.sqrt() * ec.sqrt() + dv + 1e-9 * (1.0 + ex))
}

/// Largest normalised directional derivative over `n_variations` seeded
/// random admissible fields.
pub fn first_variation_residual(
    traj: &Trajectory,
    chart: &ManifoldModel,
    sigma: f64,
    nav: Option<&NavigationField>,
    constrained: bool,
    n_variations: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..n_variations {
        let var = if constrained { unicycle_variation(traj, &mut rng) } else { free_variation(traj, &mut rng) };
        let dj = directional_derivative(traj, &var, chart, sigma, nav)?;
        worst = worst.max(dj.abs() / variation_scale(traj, &var, chart, sigma, nav)?);
    }
    Ok(worst)
}
