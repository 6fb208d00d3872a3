//! Left-invariant reduction on a Lie group.
//!
//! With a left-invariant metric given by an inner product `𝕀` on the Lie
//! algebra, the Levi-Civita connection restricted to the algebra is
//!
//! ```text
//! ∇_w u = ½[w, u] − ½ 𝕀♯(ad*_w 𝕀♭u + ad*_u 𝕀♭w)
//! ```
//!
//! and the covariant derivatives of a curve are expressed through its body
//! velocity `v` and the derivatives `v′, v″`. Everything here stays in the
//! algebra; left translation to the group is only applied in [`se2`].

pub mod se2;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

/// Structure constants and inner product of a Lie algebra with basis `e_1..e_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraModel {
    dim: usize,
    /// `c^k_{ij}` stored at `(k * n + i) * n + j`, so `[e_i, e_j] = c^k_{ij} e_k`.
    structure: Vec<f64>,
    inertia: DMatrix<f64>,
    inertia_inv: DMatrix<f64>,
}

impl LieAlgebraModel {
    /// `structure(k, i, j)` yields `c^k_{ij}`.
    pub fn new<F>(dim: usize, structure: F, inertia: DMatrix<f64>) -> Result<Self>
    where
        F: Fn(usize, usize, usize) -> f64,
    {
        if inertia.nrows() != dim || inertia.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: inertia.nrows() });
        }
        let chol = Cholesky::new(inertia.clone())
            .ok_or_else(|| Error::DegenerateMetric { point: inertia.diagonal().iter().copied().collect() })?;
        let mut data = vec![0.0; dim * dim * dim];
        for k in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    data[(k * dim + i) * dim + j] = structure(k, i, j);
                }
            }
        }
        Ok(Self { dim, structure: data, inertia_inv: chol.inverse(), inertia })
    }

    /// Commutative algebra of dimension `dim` with the given inner product.
    pub fn abelian(inertia: DMatrix<f64>) -> Result<Self> {
        Self::new(inertia.nrows(), |_, _, _| 0.0, inertia)
    }

    /// `se(2)` with `[e₁,e₂] = e₃`, `[e₂,e₃] = 0`, `[e₃,e₁] = e₂` and
    /// `𝕀 = diag(J, m, m)`; `e₁` is the rotation generator.
    pub fn se2(mass: f64, inertia: f64) -> Result<Self> {
        let ii = DMatrix::from_diagonal(&DVector::from_vec(vec![inertia, mass, mass]));
        Self::new(
            3,
            |k, i, j| match (k, i, j) {
                (2, 0, 1) => 1.0,
                (2, 1, 0) => -1.0,
                (1, 2, 0) => 1.0,
                (1, 0, 2) => -1.0,
                _ => 0.0,
            },
            ii,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constant(&self, k: usize, i: usize, j: usize) -> f64 {
        self.structure[(k * self.dim + i) * self.dim + j]
    }

    pub fn inertia(&self) -> &DMatrix<f64> {
        &self.inertia
    }

    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        (&self.inertia * b).dot(a)
    }

    /// `𝕀♭`.
    pub fn flat(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.inertia * u
    }

    /// `𝕀♯ = (𝕀♭)⁻¹`.
    pub fn sharp(&self, alpha: &DVector<f64>) -> DVector<f64> {
        &self.inertia_inv * alpha
    }

    pub fn bracket(&self, w: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |k, _| {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += self.structure_constant(k, i, j) * w[i] * u[j];
                }
            }
            acc
        })
    }

    /// Coadjoint action `ad*_w α`, defined by `(ad*_w α)(u) = α([w, u])`.
    pub fn coadjoint(&self, w: &DVector<f64>, alpha: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |j, _| {
            let mut acc = 0.0;
            for i in 0..n {
                for k in 0..n {
                    acc += alpha[k] * self.structure_constant(k, i, j) * w[i];
                }
            }
            acc
        })
    }

    /// Algebra restriction of the Levi-Civita connection, `∇_w u`.
    pub fn connection(&self, w: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        let torsion_part = self.bracket(w, u) * 0.5;
        let metric_part = self.sharp(&(self.coadjoint(w, &self.flat(u)) + self.coadjoint(u, &self.flat(w))));
        torsion_part - metric_part * 0.5
    }

    /// `𝔎(u,v)w = ∇_u∇_v w − ∇_v∇_u w − ∇_[u,v] w`.
    pub fn curvature(&self, u: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let uv_w = self.connection(u, &self.connection(v, w));
        let vu_w = self.connection(v, &self.connection(u, w));
        let bracket_w = self.connection(&self.bracket(u, v), w);
        uv_w - vu_w - bracket_w
    }

    /// Largest Jacobi-identity defect over all basis triples.
    pub fn jacobi_defect(&self) -> f64 {
        let n = self.dim;
        let e = |i: usize| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (a, b, c) = (e(i), e(j), e(k));
                    let cyc = self.bracket(&a, &self.bracket(&b, &c))
                        + self.bracket(&b, &self.bracket(&c, &a))
                        + self.bracket(&c, &self.bracket(&a, &b));
                    worst = worst.max(cyc.amax());
                }
            }
        }
        worst
    }

    /// Largest `|c^k_{ij} + c^k_{ji}|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((self.structure_constant(k, i, j) + self.structure_constant(k, j, i)).abs());
                }
            }
        }
        worst
    }
}

/// Group element (in chart coordinates) with body velocity and its first two
/// time derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyState {
    pub g: DVector<f64>,
    pub v: DVector<f64>,
    pub dv: DVector<f64>,
    pub ddv: DVector<f64>,
}

impl BodyState {
    pub fn new(g: DVector<f64>, v: DVector<f64>, dv: DVector<f64>, ddv: DVector<f64>) -> Self {
        Self { g, v, dv, ddv }
    }

    pub fn to_state(&self) -> DVector<f64> {
        let (m, n) = (self.g.len(), self.v.len());
        let mut s = DVector::zeros(m + 3 * n);
        s.rows_mut(0, m).copy_from(&self.g);
        s.rows_mut(m, n).copy_from(&self.v);
        s.rows_mut(m + n, n).copy_from(&self.dv);
        s.rows_mut(m + 2 * n, n).copy_from(&self.ddv);
        s
    }

    pub fn from_state(state: &DVector<f64>, chart_dim: usize, algebra_dim: usize) -> Self {
        let (m, n) = (chart_dim, algebra_dim);
        Self::new(
            state.rows(0, m).into_owned(),
            state.rows(m, n).into_owned(),
            state.rows(m + n, n).into_owned(),
            state.rows(m + 2 * n, n).into_owned(),
        )
    }
}

/// Algebra-valued covariant derivatives of a curve, before left translation.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedJets {
    /// `v′ + ∇_v v`.
    pub acceleration: DVector<f64>,
    /// `v″ + ∇_{v′}v + 2∇_v v′ + ∇_v∇_v v`.
    pub jerk: DVector<f64>,
    /// The fourth covariant derivative without its `v‴` term.
    pub snap_remainder: DVector<f64>,
}

pub fn reduced_jets(model: &LieAlgebraModel, state: &BodyState) -> ReducedJets {
    let nabla = |w: &DVector<f64>, u: &DVector<f64>| model.connection(w, u);
    let (v, dv, ddv) = (&state.v, &state.dv, &state.ddv);

    let v_v = nabla(v, v);
    let acceleration = dv + &v_v;

    let dv_v = nabla(dv, v);
    let v_dv = nabla(v, dv);
    let v_v_v = nabla(v, &v_v);
    let jerk = ddv + &dv_v + &v_dv * 2.0 + &v_v_v;

    let snap_remainder = nabla(ddv, v)
        + nabla(dv, dv) * 3.0
        + nabla(v, ddv) * 3.0
        + nabla(dv, &v_v)
        + nabla(v, &dv_v) * 2.0
        + nabla(v, &v_dv) * 3.0
        + nabla(v, &v_v_v);

    ReducedJets { acceleration, jerk, snap_remainder }
}

/// Solves the reduced Euler–Lagrange equation
///
/// ```text
/// 0 = v‴ + (D⁴ remainder) + 𝔎(v′,v)v + 𝔎(∇_v v, v)v − σ∇_v v − σv′ + ½ body_grad
/// ```
///
/// for `v‴`, where `body_grad` is the left-translated gradient of the potential.
pub fn reduced_el_rhs(
    model: &LieAlgebraModel,
    state: &BodyState,
    sigma: f64,
    body_grad: &DVector<f64>,
) -> DVector<f64> {
    let jets = reduced_jets(model, state);
    let v = &state.v;
    let v_v = model.connection(v, v);
    let curvature = model.curvature(&state.dv, v, v) + model.curvature(&v_v, v, v);
    (v_v + &state.dv) * sigma - jets.snap_remainder - curvature - body_grad * 0.5
}

#[cfg(test)]
mod tests;
