use nalgebra::DVector;

/// Position, velocity, covariant acceleration and covariant jerk of a curve,
/// all in chart components.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveJet {
    pub x: DVector<f64>,
    /// Coordinate velocity `dx/dt`.
    pub u: DVector<f64>,
    /// Covariant acceleration `D²x/dt²`.
    pub a: DVector<f64>,
    /// Covariant jerk `D³x/dt³`.
    pub j: DVector<f64>,
}

impl CurveJet {
    pub fn new(x: DVector<f64>, u: DVector<f64>, a: DVector<f64>, j: DVector<f64>) -> Self {
        Self { x, u, a, j }
    }

    pub fn at_rest(x: DVector<f64>) -> Self {
        let n = x.len();
        Self::new(x, DVector::zeros(n), DVector::zeros(n), DVector::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Stacks `(x, u, a, j)` into one state vector.
    pub fn to_state(&self) -> DVector<f64> {
        let n = self.dim();
        let mut s = DVector::zeros(4 * n);
        s.rows_mut(0, n).copy_from(&self.x);
        s.rows_mut(n, n).copy_from(&self.u);
        s.rows_mut(2 * n, n).copy_from(&self.a);
        s.rows_mut(3 * n, n).copy_from(&self.j);
        s
    }

    /// Reads a jet from the first `4n` entries of `state`.
    pub fn from_state(state: &DVector<f64>, n: usize) -> Self {
        Self::new(
            state.rows(0, n).into_owned(),
            state.rows(n, n).into_owned(),
            state.rows(2 * n, n).into_owned(),
            state.rows(3 * n, n).into_owned(),
        )
    }
}
