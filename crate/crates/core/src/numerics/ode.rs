//! Classical fourth-order Runge-Kutta stepping for vector-space states.

use crate::numerics::linalg::Matrix;
use crate::numerics::scalar::Scalar;

/// State that supports `self + a * other` with a real coefficient.
pub trait LinearState: Clone {
    fn axpy(&self, a: f64, other: &Self) -> Self;
}

impl LinearState for Vec<f64> {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        self.iter().zip(other).map(|(x, y)| x + a * y).collect()
    }
}

impl LinearState for Vec<num_complex::Complex64> {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        self.iter().zip(other).map(|(x, y)| x + y * a).collect()
    }
}

impl<T: Scalar<Real = f64>> LinearState for Matrix<T> {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        self.add_scaled(T::from_real(a), other)
    }
}

impl<A: LinearState, B: LinearState> LinearState for (A, B) {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        (self.0.axpy(a, &other.0), self.1.axpy(a, &other.1))
    }
}

pub fn rk4_step<S: LinearState>(f: &impl Fn(f64, &S) -> S, t: f64, y: &S, dt: f64) -> S {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * dt, &y.axpy(0.5 * dt, &k1));
    let k3 = f(t + 0.5 * dt, &y.axpy(0.5 * dt, &k2));
    let k4 = f(t + dt, &y.axpy(dt, &k3));
    y.axpy(dt / 6.0, &k1).axpy(dt / 3.0, &k2).axpy(dt / 3.0, &k3).axpy(dt / 6.0, &k4)
}

/// Integrate from `t0` to `t1` in `steps` equal steps.
pub fn rk4_integrate<S: LinearState>(f: impl Fn(f64, &S) -> S, t0: f64, t1: f64, y0: S, steps: usize) -> S {
    let dt = (t1 - t0) / steps as f64;
    let mut y = y0;
    for m in 0..steps {
        y = rk4_step(&f, t0 + m as f64 * dt, &y, dt);
    }
    y
}
