//! One-dimensional elliptic Riccati equation `g′ = c + d g − g a − g b g`
//! through `q′ = a q + b p`, `p′ = c q + d p`, `g = p / q`.

use crate::error::{config, Error, Result};
use crate::numerics::{rk4_step, Grid1D, GridKind};

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticCoefficients {
    pub grid: Grid1D<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

impl EllipticCoefficients {
    pub fn from_fn(grid: Grid1D<f64>, f: impl Fn(f64) -> [f64; 4]) -> Result<Self> {
        let vals: Vec<[f64; 4]> = grid.nodes().into_iter().map(f).collect();
        let pick = |k: usize| vals.iter().map(|v| v[k]).collect();
        let co = Self { grid, a: pick(0), b: pick(1), c: pick(2), d: pick(3) };
        co.validate()?;
        Ok(co)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.kind() != GridKind::Closed {
            return config("elliptic solve needs a closed grid");
        }
        let n = self.grid.len();
        if n < 5 {
            return config("elliptic solve needs at least 5 nodes");
        }
        if [&self.a, &self.b, &self.c, &self.d].iter().any(|v| v.len() != n) {
            return config("coefficient samples must match the grid");
        }
        if self.b.iter().any(|v| !(v.abs() > 0.0)) {
            return config("b must be non-zero");
        }
        Ok(())
    }

    /// Cubic Lagrange interpolation of all four coefficients at `x`.
    fn at(&self, x: f64) -> [f64; 4] {
        let h = self.grid.spacing();
        let n = self.grid.len();
        let s = (x - self.grid.lower()) / h;
        let k = s.round();
        if (s - k).abs() < 1e-12 && k >= 0.0 && (k as usize) < n {
            let i = k as usize;
            return [self.a[i], self.b[i], self.c[i], self.d[i]];
        }
        let start = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let mut w = [0.0; 4];
        for (p, wp) in w.iter_mut().enumerate() {
            let mut l = 1.0;
            for r in 0..4 {
                if r != p {
                    l *= (s - (start + r) as f64) / (p as f64 - r as f64);
                }
            }
            *wp = l;
        }
        let mix = |v: &[f64]| (0..4).map(|p| w[p] * v[start + p]).sum();
        [mix(&self.a), mix(&self.b), mix(&self.c), mix(&self.d)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticSolution {
    pub x: Vec<f64>,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub g: Vec<f64>,
    /// `max |g′ − (c + dg − ga − gbg)|` over the nodes.
    pub residual: f64,
}

/// RK4 node to node; `q` must stay away from zero.
pub fn elliptic_quotient_solve(coeffs: &EllipticCoefficients, q0: f64, p0: f64) -> Result<EllipticSolution> {
    coeffs.validate()?;
    if q0 == 0.0 {
        return Err(Error::ChartBreakdown { at: coeffs.grid.lower(), det: 0.0 });
    }
    let x = coeffs.grid.nodes();
    let h = coeffs.grid.spacing();
    let rhs = |s: f64, y: &Vec<f64>| {
        let [a, b, c, d] = coeffs.at(s);
        vec![a * y[0] + b * y[1], c * y[0] + d * y[1]]
    };
    let mut q = vec![q0];
    let mut p = vec![p0];
    let mut state = vec![q0, p0];
    for i in 1..x.len() {
        state = rk4_step(&rhs, x[i - 1], &state, h);
        if state[0].signum() != q[i - 1].signum() || state[0].abs() < 1e-12 {
            return Err(Error::ChartBreakdown { at: x[i], det: state[0] });
        }
        q.push(state[0]);
        p.push(state[1]);
    }
    let g: Vec<f64> = q.iter().zip(&p).map(|(q, p)| p / q).collect();
    let residual = elliptic_residual(coeffs, &g);
    Ok(EllipticSolution { x, q, p, g, residual })
}

/// Fourth-order five-point derivative, one-sided near the ends.
pub fn derivative5(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let d = if i >= 2 && i + 2 < n {
                v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]
            } else if i < 2 {
                let s = if i == 0 {
                    [-25.0, 48.0, -36.0, 16.0, -3.0]
                } else {
                    [-3.0, -10.0, 18.0, -6.0, 1.0]
                };
                (0..5).map(|k| s[k] * v[k]).sum::<f64>()
            } else {
                let s = if i == n - 1 {
                    [3.0, -16.0, 36.0, -48.0, 25.0]
                } else {
                    [-1.0, 6.0, -18.0, 10.0, 3.0]
                };
                (0..5).map(|k| s[k] * v[n - 5 + k]).sum::<f64>()
            };
            d / (12.0 * h)
        })
        .collect()
}

pub fn elliptic_residual(coeffs: &EllipticCoefficients, g: &[f64]) -> f64 {
    let dg = derivative5(g, coeffs.grid.spacing());
    (0..g.len())
        .map(|i| {
            let (a, b, c, d) = (coeffs.a[i], coeffs.b[i], coeffs.c[i], coeffs.d[i]);
            (dg[i] - (c + d * g[i] - g[i] * a - g[i] * b * g[i])).abs()
        })
        .fold(0.0, f64::max)
}
