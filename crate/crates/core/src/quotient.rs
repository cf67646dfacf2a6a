//! Quotient solutions `g(x, y; t) = p(x, y; t) / q(y; t)` of
//! `∂ₜg = D_x g − g b(y) g(y, y; t)` and the odd-degree variant
//! `∂ₜg = D_x g − g F(|g(y, y; t)|²)`, scalar, periodic in `x`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{config, Error, Result};
use crate::numerics::{rk4_integrate, wavenumbers, Grid1D, Matrix, SpectralPlan};

const SERIES_LIMIT: f64 = 1e-6;
const PATH_SAMPLES: usize = 32;
pub const Q_FLOOR: f64 = 1e-10;
pub const UNITARITY_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct QuotientCoefficients {
    /// `d(s) = Σ c_m s^m`, evaluated at `s = 2π|k|`.
    pub dispersion: Vec<Complex64>,
    /// `b(y)` at the grid nodes.
    pub b: Vec<Complex64>,
    /// `F(u) = i Σ α_m u^m`.
    pub odd: Vec<f64>,
}

impl QuotientCoefficients {
    /// `d(s) = −s²`, i.e. `D_x = ∂ₓ²`.
    pub fn heat(b: Vec<Complex64>) -> Self {
        Self { dispersion: vec![0.0.into(), 0.0.into(), (-1.0).into()], b, odd: Vec::new() }
    }

    pub fn symbol(&self, k: f64) -> Complex64 {
        let s = 2.0 * std::f64::consts::PI * k.abs();
        self.dispersion.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * s + c)
    }

    /// `F(u)`, purely imaginary.
    pub fn nonlinearity(&self, u: f64) -> Complex64 {
        Complex64::new(0.0, self.odd.iter().rev().fold(0.0, |acc, a| acc * u + a))
    }

    fn check(&self, grid: &Grid1D<f64>) -> Result<()> {
        if self.b.len() != grid.len() {
            return config(format!("b has {} samples, grid {}", self.b.len(), grid.len()));
        }
        Ok(())
    }
}

/// `(e^{dt} − 1)/d`, by series when `|dt| < 1e-6`.
pub fn phi_time(d: Complex64, t: f64) -> Complex64 {
    let z = d * t;
    if z.norm() < SERIES_LIMIT {
        t * (1.0 + z / 2.0 + z * z / 6.0)
    } else {
        (z.exp() - 1.0) / d
    }
}

/// Samples on `grid × grid`: row `i` is `x_i`, column `j` is `y_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientField {
    pub grid: Grid1D<f64>,
    pub t: f64,
    pub g: Matrix<Complex64>,
    pub q: Vec<Complex64>,
}

impl QuotientField {
    /// `ḡ(y_j) = g(y_j, y_j)`.
    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.grid.len()).map(|j| self.g[(j, j)]).collect()
    }
}

fn column(m: &Matrix<Complex64>, j: usize) -> Vec<Complex64> {
    (0..m.rows()).map(|i| m[(i, j)]).collect()
}

fn check_square(g0: &Matrix<Complex64>, grid: &Grid1D<f64>) -> Result<()> {
    if g0.rows() != grid.len() || g0.cols() != grid.len() {
        return config("initial data must be sampled on grid × grid");
    }
    Ok(())
}

/// `(1/L) Σ_k m_k e^{2πik x_j}` at one node.
fn eval_at_node(modes: &[Complex64], ks: &[f64], grid: &Grid1D<f64>, j: usize) -> Complex64 {
    let x = grid.node(j);
    let sum: Complex64 = modes.iter().zip(ks).map(|(m, k)| m * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k * x)).sum();
    sum / grid.length()
}

struct Columns {
    plan: SpectralPlan<f64>,
    ks: Vec<f64>,
    /// Initial modes of each `y`-column.
    modes: Vec<Vec<Complex64>>,
}

impl Columns {
    fn new(g0: &Matrix<Complex64>, grid: &Grid1D<f64>) -> Result<Self> {
        check_square(g0, grid)?;
        let plan = SpectralPlan::new(grid)?;
        let modes = (0..grid.len()).map(|j| plan.forward(&column(g0, j))).collect();
        Ok(Self { plan, ks: wavenumbers(grid), modes })
    }

    fn p_column(&self, coeffs: &QuotientCoefficients, j: usize, t: f64) -> Vec<Complex64> {
        let m: Vec<Complex64> = self.modes[j].iter().zip(&self.ks).map(|(m, &k)| m * (coeffs.symbol(k) * t).exp()).collect();
        self.plan.inverse(&m)
    }
}

fn assemble(grid: &Grid1D<f64>, t: f64, cols: Vec<Vec<Complex64>>, q: Vec<Complex64>) -> QuotientField {
    let n = grid.len();
    let g = Matrix::from_fn(n, n, |i, j| cols[j][i] / q[j]);
    QuotientField { grid: *grid, t, g, q }
}

fn check_q(q: &[Complex64], t: f64) -> Result<()> {
    if let Some(v) = q.iter().find(|v| !(v.norm() > Q_FLOOR)) {
        return Err(Error::BlowupAtTime { t, detail: format!("q(y) = {v} crosses zero") });
    }
    Ok(())
}

/// Explicit quotient solution at time `t`.
pub fn quotient_solve(g0: &Matrix<Complex64>, grid: &Grid1D<f64>, coeffs: &QuotientCoefficients, t: f64) -> Result<QuotientField> {
    coeffs.check(grid)?;
    let columns = Columns::new(g0, grid)?;
    let n = grid.len();
    let q_at = |j: usize, tau: f64| {
        let m: Vec<Complex64> =
            columns.modes[j].iter().zip(&columns.ks).map(|(m, &k)| m * phi_time(coeffs.symbol(k), tau)).collect();
        1.0 + coeffs.b[j] * eval_at_node(&m, &columns.ks, grid, j)
    };
    let per_y: Vec<(Vec<Complex64>, Complex64, Option<f64>)> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut crossed = None;
            let mut last = Complex64::new(1.0, 0.0);
            for s in 1..=PATH_SAMPLES {
                let tau = t * s as f64 / PATH_SAMPLES as f64;
                let q = q_at(j, tau);
                if !(q.norm() > Q_FLOOR) || (q / last).arg().abs() > std::f64::consts::FRAC_PI_2 {
                    crossed = Some(tau);
                    break;
                }
                last = q;
            }
            (columns.p_column(coeffs, j, t), q_at(j, t), crossed)
        })
        .collect();
    if let Some(tau) = per_y.iter().filter_map(|v| v.2).reduce(f64::min) {
        return Err(Error::BlowupAtTime { t: tau, detail: "q(y) crosses zero".into() });
    }
    let (cols, q): (Vec<_>, Vec<_>) = per_y.into_iter().map(|(p, q, _)| (p, q)).unzip();
    check_q(&q, t)?;
    Ok(assemble(grid, t, cols, q))
}

/// Odd-degree variant: `∂ₜq = F(|p̄|²) q` by RK4 with `steps` steps over `[0, t]`.
pub fn quotient_odd_degree_solve(
    g0: &Matrix<Complex64>,
    grid: &Grid1D<f64>,
    coeffs: &QuotientCoefficients,
    t: f64,
    steps: usize,
) -> Result<QuotientField> {
    coeffs.check(grid)?;
    let columns = Columns::new(g0, grid)?;
    let n = grid.len();
    let symbols: Vec<Complex64> = columns.ks.iter().map(|&k| coeffs.symbol(k)).collect();
    let q: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|j| {
            // p̄(τ) = Σ_k w_k e^{d_k τ}
            let y = grid.node(j);
            let w: Vec<Complex64> = columns.modes[j]
                .iter()
                .zip(&columns.ks)
                .map(|(m, k)| m * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k * y) / grid.length())
                .collect();
            let rhs = |tau: f64, q: &Vec<Complex64>| {
                let pd: Complex64 = w.iter().zip(&symbols).map(|(w, d)| w * (d * tau).exp()).sum();
                vec![coeffs.nonlinearity(pd.norm_sqr()) * q[0]]
            };
            rk4_integrate(rhs, 0.0, t, vec![Complex64::new(1.0, 0.0)], steps.max(1))[0]
        })
        .collect();
    if q.iter().any(|v| !((v.norm() - 1.0).abs() <= UNITARITY_LIMIT)) {
        return Err(Error::IntegrationBlowup { t });
    }
    let cols = (0..n).into_par_iter().map(|j| columns.p_column(coeffs, j, t)).collect();
    Ok(assemble(grid, t, cols, q))
}

/// `max |∂ₜg − D_x g + g N(ḡ)|` with a central time difference and spectral `D_x`.
pub fn quotient_residual(
    prev: &QuotientField,
    cur: &QuotientField,
    next: &QuotientField,
    dt: f64,
    coeffs: &QuotientCoefficients,
    odd_degree: bool,
) -> Result<f64> {
    let grid = cur.grid;
    let plan = SpectralPlan::new(&grid)?;
    let ks = wavenumbers(&grid);
    let diag = cur.diagonal();
    let n = grid.len();
    let mut worst = 0.0f64;
    for j in 0..n {
        let mut m = plan.forward(&column(&cur.g, j));
        for (v, &k) in m.iter_mut().zip(&ks) {
            *v *= coeffs.symbol(k);
        }
        let dg = plan.inverse(&m);
        let nonlinear = if odd_degree { coeffs.nonlinearity(diag[j].norm_sqr()) } else { coeffs.b[j] * diag[j] };
        for i in 0..n {
            let gt = (next.g[(i, j)] - prev.g[(i, j)]) / (2.0 * dt);
            worst = worst.max((gt - dg[i] + cur.g[(i, j)] * nonlinear).norm());
        }
    }
    Ok(worst)
}
