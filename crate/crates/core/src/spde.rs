//! Stochastic heat equation with a nonlocal quadratic nonlinearity on the
//! periodic square `[0, 2π)²`.
//!
//! A field `g(x, y)` is held as the mode matrix `M = 2π U` where
//! `g(x, y) = Σ U[k, κ] e^{ikx} e^{-iκy}`; with this scaling the kernel
//! product `∫ g(x, z) q(z, y) dz` is the plain matrix product and the delta
//! kernel is the identity. Wavenumbers are integers in transform order.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{config, Error, Result};
use crate::numerics::{check_power_of_two, Matrix, RandomStream};

pub type ModeMatrix = Matrix<Complex64>;

const TWO_PI: f64 = std::f64::consts::TAU;

/// Integer wavenumbers `0, 1, …, n/2 − 1, −n/2, …, −1`.
pub fn integer_wavenumbers(n: usize) -> Vec<f64> {
    (0..n).map(|m| if m < n / 2 { m as f64 } else { m as f64 - n as f64 }).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub modes: ModeMatrix,
    pub t: f64,
}

impl Field2D {
    pub fn new(modes: ModeMatrix, t: f64) -> Result<Self> {
        if !modes.is_square() {
            return config("mode matrix must be square");
        }
        check_power_of_two(modes.rows())?;
        Ok(Self { modes, t })
    }

    pub fn n(&self) -> usize {
        self.modes.rows()
    }

    /// Node coordinate `2π i / n`.
    pub fn node(n: usize, i: usize) -> f64 {
        TWO_PI * i as f64 / n as f64
    }

    /// Transform samples `g(x_i, y_j)` (row `i`, column `j`).
    pub fn from_samples(samples: &Matrix<Complex64>, t: f64) -> Result<Self> {
        let n = samples.rows();
        if samples.cols() != n {
            return config("sample grid must be square");
        }
        check_power_of_two(n)?;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mut work = samples.clone();
        transform_columns(&mut work, fwd.as_ref());
        transform_rows(&mut work, inv.as_ref());
        let scale = TWO_PI / (n * n) as f64;
        Self::new(work.map(|v| v * scale), t)
    }

    pub fn from_fn(n: usize, t: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let samples = Matrix::from_fn(n, n, |i, j| Complex64::new(f(Self::node(n, i), Self::node(n, j)), 0.0));
        Self::from_samples(&samples, t)
    }

    pub fn samples(&self) -> Matrix<Complex64> {
        let n = self.n();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mut work = self.modes.map(|v| v / TWO_PI);
        transform_columns(&mut work, inv.as_ref());
        transform_rows(&mut work, fwd.as_ref());
        work
    }

    pub fn real_samples(&self) -> Matrix<f64> {
        let s = self.samples();
        Matrix::from_fn(s.rows(), s.cols(), |i, j| s[(i, j)].re)
    }
}

fn transform_columns(m: &mut Matrix<Complex64>, fft: &dyn rustfft::Fft<f64>) {
    let n = m.rows();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..m.cols() {
        for i in 0..n {
            buf[i] = m[(i, j)];
        }
        fft.process(&mut buf);
        for i in 0..n {
            m[(i, j)] = buf[i];
        }
    }
}

fn transform_rows(m: &mut Matrix<Complex64>, fft: &dyn rustfft::Fft<f64>) {
    let cols = m.cols();
    for i in 0..m.rows() {
        let row = &mut m.as_mut_slice()[i * cols..(i + 1) * cols];
        fft.process(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdeParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    /// Allow `β ≠ 0`, diffusing the second index with `β∂²` as well.
    pub isotropic_extension: bool,
}

impl SpdeParams {
    pub fn standard() -> Self {
        Self { alpha: 1.0, beta: 0.0, gamma: 10.0, epsilon: 1000.0, isotropic_extension: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return config("alpha must be positive");
        }
        if !(self.gamma >= 0.0) {
            return config("gamma must be non-negative");
        }
        if !self.beta.is_finite() || !self.epsilon.is_finite() {
            return config("beta and epsilon must be finite");
        }
        if self.beta != 0.0 && !self.isotropic_extension {
            return config("beta != 0 needs the isotropic extension flag");
        }
        Ok(())
    }
}

/// Noise multipliers of one `x`-mode: `σ = γ√π/k` and the Itô drift `½πγ²/k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMultipliers {
    pub noise: f64,
    pub ito: f64,
}

/// The zero mode carries no noise coupling and evolves deterministically.
pub fn k0_mode_policy(_params: &SpdeParams) -> ModeMultipliers {
    ModeMultipliers { noise: 0.0, ito: 0.0 }
}

pub fn mode_multipliers(params: &SpdeParams, k: f64) -> ModeMultipliers {
    if k == 0.0 {
        return k0_mode_policy(params);
    }
    let noise = params.gamma * std::f64::consts::PI.sqrt() / k;
    ModeMultipliers { noise, ito: 0.5 * noise * noise }
}

/// Stored real Gaussian increments per `x`-mode on a uniform fine time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianSheetModes {
    pub seed: u64,
    pub dt: f64,
    /// `increments[m][k]`, variance `dt`.
    pub increments: Vec<Vec<f64>>,
}

pub const SHEET_STREAM: u64 = 1;
pub const INITIAL_NOISE_STREAM: u64 = 0;

impl BrownianSheetModes {
    pub fn generate(seed: u64, n: usize, t_final: f64, steps: usize) -> Result<Self> {
        check_power_of_two(n)?;
        if steps == 0 || !(t_final > 0.0) {
            return config("sheet needs steps > 0 and t_final > 0");
        }
        let dt = t_final / steps as f64;
        let mut stream = RandomStream::new(seed, SHEET_STREAM);
        let increments = (0..steps).map(|_| stream.normals(n, dt)).collect();
        Ok(Self { seed, dt, increments })
    }

    pub fn steps(&self) -> usize {
        self.increments.len()
    }

    pub fn modes(&self) -> usize {
        self.increments.first().map_or(0, Vec::len)
    }

    pub fn t_final(&self) -> f64 {
        self.dt * self.steps() as f64
    }

    /// `W(t_{hi}) − W(t_{lo})` in fine steps.
    pub fn increment(&self, lo: usize, hi: usize) -> Vec<f64> {
        let mut sum = vec![0.0; self.modes()];
        for row in &self.increments[lo..hi] {
            for (s, v) in sum.iter_mut().zip(row) {
                *s += v;
            }
        }
        sum
    }

    /// `W` at fine step `m`.
    pub fn cumulative(&self, m: usize) -> Vec<f64> {
        self.increment(0, m)
    }

    fn stride(&self, coarse: usize) -> Result<usize> {
        if coarse == 0 || !self.steps().is_multiple_of(coarse) {
            return config(format!("{coarse} steps do not divide the {} sheet steps", self.steps()));
        }
        Ok(self.steps() / coarse)
    }
}

/// Smooth initial data plus `noise_factor · N(0, 1)` added to every real mode entry.
pub fn noisy_initial_field(n: usize, noise_factor: f64, seed: u64, g0: impl Fn(f64, f64) -> f64) -> Result<Field2D> {
    let mut field = Field2D::from_fn(n, 0.0, g0)?;
    let mut stream = RandomStream::new(seed, INITIAL_NOISE_STREAM);
    for v in field.modes.as_mut_slice() {
        v.re += noise_factor * stream.standard_normal();
    }
    Ok(field)
}

/// `sech(10(x + y − 2π)) sech(10(y − π))`.
pub fn sech_ridge_profile(x: f64, y: f64) -> f64 {
    1.0 / ((10.0 * (x + y - TWO_PI)).cosh() * (10.0 * (y - std::f64::consts::PI)).cosh())
}

/// `(e^z − 1)/z` with value 1 at 0.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 + 0.5 * z
    } else {
        z.exp_m1() / z
    }
}

fn linear_symbol(params: &SpdeParams, k: &[f64]) -> Matrix<f64> {
    let n = k.len();
    Matrix::from_fn(n, n, |i, j| -(params.alpha * k[i] * k[i] + params.beta * k[j] * k[j]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpdeTrajectory {
    pub fields: Vec<Field2D>,
}

impl SpdeTrajectory {
    pub fn last(&self) -> &Field2D {
        self.fields.last().expect("trajectory holds the initial field")
    }
}

/// Exponential integrator; records the initial field, every `record_every`-th step and the final step.
pub fn spde_direct_run(
    g0: &Field2D,
    params: &SpdeParams,
    sheet: &BrownianSheetModes,
    steps: usize,
    record_every: usize,
) -> Result<SpdeTrajectory> {
    params.validate()?;
    let n = g0.n();
    if sheet.modes() != n {
        return config("sheet and field mode counts differ");
    }
    let stride = sheet.stride(steps)?;
    let dt = sheet.t_final() / steps as f64;
    let k = integer_wavenumbers(n);
    let lam = linear_symbol(params, &k);
    let heat = lam.map(|l| (dt * l).exp());
    let phi = lam.map(|l| phi1(dt * l));
    let sigma: Vec<f64> = k.iter().map(|&kk| mode_multipliers(params, kk).noise).collect();
    let mut u = g0.modes.clone();
    let mut fields = vec![g0.clone()];
    for m in 0..steps {
        let dw = sheet.increment(m * stride, (m + 1) * stride);
        let uu = if params.epsilon != 0.0 { &u * &u } else { Matrix::zeros(n, n) };
        let mut next = Matrix::zeros(n, n);
        for i in 0..n {
            let noise = 1.0 + sigma[i] * dw[i];
            for j in 0..n {
                next[(i, j)] = heat[(i, j)] * noise * u[(i, j)] - params.epsilon * dt * phi[(i, j)] * uu[(i, j)];
            }
        }
        u = next;
        let t = g0.t + (m + 1) as f64 * dt;
        if !u.is_finite() {
            return Err(Error::IntegrationBlowup { t });
        }
        if m + 1 == steps || (record_every > 0 && (m + 1) % record_every == 0) {
            fields.push(Field2D { modes: u.clone(), t });
        }
    }
    Ok(SpdeTrajectory { fields })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoppeSpdeResult {
    pub field: Field2D,
    /// `(t, |det(I + q̂)|)` at every panel time.
    pub det_track: Vec<(f64, f64)>,
    /// `‖G q − P‖∞ / max(1, ‖P‖∞)` of the final solve.
    pub residual: f64,
}

/// Exact propagation of `p`, trapezoid quadrature of `∂ₜq̂ = εp`, final solve `P = G q`.
pub fn spde_poppe_run(g0: &Field2D, params: &SpdeParams, sheet: &BrownianSheetModes, panels: usize) -> Result<PoppeSpdeResult> {
    params.validate()?;
    let n = g0.n();
    if sheet.modes() != n {
        return config("sheet and field mode counts differ");
    }
    let stride = sheet.stride(panels)?;
    let t_final = sheet.t_final();
    let h = t_final / panels as f64;
    let k = integer_wavenumbers(n);
    let mult: Vec<ModeMultipliers> = k.iter().map(|&kk| mode_multipliers(params, kk)).collect();
    let p_at = |j: usize, w: &[f64]| -> ModeMatrix {
        let t = j as f64 * h;
        Matrix::from_fn(n, n, |r, c| {
            let e = -params.alpha * t * k[r] * k[r] + mult[r].noise * w[r] - mult[r].ito * t;
            g0.modes[(r, c)] * e.exp()
        })
    };
    // E(−τ) P(τ) with E(s) = e^{βsK²} acting on the first index
    let weighted = |j: usize, p: &ModeMatrix| -> ModeMatrix {
        let t = j as f64 * h;
        Matrix::from_fn(n, n, |r, c| p[(r, c)] * (-params.beta * t * k[r] * k[r]).exp())
    };
    let mut w = vec![0.0; n];
    let mut p = p_at(0, &w);
    let mut prev = weighted(0, &p);
    let mut integral: ModeMatrix = Matrix::zeros(n, n);
    let ident: ModeMatrix = Matrix::identity(n);
    let mut det_track = vec![(g0.t, 1.0)];
    for j in 1..=panels {
        let dw = sheet.increment((j - 1) * stride, j * stride);
        for (wi, d) in w.iter_mut().zip(&dw) {
            *wi += d;
        }
        p = p_at(j, &w);
        let cur = weighted(j, &p);
        integral = integral.add_scaled(Complex64::new(0.5 * h, 0.0), &(&prev + &cur));
        prev = cur;
        let bracket = ident.add_scaled(Complex64::new(params.epsilon, 0.0), &integral);
        det_track.push((g0.t + j as f64 * h, bracket.det().norm()));
    }
    let bracket = ident.add_scaled(Complex64::new(params.epsilon, 0.0), &integral);
    let q = Matrix::from_fn(n, n, |r, c| bracket[(r, c)] * (params.beta * t_final * k[r] * k[r]).exp());
    let gt = q.transpose().solve(&p.transpose())?;
    let g = gt.transpose();
    let scale = p.norm_inf().max(1.0);
    let residual = (&(&g * &q) - &p).norm_inf() / scale;
    if !g.is_finite() {
        return Err(Error::IntegrationBlowup { t: g0.t + t_final });
    }
    Ok(PoppeSpdeResult { field: Field2D { modes: g, t: g0.t + t_final }, det_track, residual })
}

/// Sup-norm of the difference of two fields in physical space.
pub fn physical_gap(a: &Field2D, b: &Field2D) -> f64 {
    let (sa, sb) = (a.samples(), b.samples());
    sa.as_slice().iter().zip(sb.as_slice()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
