use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::{convolve, volterra_project, LaplaceField, MassDensity};
use crate::error::{config, Error, Result};
use crate::numerics::{rk4_step, Grid1D, QuadratureScheme};

pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Coefficients of `∂ₜg = d(∂)g + g⊛(b(∂)g) − g⊛a − g⊛b₀⊛g − λ m₀ g`.
///
/// Polynomials are stored lowest degree first. Mass-space reconstruction
/// supports `d(s) = d₀ + d₁ s` with `d₁ ≤ 0` and constant `b`.
#[derive(Clone, Default)]
pub struct SmolCoefficients {
    pub d: Vec<f64>,
    pub b: Vec<f64>,
    /// `a(x, t)`
    pub a: Option<SpaceTimeFn>,
    /// `b₀(x)`
    pub b0: Option<SpaceFn>,
    /// Coefficient `λ` of the loss term `−λ m₀ g`.
    pub loss_rate: f64,
}

impl fmt::Debug for SmolCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmolCoefficients")
            .field("d", &self.d)
            .field("b", &self.b)
            .field("a", &self.a.is_some())
            .field("b0", &self.b0.is_some())
            .field("loss_rate", &self.loss_rate)
            .finish()
    }
}

fn degree(poly: &[f64]) -> Option<usize> {
    poly.iter().rposition(|&c| c != 0.0)
}

impl SmolCoefficients {
    /// `∂ₜg = ½ g⊛g − m₀ g`.
    pub fn constant_kernel() -> Self {
        Self { d: vec![0.0], b: vec![0.5], loss_rate: 1.0, ..Default::default() }
    }

    pub fn d0(&self) -> f64 {
        self.d.first().copied().unwrap_or(0.0)
    }
    pub fn d1(&self) -> f64 {
        self.d.get(1).copied().unwrap_or(0.0)
    }
    pub fn b_const(&self) -> f64 {
        self.b.first().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let dd = degree(&self.d);
        let db = degree(&self.b);
        if let Some(db) = db {
            let below = dd.is_some_and(|dd| db < dd);
            if !(below || db == 0) {
                return config(format!("deg b = {db} must be below deg d or zero"));
            }
            if db > 0 {
                return config("mass-space reconstruction supports constant b only");
            }
        }
        if dd.is_some_and(|dd| dd > 1) {
            return config("mass-space reconstruction supports deg d <= 1");
        }
        if self.d1() > 0.0 {
            return config("first-order coefficient of d must be <= 0 (inflow from x = 0)");
        }
        if self.d.iter().chain(&self.b).any(|c| !c.is_finite()) || !self.loss_rate.is_finite() {
            return config("coefficients must be finite");
        }
        Ok(())
    }

    fn a_samples(&self, nodes: &[f64], t: f64) -> Option<Vec<f64>> {
        self.a.as_ref().map(|a| nodes.iter().map(|&x| a(x, t)).collect())
    }

    fn b0_samples(&self, nodes: &[f64]) -> Option<Vec<f64>> {
        self.b0.as_ref().map(|b| nodes.iter().map(|&x| b(x)).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralSmolOptions {
    pub scheme: QuadratureScheme,
    pub time_steps: usize,
    pub s_grid: Grid1D<f64>,
}

impl Default for GeneralSmolOptions {
    fn default() -> Self {
        Self { scheme: QuadratureScheme::Gregory, time_steps: 1 << 10, s_grid: LaplaceField::default_grid() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralSmolSolution {
    pub density: MassDensity,
    /// `(t, m₀)` from the preprocessing Riccati equation.
    pub m0_track: Vec<(f64, f64)>,
    pub qhat: Vec<f64>,
    /// `𝔤 = 𝔭/𝔮` on the `s` grid.
    pub laplace: LaplaceField,
}

/// Cubic Lagrange interpolation of uniform samples, zero left of the grid.
fn interpolate(values: &[f64], h: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let n = values.len();
    let s = x / h;
    let i = s.floor() as isize;
    if (s - s.round()).abs() < 1e-12 {
        let k = s.round() as usize;
        return if k < n { values[k] } else { 0.0 };
    }
    let start = (i - 1).clamp(0, n as isize - 4) as usize;
    let mut total = 0.0;
    for a in 0..4 {
        let mut l = 1.0;
        for b in 0..4 {
            if a != b {
                l *= (s - (start + b) as f64) / ((start + a) as f64 - (start + b) as f64);
            }
        }
        total += l * values[start + a];
    }
    total
}

/// State of the `m₀` Riccati equation together with `∫₀ᵗ m₀`.
fn m0_rhs<'a>(co: &'a SmolCoefficients, abar: &'a dyn Fn(f64) -> f64, b0bar: f64) -> impl Fn(f64, &Vec<f64>) -> Vec<f64> + 'a {
    let quad = co.b_const() - b0bar - co.loss_rate;
    let d0 = co.d0();
    move |t, y| {
        let m0 = y[0];
        vec![(d0 - abar(t)) * m0 + quad * m0 * m0, m0]
    }
}

pub fn general_smol_solve(
    coeffs: &SmolCoefficients,
    g0: &MassDensity,
    t: f64,
    opts: &GeneralSmolOptions,
) -> Result<GeneralSmolSolution> {
    coeffs.validate()?;
    LaplaceField::check_grid(&opts.s_grid)?;
    if !(t >= 0.0) || opts.time_steps == 0 {
        return config("need t >= 0 and at least one time step");
    }
    let scheme = opts.scheme;
    let grid = g0.grid;
    let h = grid.spacing();
    let nodes = grid.nodes();
    let n_steps = opts.time_steps;
    let dt = t / n_steps as f64;
    let integral = |v: &[f64]| -> f64 {
        let d = MassDensity { grid, values: v.to_vec(), t: 0.0 };
        d.m0(scheme)
    };
    let abar = |tau: f64| coeffs.a_samples(&nodes, tau).map_or(0.0, |a| integral(&a));
    let b0_vals = coeffs.b0_samples(&nodes);
    let b0bar = b0_vals.as_ref().map_or(0.0, |b| integral(b));

    // m₀ and ∫m₀ at whole and half steps.
    let rhs = m0_rhs(coeffs, &abar, b0bar);
    let mut whole = vec![vec![g0.m0(scheme), 0.0]];
    let mut halves = Vec::with_capacity(n_steps);
    for m in 0..n_steps {
        let tm = m as f64 * dt;
        halves.push(rk4_step(&rhs, tm, &whole[m], 0.5 * dt));
        whole.push(rk4_step(&rhs, tm, &whole[m], dt));
    }
    if let Some(m) = whole.iter().position(|y| !y[0].is_finite()) {
        return Err(Error::BlowupAtTime { t: m as f64 * dt, detail: "m0 Riccati equation blows up".into() });
    }
    let m0_track: Vec<(f64, f64)> = whole.iter().enumerate().map(|(m, y)| (m as f64 * dt, y[0])).collect();

    // ∫₀^τ effective zero-order coefficient, indexed by half steps.
    let growth = |half_index: usize| -> f64 {
        let tau = half_index as f64 * 0.5 * dt;
        let y = if half_index.is_multiple_of(2) { &whole[half_index / 2] } else { &halves[half_index / 2] };
        coeffs.d0() * tau - coeffs.loss_rate * y[1]
    };
    let c1 = coeffs.d1();
    let p_at = |half_index: usize| -> Vec<f64> {
        let tau = half_index as f64 * 0.5 * dt;
        let amp = growth(half_index).exp();
        nodes.iter().map(|&x| amp * interpolate(&g0.values, h, x + c1 * tau)).collect()
    };

    // ∂ₜq̂ = a + a⊛q̂ + b₀⊛p − B₀ p
    let b_const = coeffs.b_const();
    let q_rhs = |half_index: usize, q: &Vec<f64>| -> Vec<f64> {
        let tau = half_index as f64 * 0.5 * dt;
        let p = p_at(half_index);
        let mut out: Vec<f64> = p.iter().map(|v| -b_const * v).collect();
        if let Some(a) = coeffs.a_samples(&nodes, tau) {
            let aq = convolve(&a, q, h, scheme);
            for i in 0..out.len() {
                out[i] += a[i] + aq[i];
            }
        }
        if let Some(b0) = &b0_vals {
            let bp = convolve(b0, &p, h, scheme);
            for i in 0..out.len() {
                out[i] += bp[i];
            }
        }
        out
    };
    let axpy = |y: &[f64], a: f64, k: &[f64]| -> Vec<f64> { y.iter().zip(k).map(|(y, k)| y + a * k).collect() };
    let mut qhat = vec![0.0; nodes.len()];
    for m in 0..n_steps {
        let k1 = q_rhs(2 * m, &qhat);
        let k2 = q_rhs(2 * m + 1, &axpy(&qhat, 0.5 * dt, &k1));
        let k3 = q_rhs(2 * m + 1, &axpy(&qhat, 0.5 * dt, &k2));
        let k4 = q_rhs(2 * m + 2, &axpy(&qhat, dt, &k3));
        for i in 0..qhat.len() {
            qhat[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    if qhat.iter().any(|v| !v.is_finite()) {
        return Err(Error::IntegrationBlowup { t });
    }
    let p_final = p_at(2 * n_steps);
    let values = volterra_project(&p_final, &qhat, h, scheme)?;
    let density = MassDensity::new(grid, values, g0.t + t)?;

    let laplace = laplace_route(coeffs, g0, t, opts, &whole, b0_vals.as_deref())?;
    Ok(GeneralSmolSolution { density, m0_track, qhat, laplace })
}

/// `𝔤 = 𝔭/𝔮` with `𝔮 = e^{A(0,t)} + ∫₀ᵗ e^{A(τ,t)} (𝔟₀ − B₀) 𝔭(τ) dτ`, `A(τ,t) = ∫_τ^t 𝔞`.
fn laplace_route(
    coeffs: &SmolCoefficients,
    g0: &MassDensity,
    t: f64,
    opts: &GeneralSmolOptions,
    whole: &[Vec<f64>],
    b0_vals: Option<&[f64]>,
) -> Result<LaplaceField> {
    let scheme = opts.scheme;
    let grid = g0.grid;
    let nodes = grid.nodes();
    let n_steps = whole.len() - 1;
    let dt = t / n_steps as f64;
    let transform = |v: Vec<f64>, s: f64| MassDensity { grid, values: v, t: 0.0 }.laplace(s, scheme);
    let a_tables: Option<Vec<Vec<f64>>> = coeffs
        .a
        .as_ref()
        .map(|_| (0..=n_steps).map(|m| coeffs.a_samples(&nodes, m as f64 * dt).unwrap()).collect());
    let mut values = Vec::with_capacity(opts.s_grid.len());
    for s in opts.s_grid.nodes() {
        let g0s = g0.laplace(s, scheme);
        let b0s = b0_vals.map_or(0.0, |b| transform(b.to_vec(), s));
        let forcing = b0s - coeffs.b_const();
        let log_p = |m: usize| -> f64 {
            let tau = m as f64 * dt;
            coeffs.d0() * tau - coeffs.loss_rate * whole[m][1] + coeffs.d1() * s * tau
        };
        let a_hat: Vec<f64> = match &a_tables {
            Some(tab) => tab.iter().map(|a| transform(a.clone(), s)).collect(),
            None => vec![0.0; n_steps + 1],
        };
        // A(τ_m, t) by a reversed cumulative trapezoid.
        let mut big_a = vec![0.0; n_steps + 1];
        for m in (0..n_steps).rev() {
            big_a[m] = big_a[m + 1] + 0.5 * dt * (a_hat[m] + a_hat[m + 1]);
        }
        let integrand = |m: usize| big_a[m].exp() * forcing * log_p(m).exp() * g0s;
        let mut q = big_a[0].exp();
        if n_steps > 0 && dt > 0.0 {
            q += 0.5 * dt * (integrand(0) + integrand(n_steps));
            for m in 1..n_steps {
                q += dt * integrand(m);
            }
        }
        if !(q > 1e-12) {
            return Err(Error::BlowupAtTime { t, detail: format!("Laplace q = {q:e} at s = {s}") });
        }
        let p = log_p(n_steps).exp() * g0s;
        values.push(Complex64::new(p / q, 0.0));
    }
    Ok(LaplaceField { grid: opts.s_grid, values })
}

/// Right-hand side of the general equation, `∂ₓ` by second-order differences.
pub fn general_smol_rhs(coeffs: &SmolCoefficients, g: &MassDensity, scheme: QuadratureScheme) -> Vec<f64> {
    let grid = g.grid;
    let h = grid.spacing();
    let nodes = grid.nodes();
    let v = &g.values;
    let n = v.len();
    let m0 = g.m0(scheme);
    let mut out: Vec<f64> = v.iter().map(|gi| (coeffs.d0() - coeffs.loss_rate * m0) * gi).collect();
    if coeffs.d1() != 0.0 {
        for i in 0..n {
            let dg = if i == 0 {
                (v[1] - v[0]) / h
            } else if i == n - 1 {
                (v[n - 1] - v[n - 2]) / h
            } else {
                (v[i + 1] - v[i - 1]) / (2.0 * h)
            };
            out[i] += coeffs.d1() * dg;
        }
    }
    if coeffs.b_const() != 0.0 {
        let gg = convolve(v, v, h, scheme);
        for i in 0..n {
            out[i] += coeffs.b_const() * gg[i];
        }
    }
    if let Some(a) = coeffs.a_samples(&nodes, g.t) {
        let ga = convolve(v, &a, h, scheme);
        for i in 0..n {
            out[i] -= ga[i];
        }
    }
    if let Some(b0) = coeffs.b0_samples(&nodes) {
        let bg = convolve(&b0, v, h, scheme);
        let gbg = convolve(v, &bg, h, scheme);
        for i in 0..n {
            out[i] -= gbg[i];
        }
    }
    out
}

/// `max |∂ₜg − rhs(g)|` over the grid from three snapshots `dt` apart.
pub fn general_smol_residual(
    coeffs: &SmolCoefficients,
    prev: &MassDensity,
    cur: &MassDensity,
    next: &MassDensity,
    dt: f64,
    scheme: QuadratureScheme,
) -> f64 {
    let rhs = general_smol_rhs(coeffs, cur, scheme);
    (0..cur.values.len())
        .map(|i| ((next.values[i] - prev.values[i]) / (2.0 * dt) - rhs[i]).abs())
        .fold(0.0, f64::max)
}
