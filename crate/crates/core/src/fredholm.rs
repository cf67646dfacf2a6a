//! Canonical base equations, the Riccati projection `G = P Q⁻¹`, and
//! Fredholm solves for additive (Hankel) kernels.

use num_complex::Complex64;

use crate::error::{config, Error, Result};
use crate::numerics::{
    det_reg_matrix, rk4_integrate, Determinants, Grid1D, GridKind, KernelMatrix, Matrix, QuadratureRule, Scalar,
};

/// Determinant magnitude below which a chart is declared broken.
pub const CHART_THRESHOLD: f64 = 1e-10;

/// Coefficients of `Q̇ = AQ + BP`, `Ṗ = CQ + DP`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalCoefficients<T> {
    pub a: Matrix<T>,
    pub b: Matrix<T>,
    pub c: Matrix<T>,
    pub d: Matrix<T>,
}

impl<T: Scalar<Real = f64>> CanonicalCoefficients<T> {
    pub fn new(a: Matrix<T>, b: Matrix<T>, c: Matrix<T>, d: Matrix<T>) -> Result<Self> {
        let n = a.rows();
        let m = d.rows();
        let ok = a.is_square()
            && d.is_square()
            && (b.rows(), b.cols()) == (n, m)
            && (c.rows(), c.cols()) == (m, n);
        if !ok {
            return config("canonical coefficients have inconsistent dimensions");
        }
        if ![&a, &b, &c, &d].iter().all(|x| x.is_finite()) {
            return config("canonical coefficients must be finite");
        }
        Ok(Self { a, b, c, d })
    }

    /// Block generator `[[A, B], [C, D]]`.
    pub fn generator(&self) -> Matrix<T> {
        let n = self.a.rows();
        let m = self.d.rows();
        let mut g = Matrix::zeros(n + m, n + m);
        g.set_block(0, 0, &self.a);
        g.set_block(0, n, &self.b);
        g.set_block(n, 0, &self.c);
        g.set_block(n, n, &self.d);
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseState<T> {
    pub q: Matrix<T>,
    pub p: Matrix<T>,
    pub t: f64,
}

pub fn integrate_base<T: Scalar<Real = f64>>(
    coeffs: &CanonicalCoefficients<T>,
    initial: &BaseState<T>,
    t: f64,
    steps: usize,
) -> Result<BaseState<T>> {
    if steps == 0 {
        return config("integrate_base needs at least one step");
    }
    let rhs = |_: f64, s: &(Matrix<T>, Matrix<T>)| {
        let dq = &(&coeffs.a * &s.0) + &(&coeffs.b * &s.1);
        let dp = &(&coeffs.c * &s.0) + &(&coeffs.d * &s.1);
        (dq, dp)
    };
    let (q, p) = rk4_integrate(rhs, initial.t, t, (initial.q.clone(), initial.p.clone()), steps);
    if !q.is_finite() || !p.is_finite() {
        return Err(Error::IntegrationBlowup { t });
    }
    Ok(BaseState { q, p, t })
}

/// Exact constant-coefficient solution through the block matrix exponential.
pub fn exact_base_solution<T: Scalar<Real = f64>>(
    coeffs: &CanonicalCoefficients<T>,
    initial: &BaseState<T>,
    t: f64,
) -> BaseState<T> {
    let n = coeffs.a.rows();
    let m = coeffs.d.rows();
    let prop = coeffs.generator().scaled(T::from_real(t - initial.t)).expm();
    let cols = initial.q.cols();
    let mut stacked = Matrix::zeros(n + m, cols);
    stacked.set_block(0, 0, &initial.q);
    stacked.set_block(n, 0, &initial.p);
    let out = &prop * &stacked;
    BaseState { q: out.block(0, 0, n, cols), p: out.block(n, 0, m, cols), t }
}

/// `G = P Q⁻¹`, refusing when `|det Q|` falls below the chart threshold.
pub fn riccati_project<T: Scalar<Real = f64>>(state: &BaseState<T>) -> Result<Matrix<T>> {
    let lu = crate::numerics::Lu::factor_unchecked(&state.q);
    let det = lu.det().modulus();
    if !(det >= CHART_THRESHOLD) {
        return Err(Error::ChartBreakdown { at: state.t, det });
    }
    let qt = state.q.transpose();
    let gt = qt.solve(&state.p.transpose()).map_err(|_| Error::ChartBreakdown { at: state.t, det })?;
    Ok(gt.transpose())
}

/// Central-difference residual `‖Ġ − C − DG + G(A + BG)‖∞` over interior samples.
pub fn riccati_residual<T: Scalar<Real = f64>>(
    coeffs: &CanonicalCoefficients<T>,
    samples: &[Matrix<T>],
    dt: f64,
) -> Result<f64> {
    if samples.len() < 3 {
        return config("riccati_residual needs at least three samples");
    }
    if !(dt > 0.0) {
        return config("riccati_residual needs dt > 0");
    }
    let mut worst = 0.0f64;
    for w in samples.windows(3) {
        let g = &w[1];
        let gdot = (&w[2] - &w[0]).scaled(T::from_real(0.5 / dt));
        let flow = &(&coeffs.c + &(&coeffs.d * g)) - &(g * &(&coeffs.a + &(&coeffs.b * g)));
        worst = worst.max((&gdot - &flow).max_abs());
    }
    Ok(worst)
}

/// How an additive trace is continued outside its sampled interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceExtension {
    Zero,
    Periodic,
    Error,
}

/// Samples of a one-argument kernel `r` defining `(Rψ)(y) = ∫ r(y + ξ + x) ψ(ξ) dξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveKernelTrace {
    pub grid: Grid1D<f64>,
    pub values: Vec<Complex64>,
    pub extension: TraceExtension,
}

impl AdditiveKernelTrace {
    pub fn new(grid: Grid1D<f64>, values: Vec<Complex64>, extension: TraceExtension) -> Result<Self> {
        if values.len() != grid.len() {
            return config(format!("trace has {} values for {} nodes", values.len(), grid.len()));
        }
        if extension == TraceExtension::Periodic && grid.kind() != GridKind::Periodic {
            return config("periodic trace extension needs a periodic grid");
        }
        Ok(Self { grid, values, extension })
    }

    pub fn from_fn(grid: Grid1D<f64>, extension: TraceExtension, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, values, extension)
    }

    pub fn zero(grid: Grid1D<f64>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![Complex64::new(0.0, 0.0); n], extension: TraceExtension::Zero }
    }

    fn at_index(&self, i: i64, arg: f64) -> Result<Complex64> {
        let n = self.values.len() as i64;
        if (0..n).contains(&i) {
            return Ok(self.values[i as usize]);
        }
        match self.extension {
            TraceExtension::Zero => Ok(Complex64::new(0.0, 0.0)),
            TraceExtension::Periodic => Ok(self.values[i.rem_euclid(n) as usize]),
            TraceExtension::Error => Err(Error::TraceRange { arg }),
        }
    }

    /// `r(arg)`: exact at nodes, linear interpolation between them.
    pub fn eval(&self, arg: f64) -> Result<Complex64> {
        let s = self.grid.position(arg);
        let nearest = s.round();
        if (s - nearest).abs() < 1e-9 {
            if self.grid.kind() == GridKind::Closed
                && self.extension == TraceExtension::Error
                && nearest as i64 == self.values.len() as i64
            {
                return Err(Error::TraceRange { arg });
            }
            return self.at_index(nearest as i64, arg);
        }
        let i0 = s.floor();
        let frac = s - i0;
        let lo = self.at_index(i0 as i64, arg)?;
        let hi = self.at_index(i0 as i64 + 1, arg)?;
        Ok(lo * (1.0 - frac) + hi * frac)
    }
}

/// Solution of the `y = 0` row of the Fredholm relation at one `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct FredholmRow {
    pub x: f64,
    /// `g(0, ξ_j)` on the quadrature nodes.
    pub g: Vec<Complex64>,
    /// `⟨G⟩ = g(0, 0)` by Nyström interpolation.
    pub observed: Complex64,
    pub det: Determinants<Complex64>,
}

/// Solve `p(z + x) = g(0, z) + ∫ g(0, ξ) q̂(ξ, z) dξ` on the quadrature nodes.
pub fn solve_additive_fredholm(
    p_trace: &AdditiveKernelTrace,
    qhat: &dyn Fn(f64, f64) -> Complex64,
    rule: &QuadratureRule<f64>,
    x: f64,
) -> Result<FredholmRow> {
    let nodes = rule.nodes();
    let rhs = nodes.iter().map(|&z| p_trace.eval(z + x)).collect::<Result<Vec<_>>>()?;
    let kernel = KernelMatrix::from_fn(rule.clone(), qhat);
    let to_origin: Vec<Complex64> = nodes.iter().map(|&y| qhat(y, 0.0)).collect();
    solve_fredholm_assembled(&kernel, &rhs, p_trace.eval(x)?, &to_origin, x)
}

/// Same solve with the kernel already sampled: `rhs[i] = p(ξ_i + x)`,
/// `p_origin = p(x)` and `to_origin[j] = q̂(ξ_j, 0)`.
pub fn solve_fredholm_assembled(
    qhat: &KernelMatrix,
    rhs: &[Complex64],
    p_origin: Complex64,
    to_origin: &[Complex64],
    x: f64,
) -> Result<FredholmRow> {
    let w = qhat.rule.weights();
    let m = qhat.len();
    if rhs.len() != m || to_origin.len() != m {
        return config("Fredholm right-hand side does not match the kernel size");
    }
    let weighted = qhat.weighted();
    let mut system = weighted.transpose();
    for i in 0..m {
        system[(i, i)] += Complex64::new(1.0, 0.0);
    }
    let lu = crate::numerics::Lu::factor_unchecked(&system);
    let plain = lu.det();
    let regularised = plain * (-weighted.trace()).exp();
    let det = Determinants { plain, regularised };
    if !(plain.norm() >= CHART_THRESHOLD) || lu.check_pivots(system.norm_inf()).is_err() {
        return Err(Error::ChartBreakdown { at: x, det: plain.norm() });
    }
    let g = lu.solve_vec(rhs);
    let mut observed = p_origin;
    for j in 0..m {
        observed -= g[j] * to_origin[j] * w[j];
    }
    Ok(FredholmRow { x, g, observed, det })
}

/// Discrete residual of a solved row on the quadrature nodes.
pub fn fredholm_residual(
    row: &FredholmRow,
    p_trace: &AdditiveKernelTrace,
    qhat: &dyn Fn(f64, f64) -> Complex64,
    rule: &QuadratureRule<f64>,
) -> Result<f64> {
    let nodes = rule.nodes();
    let w = rule.weights();
    let mut worst = 0.0f64;
    for (i, &z) in nodes.iter().enumerate() {
        let mut lhs = row.g[i];
        for (j, &xi) in nodes.iter().enumerate() {
            lhs += row.g[j] * qhat(xi, z) * w[j];
        }
        worst = worst.max((lhs - p_trace.eval(z + row.x)?).norm());
    }
    Ok(worst)
}

/// Full two-variable solve `g(y_i, z_j)` of `p(y + z + x) = g(y, z) + ∫ g(y, ξ) q̂(ξ, z) dξ`.
pub fn solve_additive_fredholm_full(
    p_trace: &AdditiveKernelTrace,
    qhat: &dyn Fn(f64, f64) -> Complex64,
    rule: &QuadratureRule<f64>,
    x: f64,
) -> Result<Matrix<Complex64>> {
    let nodes = rule.nodes();
    let w = rule.weights();
    let m = nodes.len();
    let mut rhs = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            rhs[(i, j)] = p_trace.eval(nodes[i] + nodes[j] + x)?;
        }
    }
    // G (I + W Q̂) = P  <=>  (I + W Q̂)ᵀ Gᵀ = Pᵀ
    let mut op = Matrix::from_fn(m, m, |k, j| qhat(nodes[k], nodes[j]) * w[k]);
    let det = det_reg_matrix(&op).plain;
    for i in 0..m {
        op[(i, i)] += Complex64::new(1.0, 0.0);
    }
    if !(det.norm() >= CHART_THRESHOLD) {
        return Err(Error::ChartBreakdown { at: x, det: det.norm() });
    }
    let gt = op
        .transpose()
        .solve(&rhs.transpose())
        .map_err(|_| Error::ChartBreakdown { at: x, det: det.norm() })?;
    Ok(gt.transpose())
}

fn origin_index(rule: &QuadratureRule<f64>) -> Result<usize> {
    match rule.nodes().iter().position(|v| v.abs() < 1e-12) {
        Some(i) => Ok(i),
        None => config("product rule check needs the origin among the quadrature nodes"),
    }
}

/// Discrepancy `|⟨F ∂ₓ(R R′) F′⟩ − ⟨F R⟩⟨R′ F′⟩|` with a central difference of step `dx`.
pub fn product_rule_check(
    f: &KernelMatrix,
    r: &AdditiveKernelTrace,
    r_prime: &AdditiveKernelTrace,
    f_prime: &KernelMatrix,
    x: f64,
    dx: f64,
) -> Result<f64> {
    if f.rule != f_prime.rule {
        return config("F and F′ must share a quadrature rule");
    }
    let rule = &f.rule;
    let nodes = rule.nodes();
    let w = rule.weights();
    let o = origin_index(rule)?;
    let m = nodes.len();
    let left: Vec<Complex64> = (0..m).map(|i| f.entries[(o, i)] * w[i]).collect();
    let right: Vec<Complex64> = (0..m).map(|k| w[k] * f_prime.entries[(k, o)]).collect();
    let chain = |xx: f64| -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let mut a = Complex64::new(0.0, 0.0);
            let mut b = Complex64::new(0.0, 0.0);
            for i in 0..m {
                a += left[i] * r.eval(nodes[i] + nodes[j] + xx)?;
                b += r_prime.eval(nodes[j] + nodes[i] + xx)? * right[i];
            }
            total += a * w[j] * b;
        }
        Ok(total)
    };
    let lhs = (chain(x + dx)? - chain(x - dx)?) / (2.0 * dx);
    let mut fr = Complex64::new(0.0, 0.0);
    let mut rf = Complex64::new(0.0, 0.0);
    for i in 0..m {
        fr += left[i] * r.eval(nodes[i] + x)?;
        rf += r_prime.eval(nodes[i] + x)? * right[i];
    }
    Ok((lhs - fr * rf).norm())
}
