//! Graph flows: inviscid Burgers and its generalisations by characteristic
//! inversion, the linear Riccati subflow, and the alternate chart.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{config, Error, Result};
use crate::numerics::{rk4_integrate, Matrix, QuadratureScheme};
use crate::smoluchowski::MassDensity;

/// Determinant level at which characteristics are declared to have crossed.
pub const SHOCK_THRESHOLD: f64 = 1e-8;
pub const NEWTON_TOL: f64 = 1e-12;
pub const MAX_NEWTON: usize = 50;

pub type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&[f64]) -> Matrix<f64> + Send + Sync>;
pub type MatrixPath = Arc<dyn Fn(f64) -> Matrix<f64> + Send + Sync>;

/// Initial momentum field `π₀: ℝⁿ → ℝⁿ` with an optional analytic Jacobian.
#[derive(Clone)]
pub struct InitialProfile {
    dim: usize,
    eval: VectorFn,
    jacobian: Option<JacobianFn>,
}

impl fmt::Debug for InitialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialProfile").field("dim", &self.dim).field("analytic_jacobian", &self.jacobian.is_some()).finish()
    }
}

impl InitialProfile {
    pub fn new(dim: usize, eval: VectorFn) -> Self {
        Self { dim, eval, jacobian: None }
    }

    pub fn with_jacobian(mut self, jacobian: JacobianFn) -> Self {
        self.jacobian = Some(jacobian);
        self
    }

    /// Scalar profile with derivative.
    pub fn scalar(f: impl Fn(f64) -> f64 + Send + Sync + 'static, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(1, Arc::new(move |a: &[f64]| vec![f(a[0])]))
            .with_jacobian(Arc::new(move |a: &[f64]| Matrix::from_rows(&[vec![df(a[0])]])))
    }

    pub fn constant(c: Vec<f64>) -> Self {
        let n = c.len();
        Self::new(n, Arc::new(move |_: &[f64]| c.clone())).with_jacobian(Arc::new(move |_: &[f64]| Matrix::zeros(n, n)))
    }

    /// `π₀(a) = M a`.
    pub fn linear(m: Matrix<f64>) -> Self {
        let n = m.rows();
        let mm = m.clone();
        Self::new(n, Arc::new(move |a: &[f64]| mm.matvec(a))).with_jacobian(Arc::new(move |_: &[f64]| m.clone()))
    }

    pub fn sine() -> Self {
        Self::scalar(f64::sin, f64::cos)
    }

    pub fn neg_tanh() -> Self {
        Self::scalar(|a| -a.tanh(), |a| -1.0 / a.cosh().powi(2))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, a: &[f64]) -> Vec<f64> {
        (self.eval)(a)
    }

    /// Analytic Jacobian, or central differences with step `1e-6·max(1, |a_j|)`.
    pub fn jacobian(&self, a: &[f64]) -> Matrix<f64> {
        if let Some(j) = &self.jacobian {
            return j(a);
        }
        let n = self.dim;
        let mut jac = Matrix::zeros(n, n);
        for j in 0..n {
            let step = 1e-6 * a[j].abs().max(1.0);
            let mut up = a.to_vec();
            let mut down = a.to_vec();
            up[j] += step;
            down[j] -= step;
            let fu = self.eval(&up);
            let fd = self.eval(&down);
            for i in 0..n {
                jac[(i, j)] = (fu[i] - fd[i]) / (2.0 * step);
            }
        }
        jac
    }
}

/// Speed modifier `f(|p|²)` with optional derivative.
#[derive(Clone)]
pub struct Modifier {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub df: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl fmt::Debug for Modifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Modifier").field("analytic_derivative", &self.df.is_some()).finish()
    }
}

impl Modifier {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), df: None }
    }

    pub fn with_derivative(mut self, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.df = Some(Arc::new(df));
        self
    }

    fn derivative(&self, u: f64) -> f64 {
        match &self.df {
            Some(df) => df(u),
            None => {
                let step = 1e-6 * u.abs().max(1.0);
                ((self.f)(u + step) - (self.f)(u - step)) / (2.0 * step)
            }
        }
    }
}

/// Characteristic record `(a, q(a,t), p(a,t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMapSample {
    pub a: Vec<f64>,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub t: f64,
}

/// Label-to-position map of a graph flow at fixed time.
pub trait FlowMap: Sync {
    fn dim(&self) -> usize;
    fn position(&self, a: &[f64]) -> Vec<f64>;
    fn jacobian(&self, a: &[f64]) -> Matrix<f64>;
    fn momentum(&self, a: &[f64]) -> Vec<f64>;
    /// Starting label for Newton.
    fn guess(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
}

/// `q(a,t) = a + t f(|π₀(a)|²) π₀(a)`, `p = π₀(a)`.
pub struct BurgersMap<'a> {
    pub profile: &'a InitialProfile,
    pub t: f64,
    pub modifier: Option<&'a Modifier>,
}

impl BurgersMap<'_> {
    fn velocity(&self, a: &[f64]) -> Vec<f64> {
        let p = self.profile.eval(a);
        match self.modifier {
            None => p,
            Some(m) => {
                let u: f64 = p.iter().map(|v| v * v).sum();
                let s = (m.f)(u);
                p.iter().map(|v| s * v).collect()
            }
        }
    }
}

impl FlowMap for BurgersMap<'_> {
    fn dim(&self) -> usize {
        self.profile.dim()
    }

    fn position(&self, a: &[f64]) -> Vec<f64> {
        a.iter().zip(self.velocity(a)).map(|(a, v)| a + self.t * v).collect()
    }

    fn jacobian(&self, a: &[f64]) -> Matrix<f64> {
        let n = self.dim();
        let grad = self.profile.jacobian(a);
        let vel_grad = match self.modifier {
            None => grad,
            Some(m) => {
                let p = self.profile.eval(a);
                let u: f64 = p.iter().map(|v| v * v).sum();
                let s = (m.f)(u);
                let ds = m.derivative(u);
                // ∇(f(|π|²)π) = f ∇π + 2 f′ π (πᵀ∇π)
                let pt_grad: Vec<f64> = (0..n).map(|j| (0..n).map(|k| p[k] * grad[(k, j)]).sum()).collect();
                Matrix::from_fn(n, n, |i, j| s * grad[(i, j)] + 2.0 * ds * p[i] * pt_grad[j])
            }
        };
        Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + self.t * vel_grad[(i, j)])
    }

    fn momentum(&self, a: &[f64]) -> Vec<f64> {
        self.profile.eval(a)
    }

    fn guess(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(self.velocity(x)).map(|(x, v)| x - self.t * v).collect()
    }
}

/// Linear base flow `q̇ = Aq + Bp`, `ṗ = Cq + Dp` through its fundamental matrix.
pub struct LinearFlowMap<'a> {
    pub profile: &'a InitialProfile,
    /// `Φ(t)`, blocks `[[Φqq, Φqp], [Φpq, Φpp]]`.
    pub phi: Matrix<f64>,
}

impl LinearFlowMap<'_> {
    fn blocks(&self) -> (Matrix<f64>, Matrix<f64>, Matrix<f64>, Matrix<f64>) {
        let n = self.profile.dim();
        (self.phi.block(0, 0, n, n), self.phi.block(0, n, n, n), self.phi.block(n, 0, n, n), self.phi.block(n, n, n, n))
    }
}

impl FlowMap for LinearFlowMap<'_> {
    fn dim(&self) -> usize {
        self.profile.dim()
    }

    fn position(&self, a: &[f64]) -> Vec<f64> {
        let (qq, qp, _, _) = self.blocks();
        let p = self.profile.eval(a);
        qq.matvec(a).iter().zip(qp.matvec(&p)).map(|(x, y)| x + y).collect()
    }

    fn jacobian(&self, a: &[f64]) -> Matrix<f64> {
        let (qq, qp, _, _) = self.blocks();
        &qq + &(&qp * &self.profile.jacobian(a))
    }

    fn momentum(&self, a: &[f64]) -> Vec<f64> {
        let (_, _, pq, pp) = self.blocks();
        let p = self.profile.eval(a);
        pq.matvec(a).iter().zip(pp.matvec(&p)).map(|(x, y)| x + y).collect()
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn residual(map: &dyn FlowMap, a: &[f64], x: &[f64]) -> Vec<f64> {
    map.position(a).iter().zip(x).map(|(q, x)| q - x).collect()
}

/// Label `a` with `q(a, t) = x`, by damped Newton with a scalar bisection fallback.
pub fn invert_flow_map(map: &dyn FlowMap, x: &[f64]) -> Result<Vec<f64>> {
    let tol = NEWTON_TOL * sup(x).max(1.0);
    let mut a = map.guess(x);
    let mut f = residual(map, &a, x);
    let mut norm = sup(&f);
    for _ in 0..MAX_NEWTON {
        let jac = map.jacobian(&a);
        let det = jac.det();
        if !(det > SHOCK_THRESHOLD) {
            return Err(Error::ShockProximity { x: x[0], det });
        }
        if norm <= tol {
            return Ok(a);
        }
        let delta = match jac.lu() {
            Ok(lu) => lu.solve_vec(&f),
            Err(_) => return Err(Error::ShockProximity { x: x[0], det }),
        };
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = a.iter().zip(&delta).map(|(a, d)| a - lambda * d).collect();
            let ft = residual(map, &trial, x);
            let nt = sup(&ft);
            if nt < norm || lambda < 1e-6 {
                a = trial;
                f = ft;
                norm = nt;
                break;
            }
            lambda *= 0.5;
        }
    }
    if norm <= tol {
        let det = map.jacobian(&a).det();
        if !(det > SHOCK_THRESHOLD) {
            return Err(Error::ShockProximity { x: x[0], det });
        }
        return Ok(a);
    }
    if map.dim() == 1 {
        return bisect(map, x[0], a[0], tol);
    }
    Err(Error::NewtonDivergence { iterations: MAX_NEWTON, residual: norm })
}

fn bisect(map: &dyn FlowMap, x: f64, start: f64, tol: f64) -> Result<Vec<f64>> {
    let f = |a: f64| map.position(&[a])[0] - x;
    let mut width = 1.0;
    let mut bracket = None;
    for _ in 0..60 {
        let (lo, hi) = (start - width, start + width);
        if f(lo) <= 0.0 && f(hi) >= 0.0 {
            bracket = Some((lo, hi));
            break;
        }
        width *= 2.0;
    }
    let Some((mut lo, mut hi)) = bracket else {
        return Err(Error::NewtonDivergence { iterations: MAX_NEWTON, residual: f(start).abs() });
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= tol || hi - lo < 1e-15 * mid.abs().max(1.0) {
            lo = mid;
            break;
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let det = map.jacobian(&[lo]).det();
    if !(det > SHOCK_THRESHOLD) {
        return Err(Error::ShockProximity { x, det });
    }
    Ok(vec![lo])
}

/// Solve `a + t π̃(a) = x` with `π̃ = π₀` or `f(|π₀|²)π₀`.
pub fn invert_characteristic(x: &[f64], t: f64, profile: &InitialProfile, modifier: Option<&Modifier>) -> Result<Vec<f64>> {
    if x.len() != profile.dim() {
        return config(format!("point has dimension {}, profile {}", x.len(), profile.dim()));
    }
    invert_flow_map(&BurgersMap { profile, t, modifier }, x)
}

/// Scalar field on a grid; nodes where inversion failed hold NaN and are flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    pub t: f64,
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    /// `(node index, determinant)` of flagged nodes.
    pub flagged: Vec<(usize, f64)>,
}

fn eval_field(xs: &[f64], t: f64, map: &dyn FlowMap) -> Result<FlowField> {
    let results: Vec<Result<Vec<f64>>> = xs.par_iter().map(|&x| invert_flow_map(map, &[x])).collect();
    let mut values = Vec::with_capacity(xs.len());
    let mut flagged = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(a) => values.push(map.momentum(&a)[0]),
            Err(Error::ShockProximity { det, .. }) => {
                flagged.push((i, det));
                values.push(f64::NAN);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(FlowField { t, x: xs.to_vec(), values, flagged })
}

/// `π(x, t) = π₀((id + tπ₀)⁻¹(x))` on a one-dimensional grid.
pub fn inviscid_burgers_eval(xs: &[f64], t: f64, profile: &InitialProfile) -> Result<FlowField> {
    if profile.dim() != 1 {
        return config("grid evaluation needs a scalar profile");
    }
    eval_field(xs, t, &BurgersMap { profile, t, modifier: None })
}

/// Characteristic samples at arbitrary points in ℝⁿ.
pub fn burgers_eval_points(
    points: &[Vec<f64>],
    t: f64,
    profile: &InitialProfile,
    modifier: Option<&Modifier>,
) -> Vec<Result<FlowMapSample>> {
    let map = BurgersMap { profile, t, modifier };
    points
        .par_iter()
        .map(|x| {
            let a = invert_flow_map(&map, x)?;
            Ok(FlowMapSample { q: map.position(&a), p: map.momentum(&a), a, t })
        })
        .collect()
}

/// Coefficients of a generalised graph flow.
#[derive(Clone)]
pub enum GeneralizedCoefficients {
    Linear { a: MatrixPath, b: MatrixPath, c: MatrixPath, d: MatrixPath, steps: usize },
    Modifier(Modifier),
}

impl fmt::Debug for GeneralizedCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneralizedCoefficients::Linear { steps, .. } => write!(f, "Linear {{ steps: {steps} }}"),
            GeneralizedCoefficients::Modifier(m) => write!(f, "{m:?}"),
        }
    }
}

impl GeneralizedCoefficients {
    pub fn constant(a: Matrix<f64>, b: Matrix<f64>, c: Matrix<f64>, d: Matrix<f64>) -> Self {
        let path = |m: Matrix<f64>| -> MatrixPath { Arc::new(move |_| m.clone()) };
        Self::Linear { a: path(a), b: path(b), c: path(c), d: path(d), steps: 256 }
    }
}

/// Fundamental matrix of `[[A, B], [C, D]](τ)` over `[0, t]`.
pub fn fundamental_matrix(a: &MatrixPath, b: &MatrixPath, c: &MatrixPath, d: &MatrixPath, n: usize, t: f64, steps: usize) -> Matrix<f64> {
    let generator = |tau: f64| {
        let mut g = Matrix::zeros(2 * n, 2 * n);
        g.set_block(0, 0, &a(tau));
        g.set_block(0, n, &b(tau));
        g.set_block(n, 0, &c(tau));
        g.set_block(n, n, &d(tau));
        g
    };
    rk4_integrate(|tau, phi: &Matrix<f64>| &generator(tau) * phi, 0.0, t, Matrix::identity(2 * n), steps.max(1))
}

/// `π(·, t)` for `q̇ = Aq + Bp, ṗ = Cq + Dp` or the modified Burgers flow.
pub fn generalized_flow_eval(
    xs: &[f64],
    t: f64,
    profile: &InitialProfile,
    coeffs: &GeneralizedCoefficients,
) -> Result<FlowField> {
    if profile.dim() != 1 {
        return config("grid evaluation needs a scalar profile");
    }
    match coeffs {
        GeneralizedCoefficients::Modifier(m) => eval_field(xs, t, &BurgersMap { profile, t, modifier: Some(m) }),
        GeneralizedCoefficients::Linear { a, b, c, d, steps } => {
            let phi = fundamental_matrix(a, b, c, d, 1, t, *steps);
            eval_field(xs, t, &LinearFlowMap { profile, phi })
        }
    }
}

/// `π_R(t) = π_R(0)(I + tπ_R(0))⁻¹`.
pub fn riccati_subflow(pi0: &Matrix<f64>, t: f64) -> Result<Matrix<f64>> {
    if !pi0.is_square() {
        return config("Riccati subflow needs a square matrix");
    }
    let n = pi0.rows();
    let shifted = &Matrix::identity(n) + &pi0.scaled(t);
    let xt = shifted
        .transpose()
        .solve(&pi0.transpose())
        .map_err(|_| Error::BlowupAtTime { t, detail: "I + t π_R(0) is singular".into() })?;
    Ok(xt.transpose())
}

/// Alternate chart: `π′ₜ(y) = π′₀(y) + t y`.
pub fn chart_swap_eval(ys: &[f64], t: f64, inverse_profile: &InitialProfile) -> Vec<f64> {
    ys.iter().map(|&y| inverse_profile.eval(&[y])[0] + t * y).collect()
}

/// `π₀(s) = ∫(1 − e^{−sx}) g₀(x) dx`, the desingularised transform.
pub fn desingularised_profile(g0: &MassDensity, scheme: QuadratureScheme) -> InitialProfile {
    let g = g0.clone();
    let gd = g0.clone();
    InitialProfile::new(1, Arc::new(move |s: &[f64]| vec![g.integrate(scheme, |x| 1.0 - (-s[0] * x).exp())]))
        .with_jacobian(Arc::new(move |s: &[f64]| {
            Matrix::from_rows(&[vec![gd.integrate(scheme, |x| x * (-s[0] * x).exp())]])
        }))
}

/// `π₀(s) = ∫(1 − e^{−sx}) x g₀(x) dx`, the modified desingularised transform.
pub fn modified_desingularised_profile(g0: &MassDensity, scheme: QuadratureScheme) -> InitialProfile {
    let g = g0.clone();
    let gd = g0.clone();
    InitialProfile::new(1, Arc::new(move |s: &[f64]| vec![g.integrate(scheme, |x| x * (1.0 - (-s[0] * x).exp()))]))
        .with_jacobian(Arc::new(move |s: &[f64]| {
            Matrix::from_rows(&[vec![gd.integrate(scheme, |x| x * x * (-s[0] * x).exp())]])
        }))
}

/// `∂ₜπ + π∂ₛπ = −π` via `π = e^{−t} σ(s, 1 − e^{−t})` with `σ` inviscid Burgers.
pub fn burgers_with_decay_eval(ss: &[f64], t: f64, profile: &InitialProfile) -> Result<FlowField> {
    let tau = 1.0 - (-t).exp();
    let mut field = inviscid_burgers_eval(ss, tau, profile)?;
    let decay = (-t).exp();
    for v in field.values.iter_mut() {
        *v *= decay;
    }
    field.t = t;
    Ok(field)
}

/// `max |∂ₜπ + ∂ₓπ (a x + b π) − (c x + d π)|` over interior nodes for scalar constant coefficients.
pub fn flow_residual_1d(prev: &FlowField, cur: &FlowField, next: &FlowField, dt: f64, coeffs: [f64; 4]) -> f64 {
    let [a, b, c, d] = coeffs;
    let n = cur.x.len();
    let h = cur.x[1] - cur.x[0];
    (1..n - 1)
        .map(|i| {
            let pt = (next.values[i] - prev.values[i]) / (2.0 * dt);
            let px = (cur.values[i + 1] - cur.values[i - 1]) / (2.0 * h);
            let (x, p) = (cur.x[i], cur.values[i]);
            (pt + px * (a * x + b * p) - (c * x + d * p)).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_profile_shifts() {
        let p = InitialProfile::constant(vec![2.0]);
        let a = invert_characteristic(&[1.0], 0.5, &p, None).unwrap();
        assert!((a[0] - 0.0).abs() < 1e-14);
    }

    #[test]
    fn identity_profile() {
        let p = InitialProfile::linear(Matrix::identity(1));
        let f = inviscid_burgers_eval(&[-1.0, 0.0, 2.0], 1.0, &p).unwrap();
        for (x, v) in f.x.iter().zip(&f.values) {
            assert!((v - x / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn nilpotent_subflow() {
        let n = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert_eq!(riccati_subflow(&n, 3.0).unwrap(), n);
        let one = Matrix::from_rows(&[vec![1.0]]);
        assert_eq!(riccati_subflow(&one, 1.0).unwrap()[(0, 0)], 0.5);
        let neg = Matrix::from_rows(&[vec![-1.0]]);
        assert!(matches!(riccati_subflow(&neg, 1.0), Err(Error::BlowupAtTime { .. })));
    }

    #[test]
    fn chart_swap_of_zero() {
        let z = InitialProfile::constant(vec![0.0]);
        assert_eq!(chart_swap_eval(&[1.0, -2.0], 0.5, &z), vec![0.5, -1.0]);
    }

    #[test]
    fn cubic_modifier() {
        // q = a + t a³ with f(u) = u, π₀(a) = a
        let p = InitialProfile::linear(Matrix::identity(1));
        let m = Modifier::new(|u| u).with_derivative(|_| 1.0);
        let a = invert_characteristic(&[2.0], 1.0, &p, Some(&m)).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-12);
    }
}
