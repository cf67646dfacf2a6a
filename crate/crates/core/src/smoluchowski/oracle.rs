use super::{convolve, MassDensity, Moments, SmolCoefficients};
use crate::error::{config, Error, Result};
use crate::numerics::{panel_weight, Grid1D, QuadratureScheme};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoagulationKernel {
    Constant,
    /// `K(y, x − y) = exp(−2α y (x − y))`
    Exponential { alpha: f64 },
}

#[derive(Debug, Clone, Copy)]
pub enum OracleModel<'a> {
    /// `∂ₜg = ½∫K g g − [loss] g ∫K g`
    Coagulation { kernel: CoagulationKernel, gain_only: bool },
    /// The general equation with `deg d = 0`.
    General(&'a SmolCoefficients),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    pub density: MassDensity,
    pub track: Vec<Moments>,
}

struct Rhs<'a> {
    model: OracleModel<'a>,
    scheme: QuadratureScheme,
    h: f64,
    grid: Grid1D<f64>,
    /// `K(x_j, x_{i-j})` for `j <= i`, row-major by `i`.
    gain_kernel: Option<Vec<Vec<f64>>>,
}

impl Rhs<'_> {
    fn eval(&self, t: f64, g: &[f64]) -> Vec<f64> {
        let n = g.len();
        let h = self.h;
        match self.model {
            OracleModel::Coagulation { gain_only, .. } => {
                let gain: Vec<f64> = match &self.gain_kernel {
                    None => convolve(g, g, h, self.scheme).into_iter().map(|v| 0.5 * v).collect(),
                    Some(k) => (0..n)
                        .map(|i| {
                            0.5 * (0..=i).map(|j| panel_weight(self.scheme, i, j, h) * k[i][j] * g[j] * g[i - j]).sum::<f64>()
                        })
                        .collect(),
                };
                if gain_only {
                    return gain;
                }
                let m0: f64 = (0..n).map(|k| panel_weight(self.scheme, n - 1, k, h) * g[k]).sum();
                gain.iter().zip(g).map(|(a, gi)| a - gi * m0).collect()
            }
            OracleModel::General(co) => {
                let d = MassDensity { grid: self.grid, values: g.to_vec(), t };
                super::general::general_smol_rhs(co, &d, self.scheme)
            }
        }
    }
}

/// Classical RK4 on the discretised gain/loss integrals.
pub fn direct_smol_oracle(
    g0: &MassDensity,
    model: OracleModel<'_>,
    t: f64,
    dt: f64,
    scheme: QuadratureScheme,
) -> Result<OracleRun> {
    if !(dt > 0.0) || !(t >= 0.0) {
        return config("direct oracle needs dt > 0 and t >= 0");
    }
    if let OracleModel::General(co) = model {
        co.validate()?;
        if co.d1() != 0.0 {
            return config("direct oracle supports deg d = 0 only");
        }
    }
    let nodes = g0.grid.nodes();
    let gain_kernel = match model {
        OracleModel::Coagulation { kernel: CoagulationKernel::Exponential { alpha }, .. } => Some(
            (0..nodes.len())
                .map(|i| (0..=i).map(|j| (-2.0 * alpha * nodes[j] * nodes[i - j]).exp()).collect())
                .collect(),
        ),
        _ => None,
    };
    let rhs = Rhs { model, scheme, h: g0.spacing(), grid: g0.grid, gain_kernel };
    let steps = (t / dt).round().max(if t > 0.0 { 1.0 } else { 0.0 }) as usize;
    let step = if steps > 0 { t / steps as f64 } else { 0.0 };
    let mut g = g0.values.clone();
    let mut track = vec![g0.moments(scheme)];
    let axpy = |y: &[f64], a: f64, k: &[f64]| -> Vec<f64> { y.iter().zip(k).map(|(y, k)| y + a * k).collect() };
    for m in 0..steps {
        let tm = g0.t + m as f64 * step;
        let k1 = rhs.eval(tm, &g);
        let k2 = rhs.eval(tm + 0.5 * step, &axpy(&g, 0.5 * step, &k1));
        let k3 = rhs.eval(tm + 0.5 * step, &axpy(&g, 0.5 * step, &k2));
        let k4 = rhs.eval(tm + step, &axpy(&g, step, &k3));
        for i in 0..g.len() {
            g[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::IntegrationBlowup { t: tm + step });
        }
        let d = MassDensity { grid: g0.grid, values: g.clone(), t: tm + step };
        track.push(d.moments(scheme));
    }
    let density = MassDensity::new(g0.grid, g, g0.t + t)?;
    Ok(OracleRun { density, track })
}
