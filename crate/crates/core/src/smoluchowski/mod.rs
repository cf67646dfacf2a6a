//! Coagulation equations: constant-kernel closed forms, the general
//! Smoluchowski-type equation, pre-Laplace Burgers, and a direct oracle.

mod general;
mod oracle;
mod prelaplace;

pub use general::{general_smol_residual, general_smol_solve, GeneralSmolOptions, GeneralSmolSolution, SmolCoefficients};
pub use oracle::{direct_smol_oracle, CoagulationKernel, OracleModel, OracleRun};
pub use prelaplace::{exp_kernel_rescale, exp_kernel_unscale, pre_laplace_burgers_solve, prelaplace_residual, PreLaplaceSolution};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{config, Error, Result};
use crate::numerics::{panel_weight, Grid1D, GridKind, QuadratureScheme};

/// Cluster density on a closed mass grid `[0, X]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MassDensity {
    pub grid: Grid1D<f64>,
    pub values: Vec<f64>,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub t: f64,
    pub m0: f64,
    pub m1: f64,
    /// Fraction of `m1` carried by the last tenth of the mass grid.
    pub tail: f64,
}

impl MassDensity {
    pub fn new(grid: Grid1D<f64>, values: Vec<f64>, t: f64) -> Result<Self> {
        if grid.kind() != GridKind::Closed || grid.lower() != 0.0 {
            return config("mass grid must be a closed grid starting at 0");
        }
        if values.len() != grid.len() {
            return config(format!("{} density values for {} nodes", values.len(), grid.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return config("density values must be finite");
        }
        Ok(Self { grid, values, t })
    }

    pub fn from_fn(grid: Grid1D<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, values, 0.0)
    }

    pub fn spacing(&self) -> f64 {
        self.grid.spacing()
    }

    pub fn integrate(&self, scheme: QuadratureScheme, weight: impl Fn(f64) -> f64) -> f64 {
        let n = self.values.len() - 1;
        let h = self.spacing();
        (0..=n).map(|j| panel_weight(scheme, n, j, h) * weight(self.grid.node(j)) * self.values[j]).sum()
    }

    pub fn m0(&self, scheme: QuadratureScheme) -> f64 {
        self.integrate(scheme, |_| 1.0)
    }

    pub fn m1(&self, scheme: QuadratureScheme) -> f64 {
        self.integrate(scheme, |x| x)
    }

    pub fn moments(&self, scheme: QuadratureScheme) -> Moments {
        let m1 = self.m1(scheme);
        let cut = 0.9 * self.grid.upper();
        let tail = self.integrate(scheme, |x| if x >= cut { x } else { 0.0 });
        Moments { t: self.t, m0: self.m0(scheme), m1, tail: if m1 != 0.0 { tail / m1 } else { 0.0 } }
    }

    /// `∫ e^{-sx} g(x) dx` over the truncated grid.
    pub fn laplace(&self, s: f64, scheme: QuadratureScheme) -> f64 {
        self.integrate(scheme, |x| (-s * x).exp())
    }
}

/// Transform samples on an `s` grid with `s_min > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceField {
    pub grid: Grid1D<f64>,
    pub values: Vec<Complex64>,
}

impl LaplaceField {
    pub fn check_grid(grid: &Grid1D<f64>) -> Result<()> {
        if grid.kind() != GridKind::Closed || !(grid.lower() > 0.0) {
            return config("Laplace grid must be closed with s_min > 0");
        }
        Ok(())
    }

    pub fn default_grid() -> Grid1D<f64> {
        Grid1D::closed(0.05, 5.0, 64).expect("valid default grid")
    }
}

/// `m₀(t) = m₀(0) / (1 + t m₀(0)/2)`.
pub fn m0_constant_kernel(m00: f64, t: f64) -> Result<f64> {
    if !(m00 >= 0.0) {
        return Err(Error::Domain(format!("m0(0) must be non-negative (got {m00})")));
    }
    let den = 1.0 + t * m00 / 2.0;
    if !(den > 0.0) {
        return Err(Error::Domain(format!("1 + t m0/2 = {den} is not positive")));
    }
    Ok(m00 / den)
}

/// `(f ⊛ g)(x_i) = ∫_0^{x_i} f(x_i - y) g(y) dy` on a uniform grid.
pub fn convolve(f: &[f64], g: &[f64], h: f64, scheme: QuadratureScheme) -> Vec<f64> {
    assert_eq!(f.len(), g.len());
    let row = |i: usize| -> f64 {
        if i < 8 {
            return (0..=i).map(|j| panel_weight(scheme, i, j, h) * f[i - j] * g[j]).sum();
        }
        // interior weight is h for every scheme; end nodes carry corrections
        let interior: f64 = (3..=i - 3).map(|j| f[i - j] * g[j]).sum();
        let ends: f64 = [0, 1, 2, i - 2, i - 1, i]
            .iter()
            .map(|&j| panel_weight(scheme, i, j, h) * f[i - j] * g[j])
            .sum();
        h * interior + ends
    };
    if f.len() >= 256 {
        (0..f.len()).into_par_iter().map(row).collect()
    } else {
        (0..f.len()).map(row).collect()
    }
}

/// `p = g + g ⊛ q̂`, the forward map of the Volterra relation `p = g ⊛ (δ + q̂)`.
pub fn volterra_assemble(g: &[f64], qhat: &[f64], h: f64, scheme: QuadratureScheme) -> Vec<f64> {
    let conv = convolve(qhat, g, h, scheme);
    g.iter().zip(conv).map(|(a, b)| a + b).collect()
}

/// Forward substitution for `g` in `p = g + g ⊛ q̂`.
pub fn volterra_project(p: &[f64], qhat: &[f64], h: f64, scheme: QuadratureScheme) -> Result<Vec<f64>> {
    if p.len() != qhat.len() {
        return config("p and q̂ must share the mass grid");
    }
    let n = p.len();
    let mut g = vec![0.0; n];
    for i in 0..n {
        let mut acc = p[i];
        for j in 0..i {
            acc -= panel_weight(scheme, i, j, h) * qhat[i - j] * g[j];
        }
        let diag = 1.0 + panel_weight(scheme, i, i, h) * qhat[0];
        if diag == 0.0 {
            return Err(Error::Domain(format!("Volterra diagonal vanishes at node {i}")));
        }
        g[i] = acc / diag;
    }
    Ok(g)
}

/// Constant-kernel solution in mass space at time `t`.
pub fn constant_kernel_solve(g0: &MassDensity, t: f64, scheme: QuadratureScheme) -> Result<MassDensity> {
    let mu = g0.m0(scheme);
    let den = 1.0 + t * mu / 2.0;
    if !(den > 0.0) {
        return Err(Error::BlowupAtTime { t, detail: format!("1 + t m0/2 = {den}") });
    }
    let s_grid = LaplaceField::default_grid();
    for s in s_grid.nodes() {
        let q = 1.0 - 0.5 * g0.laplace(s, scheme) * t / den;
        if !(q > 1e-12) {
            return Err(Error::BlowupAtTime { t, detail: format!("Laplace q vanishes at s = {s}") });
        }
    }
    let p: Vec<f64> = g0.values.iter().map(|g| g / (den * den)).collect();
    let qhat: Vec<f64> = g0.values.iter().map(|g| -0.5 * g * t / den).collect();
    let values = volterra_project(&p, &qhat, g0.spacing(), scheme)?;
    MassDensity::new(g0.grid, values, g0.t + t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m0_law() {
        assert_eq!(m0_constant_kernel(3.0, 0.0).unwrap(), 3.0);
        assert_eq!(m0_constant_kernel(2.0, 1.0).unwrap(), 1.0);
        assert_eq!(m0_constant_kernel(1.0, 2.0).unwrap(), 0.5);
        assert!(matches!(m0_constant_kernel(1.0, -3.0), Err(Error::Domain(_))));
    }

    #[test]
    fn hand_substitution() {
        let g = volterra_project(&[1.0, 1.0, 1.0], &[0.0, 1.0, 1.0], 1.0, QuadratureScheme::RiemannLeft).unwrap();
        assert_eq!(g, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_kernel_is_identity() {
        let p = [0.3, -1.0, 2.5, 4.0];
        let g = volterra_project(&p, &[0.0; 4], 0.1, QuadratureScheme::Gregory).unwrap();
        assert_eq!(g, p.to_vec());
    }

    #[test]
    fn t_zero_returns_initial() {
        let grid = Grid1D::closed(0.0, 10.0, 65).unwrap();
        let g0 = MassDensity::from_fn(grid, |x| (-x).exp()).unwrap();
        let g = constant_kernel_solve(&g0, 0.0, QuadratureScheme::Gregory).unwrap();
        assert_eq!(g.values, g0.values);
    }
}
