use super::{convolve, volterra_project, MassDensity};
use crate::error::{config, Error, Result};
use crate::numerics::QuadratureScheme;

/// Largest exponent accepted before `exp` is treated as overflow.
const EXP_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PreLaplaceSolution {
    /// Initial density forced by `q̂₀` through the Volterra relation.
    pub g0: MassDensity,
    pub g: MassDensity,
    pub qhat: Vec<f64>,
}

/// Base flow `∂ₜq = νx²q`, `p = 2νx q`, then `p = g ⊛ q` with `q = δ + q̂`.
pub fn pre_laplace_burgers_solve(
    qhat0: &MassDensity,
    nu: f64,
    t: f64,
    scheme: QuadratureScheme,
) -> Result<PreLaplaceSolution> {
    if !(nu > 0.0) {
        return config("pre-Laplace Burgers needs nu > 0");
    }
    let x_max = qhat0.grid.upper();
    if nu * x_max * x_max * t.max(0.0) > EXP_LIMIT {
        return Err(Error::Domain(format!("exp(nu X^2 t) overflows for nu = {nu}, X = {x_max}, t = {t}")));
    }
    let h = qhat0.spacing();
    let nodes = qhat0.grid.nodes();
    let project = |tau: f64| -> Result<(Vec<f64>, Vec<f64>)> {
        let qhat: Vec<f64> = nodes.iter().zip(&qhat0.values).map(|(x, q)| q * (nu * x * x * tau).exp()).collect();
        let p: Vec<f64> = nodes.iter().zip(&qhat).map(|(x, q)| 2.0 * nu * x * q).collect();
        Ok((volterra_project(&p, &qhat, h, scheme)?, qhat))
    };
    let (g0_vals, _) = project(0.0)?;
    let (g_vals, qhat) = project(t)?;
    Ok(PreLaplaceSolution {
        g0: MassDensity::new(qhat0.grid, g0_vals, qhat0.t)?,
        g: MassDensity::new(qhat0.grid, g_vals, qhat0.t + t)?,
        qhat,
    })
}

/// `max |∂ₜg − νx²g − ½x (g⊛g)|` from three snapshots `dt` apart.
pub fn prelaplace_residual(
    prev: &MassDensity,
    cur: &MassDensity,
    next: &MassDensity,
    dt: f64,
    nu: f64,
    scheme: QuadratureScheme,
) -> f64 {
    let h = cur.spacing();
    let gg = convolve(&cur.values, &cur.values, h, scheme);
    cur.grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let gt = (next.values[i] - prev.values[i]) / (2.0 * dt);
            (gt - nu * x * x * cur.values[i] - 0.5 * x * gg[i]).abs()
        })
        .fold(0.0, f64::max)
}

fn weight_exponents(g: &MassDensity, alpha: f64) -> Result<Vec<f64>> {
    let e: Vec<f64> = g.grid.nodes().iter().map(|x| alpha * x * x).collect();
    if e.iter().any(|v| v.abs() > EXP_LIMIT) {
        return Err(Error::Domain(format!("exp(alpha x^2) overflows on the grid for alpha = {alpha}")));
    }
    Ok(e)
}

/// `g̃ = g / H` with `H(x) = exp(αx²)`.
pub fn exp_kernel_rescale(g: &MassDensity, alpha: f64) -> Result<MassDensity> {
    let e = weight_exponents(g, alpha)?;
    let values = g.values.iter().zip(e).map(|(v, e)| v * (-e).exp()).collect();
    MassDensity::new(g.grid, values, g.t)
}

/// `g = H g̃`, the inverse of [`exp_kernel_rescale`].
pub fn exp_kernel_unscale(g: &MassDensity, alpha: f64) -> Result<MassDensity> {
    let e = weight_exponents(g, alpha)?;
    let values = g.values.iter().zip(e).map(|(v, e)| v * e.exp()).collect();
    MassDensity::new(g.grid, values, g.t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Grid1D;

    #[test]
    fn zero_data() {
        let grid = Grid1D::closed(0.0, 4.0, 65).unwrap();
        let q0 = MassDensity::from_fn(grid, |_| 0.0).unwrap();
        let s = pre_laplace_burgers_solve(&q0, 0.5, 1.0, QuadratureScheme::Gregory).unwrap();
        assert!(s.g.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rescale_round_trip() {
        let grid = Grid1D::closed(0.0, 4.0, 65).unwrap();
        let g = MassDensity::from_fn(grid, |x| (-x).exp() * (1.0 + x)).unwrap();
        assert_eq!(exp_kernel_rescale(&g, 0.0).unwrap(), g);
        let back = exp_kernel_unscale(&exp_kernel_rescale(&g, 0.3).unwrap(), 0.3).unwrap();
        for (a, b) in back.values.iter().zip(&g.values) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
        assert!(matches!(exp_kernel_rescale(&g, 100.0), Err(Error::Domain(_))));
    }
}
