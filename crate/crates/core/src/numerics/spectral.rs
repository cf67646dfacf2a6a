//! Discrete Fourier transform on periodic grids.
//!
//! Convention: `modes(k) = h * Σ_j f(x_j) e^{-2πik x_j}` and
//! `f(x_j) = (1/L) Σ_k modes(k) e^{2πik x_j}` with `k = m/L`, modes ordered
//! `m = 0, 1, …, n/2-1, -n/2, …, -1`. Differentiation is multiplication by
//! `2πik`, a constant `c` lands in mode 0 as `c·L`, and
//! `Σ|f|² h = Σ|modes|² / L`.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{config, Result};
use crate::numerics::grid::{Grid1D, GridKind};
use crate::numerics::scalar::Real;

pub fn check_power_of_two(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return config(format!("DFT length must be a power of two (got {n})"));
    }
    Ok(())
}

/// Signed wavenumbers `k = m/L` in transform order.
pub fn wavenumbers<T: Real>(grid: &Grid1D<T>) -> Vec<T> {
    let n = grid.len();
    let l = grid.length();
    (0..n)
        .map(|m| {
            let signed = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
            T::of(signed) / l
        })
        .collect()
}

/// Reusable forward/inverse transform pair for one periodic grid.
#[derive(Clone)]
pub struct SpectralPlan<T: Real> {
    grid: Grid1D<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    phase: Vec<Complex<T>>,
}

impl<T: Real> std::fmt::Debug for SpectralPlan<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan").field("grid", &self.grid).finish()
    }
}

impl<T: Real> SpectralPlan<T> {
    pub fn new(grid: &Grid1D<T>) -> Result<Self> {
        if grid.kind() != GridKind::Periodic {
            return config("DFT requires a periodic grid");
        }
        let n = grid.len();
        check_power_of_two(n)?;
        let mut planner = FftPlanner::new();
        let two_pi = T::PI() + T::PI();
        let phase = wavenumbers(grid)
            .into_iter()
            .map(|k| Complex::from_polar(T::one(), -two_pi * k * grid.lower()))
            .collect();
        Ok(Self {
            grid: *grid,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            phase,
        })
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn forward_in_place(&self, buf: &mut [Complex<T>]) {
        self.forward.process(buf);
        let h = self.grid.spacing();
        for (v, ph) in buf.iter_mut().zip(&self.phase) {
            *v = *v * *ph * h;
        }
    }

    pub fn inverse_in_place(&self, buf: &mut [Complex<T>]) {
        let scale = T::one() / self.grid.length();
        for (v, ph) in buf.iter_mut().zip(&self.phase) {
            *v *= ph.conj();
        }
        self.inverse.process(buf);
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    pub fn forward(&self, samples: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = samples.to_vec();
        self.forward_in_place(&mut buf);
        buf
    }

    pub fn inverse(&self, modes: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = modes.to_vec();
        self.inverse_in_place(&mut buf);
        buf
    }
}

/// Fourier modes of a periodic field together with its grid and time.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T> {
    pub modes: Vec<Complex<T>>,
    pub grid: Grid1D<T>,
    pub t: T,
}

impl<T: Real> SpectralField<T> {
    pub fn samples(&self) -> Result<Vec<Complex<T>>> {
        dft_inverse(self)
    }

    pub fn wavenumbers(&self) -> Vec<T> {
        wavenumbers(&self.grid)
    }
}

pub fn dft_forward<T: Real>(samples: &[Complex<T>], grid: &Grid1D<T>) -> Result<SpectralField<T>> {
    if samples.len() != grid.len() {
        return config(format!("{} samples on a {}-node grid", samples.len(), grid.len()));
    }
    let plan = SpectralPlan::new(grid)?;
    Ok(SpectralField { modes: plan.forward(samples), grid: *grid, t: T::zero() })
}

pub fn dft_inverse<T: Real>(field: &SpectralField<T>) -> Result<Vec<Complex<T>>> {
    let plan = SpectralPlan::new(&field.grid)?;
    Ok(plan.inverse(&field.modes))
}
