//! Grids, quadrature, dense linear algebra, transforms and random streams.

pub mod grid;
pub mod kernel;
pub mod linalg;
pub mod ode;
pub mod quadrature;
pub mod random;
pub mod scalar;
pub mod spectral;

pub use grid::{Grid1D, GridKind};
pub use kernel::{det_reg, KernelMatrix};
pub use linalg::{det_reg_matrix, solve_dense, DenseSystem, Determinants, Lu, Matrix};
pub use ode::{rk4_integrate, rk4_step, LinearState};
pub use quadrature::{panel_weight, panel_weights, QuadratureRule, QuadratureScheme};
pub use random::{gaussian_increments, RandomStream};
pub use scalar::{Real, Scalar};
pub use spectral::{check_power_of_two, dft_forward, dft_inverse, wavenumbers, SpectralField, SpectralPlan};
