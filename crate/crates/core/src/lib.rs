//! Solvers built on the Grassmann-Pöppe linearisation: evolve linear base
//! equations exactly, then recover the nonlinear field from a linear
//! Fredholm/Volterra relation or a characteristic inversion.

pub mod elliptic;
pub mod error;
pub mod fredholm;
pub mod graph_flows;
pub mod integrable;
pub mod smoluchowski;
pub mod spde;
pub mod numerics;
pub mod quotient;

pub use error::{Error, Result};

use num_complex::Complex64;

pub type Grid = numerics::Grid1D<f64>;
pub type Quadrature = numerics::QuadratureRule<f64>;
pub type RealMatrix = numerics::Matrix<f64>;
pub type ComplexMatrix = numerics::Matrix<Complex64>;
pub type Field = numerics::SpectralField<f64>;
