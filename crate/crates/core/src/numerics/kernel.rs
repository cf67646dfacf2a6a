use num_complex::Complex64;

use crate::error::{config, Result};
use crate::numerics::linalg::{det_reg_matrix, Determinants, Matrix};
use crate::numerics::quadrature::QuadratureRule;

/// Two-variable kernel sampled on quadrature nodes, `entries[(i, j)] = k(y_i, z_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub rule: QuadratureRule<f64>,
    pub entries: Matrix<Complex64>,
}

impl KernelMatrix {
    pub fn new(rule: QuadratureRule<f64>, entries: Matrix<Complex64>) -> Result<Self> {
        if entries.rows() != rule.len() || entries.cols() != rule.len() {
            return config(format!(
                "kernel entries {}x{} do not match {} quadrature nodes",
                entries.rows(),
                entries.cols(),
                rule.len()
            ));
        }
        if !entries.is_finite() {
            return config("kernel entries must be finite");
        }
        Ok(Self { rule, entries })
    }

    pub fn from_fn(rule: QuadratureRule<f64>, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let nodes = rule.nodes().to_vec();
        let entries = Matrix::from_fn(nodes.len(), nodes.len(), |i, j| f(nodes[i], nodes[j]));
        Self { rule, entries }
    }

    pub fn len(&self) -> usize {
        self.rule.len()
    }
    pub fn is_empty(&self) -> bool {
        self.rule.is_empty()
    }

    /// Operator acting on quadrature-weighted samples: `(A)_{ij} = k(y_i, z_j) w_j`.
    pub fn weighted(&self) -> Matrix<Complex64> {
        let w = self.rule.weights();
        Matrix::from_fn(self.len(), self.len(), |i, j| self.entries[(i, j)] * w[j])
    }
}

/// `det(I + K_w)` together with `det(I + K_w) e^{-tr K_w}`.
pub fn det_reg(qhat: &KernelMatrix) -> Determinants<Complex64> {
    det_reg_matrix(&qhat.weighted())
}
