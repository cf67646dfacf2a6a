use crate::error::{config, Result};
use crate::numerics::grid::{Grid1D, GridKind};
use crate::numerics::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuadratureScheme {
    RiemannLeft,
    Trapezoid,
    /// Fourth-order Gregory end corrections, Newton-Cotes below five panels.
    Gregory,
}

impl QuadratureScheme {
    pub fn name(&self) -> &'static str {
        match self {
            QuadratureScheme::RiemannLeft => "riemann-left",
            QuadratureScheme::Trapezoid => "trapezoid",
            QuadratureScheme::Gregory => "gregory",
        }
    }
}

impl std::str::FromStr for QuadratureScheme {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "riemann-left" => Ok(Self::RiemannLeft),
            "trapezoid" => Ok(Self::Trapezoid),
            "gregory" => Ok(Self::Gregory),
            other => config(format!("unknown quadrature scheme '{other}'")),
        }
    }
}

/// Weight of node `j` in the integral over `[x_0, x_panels]` at spacing `h`.
/// Unused end nodes (riemann-left) get weight zero.
pub fn panel_weight<T: Real>(scheme: QuadratureScheme, panels: usize, j: usize, h: T) -> T {
    if panels == 0 || j > panels {
        return T::zero();
    }
    let c = |v: f64| T::of(v) * h;
    match scheme {
        QuadratureScheme::RiemannLeft => {
            if j < panels {
                h
            } else {
                T::zero()
            }
        }
        QuadratureScheme::Trapezoid => {
            if j == 0 || j == panels {
                c(0.5)
            } else {
                h
            }
        }
        QuadratureScheme::Gregory => match panels {
            1 => c(0.5),
            2 => c([1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0][j]),
            3 => c([3.0 / 8.0, 9.0 / 8.0, 9.0 / 8.0, 3.0 / 8.0][j]),
            4 => c([14.0 / 45.0, 64.0 / 45.0, 24.0 / 45.0, 64.0 / 45.0, 14.0 / 45.0][j]),
            _ => match j.min(panels - j) {
                0 => c(3.0 / 8.0),
                1 => c(7.0 / 6.0),
                2 => c(23.0 / 24.0),
                _ => h,
            },
        },
    }
}

/// All weights for the integral over `[x_0, x_panels]`.
pub fn panel_weights<T: Real>(scheme: QuadratureScheme, panels: usize, h: T) -> Vec<T> {
    (0..=panels).map(|j| panel_weight(scheme, panels, j, h)).collect()
}

/// Quadrature nodes and weights over a contiguous run of grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    indices: Vec<usize>,
    scheme: QuadratureScheme,
}

impl<T: Real> QuadratureRule<T> {
    /// Rule over the whole grid. Periodic grids integrate one full period.
    pub fn on_grid(grid: &Grid1D<T>, scheme: QuadratureScheme) -> Result<Self> {
        match grid.kind() {
            GridKind::Closed => Self::on_range(grid, 0, grid.len() - 1, scheme),
            GridKind::Periodic => {
                let h = grid.spacing();
                let indices: Vec<usize> = (0..grid.len()).collect();
                Ok(Self {
                    nodes: grid.nodes(),
                    weights: vec![h; grid.len()],
                    indices,
                    scheme,
                })
            }
        }
    }

    /// Rule for the integral from node `first` to node `last` (inclusive).
    pub fn on_range(grid: &Grid1D<T>, first: usize, last: usize, scheme: QuadratureScheme) -> Result<Self> {
        if last <= first || last >= grid.len() {
            return config(format!("invalid quadrature node range {first}..={last}"));
        }
        let w = panel_weights(scheme, last - first, grid.spacing());
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut indices = Vec::new();
        for (j, wj) in w.into_iter().enumerate() {
            if wj > T::zero() {
                nodes.push(grid.node(first + j));
                weights.push(wj);
                indices.push(first + j);
            }
        }
        Ok(Self { nodes, weights, indices, scheme })
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }
    pub fn weights(&self) -> &[T] {
        &self.weights
    }
    /// Grid index of each quadrature node.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
    pub fn scheme(&self) -> QuadratureScheme {
        self.scheme
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate samples given at the underlying grid nodes.
    pub fn integrate_grid(&self, samples: &[T]) -> T {
        self.indices
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&i, &w)| acc + w * samples[i])
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }
}
