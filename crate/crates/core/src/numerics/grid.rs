use crate::error::{config, Result};
use crate::numerics::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Closed,
    Periodic,
}

/// Uniform one-dimensional grid. Periodic grids omit the upper endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D<T> {
    lower: T,
    upper: T,
    n: usize,
    kind: GridKind,
}

impl<T: Real> Grid1D<T> {
    pub fn new(lower: T, upper: T, n: usize, kind: GridKind) -> Result<Self> {
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return config(format!("grid bounds must satisfy lower < upper (got {lower}, {upper})"));
        }
        if n < 2 {
            return config(format!("grid needs at least 2 nodes (got {n})"));
        }
        Ok(Self { lower, upper, n, kind })
    }

    pub fn closed(lower: T, upper: T, n: usize) -> Result<Self> {
        Self::new(lower, upper, n, GridKind::Closed)
    }

    pub fn periodic(lower: T, upper: T, n: usize) -> Result<Self> {
        Self::new(lower, upper, n, GridKind::Periodic)
    }

    pub fn lower(&self) -> T {
        self.lower
    }
    pub fn upper(&self) -> T {
        self.upper
    }
    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn kind(&self) -> GridKind {
        self.kind
    }
    pub fn length(&self) -> T {
        self.upper - self.lower
    }

    pub fn spacing(&self) -> T {
        let cells = match self.kind {
            GridKind::Closed => self.n - 1,
            GridKind::Periodic => self.n,
        };
        self.length() / T::of_usize(cells)
    }

    pub fn node(&self, i: usize) -> T {
        self.lower + T::of_usize(i) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Fractional index of `x`, i.e. `(x - lower) / spacing`.
    pub fn position(&self, x: T) -> T {
        (x - self.lower) / self.spacing()
    }
}
