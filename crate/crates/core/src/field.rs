//! Nodal scalar and symmetric-tensor fields with trapezoidal quadrature.
//!
//! A [`ScalarField`] holds one value per node; a [`TensorField`] holds the
//! independent components of a symmetric matrix per node (1 in 1D; q11, q22,
//! q12 in 2D). The double contraction `q : g` counts the stored off-diagonal
//! component twice, so the discrete inner products mirror the continuum ones.

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Scalar values at every grid node, stored in node order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::LengthMismatch {
                expected: grid.node_count(),
                got: values.len(),
            });
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.node_count();
        ScalarField {
            grid,
            values: vec![0.0; n],
        }
    }

    /// Sample a function of the node coordinates.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.node_count())
            .map(|i| {
                let [x, y] = grid.node_coord(i);
                f(x, y)
            })
            .collect();
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// True when every boundary node carries an exact zero, i.e. the field
    /// belongs to the clamped space.
    pub fn is_clamped(&self) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(i, &v)| v == 0.0 || !self.grid.is_boundary(i))
    }

    pub(crate) fn require_clamped(&self) -> Result<()> {
        for (i, &v) in self.values.iter().enumerate() {
            if v != 0.0 && self.grid.is_boundary(i) {
                return Err(Error::NotClamped { node: i, value: v });
            }
        }
        Ok(())
    }

    /// Trapezoidal quadrature of the field over the box.
    pub fn integrate(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| self.grid.weight(i) * v)
            .sum()
    }

    /// Weighted L2 pairing with another scalar field on the same grid.
    pub fn dot(&self, other: &ScalarField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (&a, &b))| self.grid.weight(i) * a * b)
            .sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// self - other.
    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ScalarField {
            grid: self.grid.clone(),
            values,
        })
    }

    /// self + scale * other.
    pub fn add_scaled(&self, scale: f64, other: &ScalarField) -> Result<ScalarField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + scale * b)
            .collect();
        Ok(ScalarField {
            grid: self.grid.clone(),
            values,
        })
    }
}

/// Symmetric-matrix values at every grid node; only the upper triangle is
/// stored (component order q11, q22, q12 in 2D).
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    grid: Grid,
    values: Vec<f64>,
}

impl TensorField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let expected = grid.node_count() * grid.tensor_components();
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        Ok(TensorField { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.node_count() * grid.tensor_components();
        TensorField {
            grid,
            values: vec![0.0; n],
        }
    }

    /// Sample per-component functions of the node coordinates.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, usize) -> f64) -> Self {
        let m = grid.tensor_components();
        let values = (0..grid.node_count() * m)
            .map(|k| {
                let [x, y] = grid.node_coord(k / m);
                f(x, y, k % m)
            })
            .collect();
        TensorField { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.grid.tensor_components()
    }

    /// Flat component storage, node-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, node: usize, comp: usize) -> f64 {
        self.values[node * self.components() + comp]
    }

    pub fn set(&mut self, node: usize, comp: usize, value: f64) {
        let m = self.components();
        self.values[node * m + comp] = value;
    }

    /// Quadrature of the double contraction `self : other`; the stored
    /// off-diagonal component contributes with multiplicity two.
    pub fn inner(&self, other: &TensorField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let m = self.components();
        let mut total = 0.0;
        for node in 0..self.grid.node_count() {
            let w = self.grid.weight(node);
            let base = node * m;
            let mut c = self.values[base] * other.values[base];
            if m == 3 {
                c += self.values[base + 1] * other.values[base + 1];
                c += 2.0 * self.values[base + 2] * other.values[base + 2];
            }
            total += w * c;
        }
        Ok(total)
    }

    /// Squared L2 norm, `inner(self, self)`.
    pub fn norm_sq(&self) -> f64 {
        self.inner(self).expect("same grid")
    }

    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(TensorField {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn add_scaled(&self, scale: f64, other: &TensorField) -> Result<TensorField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + scale * b)
            .collect();
        Ok(TensorField {
            grid: self.grid.clone(),
            values,
        })
    }
}
