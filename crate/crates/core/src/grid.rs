//! Uniform tensor-product grids on boxes in one and two dimensions.
//!
//! Nodes are ordered lexicographically with the x index running fastest,
//! and every field in this crate serializes in that order. Trapezoidal
//! quadrature weights (`h/2` at the ends of an axis, `h` inside, products
//! across axes) are the single quadrature rule used everywhere, which is
//! what makes the discrete integration-by-parts identities exact.

use crate::error::{Error, Result};

/// One axis of a tensor-product grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub nodes: usize,
    /// Node spacing, `(max - min) / (nodes - 1)`.
    pub spacing: f64,
}

impl Axis {
    fn new(index: usize, min: f64, max: f64, nodes: usize) -> Result<Self> {
        let degenerate = min.is_nan() || max.is_nan() || min >= max;
        if degenerate || min.is_infinite() || max.is_infinite() {
            return Err(Error::EmptyInterval {
                axis: index,
                min,
                max,
            });
        }
        // Second-difference stencils need two interior layers on each side.
        if nodes < 5 {
            return Err(Error::TooFewNodes { axis: index, nodes });
        }
        let spacing = (max - min) / (nodes - 1) as f64;
        Ok(Axis {
            min,
            max,
            nodes,
            spacing,
        })
    }

    /// Coordinate of node `i`, reproducible bit-exactly from the index.
    /// The last node maps onto the interval end exactly.
    pub fn coord(&self, i: usize) -> f64 {
        debug_assert!(i < self.nodes);
        if i + 1 == self.nodes {
            self.max
        } else {
            self.min + i as f64 * self.spacing
        }
    }

    /// Trapezoidal weight of node `i` along this axis.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.nodes {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }
}

/// Uniform grid on a box in 1D or 2D.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    /// Build a grid from per-axis bounds and node counts. The dimension is
    /// the number of axes (1 or 2).
    pub fn new(bounds: &[(f64, f64)], nodes: &[usize]) -> Result<Self> {
        assert!(
            !bounds.is_empty() && bounds.len() <= 2 && bounds.len() == nodes.len(),
            "grids are 1D or 2D with one node count per axis"
        );
        let axes = bounds
            .iter()
            .zip(nodes)
            .enumerate()
            .map(|(k, (&(a, b), &n))| Axis::new(k, a, b, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Grid { axes })
    }

    /// 1D interval grid.
    pub fn line(min: f64, max: f64, nodes: usize) -> Result<Self> {
        Grid::new(&[(min, max)], &[nodes])
    }

    /// 2D box grid.
    pub fn rectangle(x: (f64, f64), y: (f64, f64), nodes: (usize, usize)) -> Result<Self> {
        Grid::new(&[x, y], &[nodes.0, nodes.1])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn node_count(&self) -> usize {
        self.axes.iter().map(|a| a.nodes).product()
    }

    /// Number of independent components of a symmetric tensor field:
    /// 1 in 1D, 3 in 2D (ordered q11, q22, q12).
    pub fn tensor_components(&self) -> usize {
        let d = self.dim();
        d * (d + 1) / 2
    }

    pub(crate) fn nx(&self) -> usize {
        self.axes[0].nodes
    }

    pub(crate) fn ny(&self) -> usize {
        if self.dim() == 2 {
            self.axes[1].nodes
        } else {
            1
        }
    }

    /// Flat node index from per-axis indices (x fastest).
    pub fn node_index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx() + ix
    }

    /// Per-axis indices from the flat index.
    pub fn node_split(&self, node: usize) -> (usize, usize) {
        let nx = self.nx();
        (node % nx, node / nx)
    }

    /// Physical coordinates of a node; the y entry is 0 in 1D.
    pub fn node_coord(&self, node: usize) -> [f64; 2] {
        let (ix, iy) = self.node_split(node);
        let x = self.axes[0].coord(ix);
        let y = if self.dim() == 2 {
            self.axes[1].coord(iy)
        } else {
            0.0
        };
        [x, y]
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let (ix, iy) = self.node_split(node);
        if ix == 0 || ix + 1 == self.nx() {
            return true;
        }
        self.dim() == 2 && (iy == 0 || iy + 1 == self.ny())
    }

    /// Indices of interior nodes in node order.
    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&i| !self.is_boundary(i))
            .collect()
    }

    /// Trapezoidal quadrature weight of a node (product across axes).
    pub fn weight(&self, node: usize) -> f64 {
        let (ix, iy) = self.node_split(node);
        let mut w = self.axes[0].weight(ix);
        if self.dim() == 2 {
            w *= self.axes[1].weight(iy);
        }
        w
    }

    /// All quadrature weights in node order.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.node_count()).map(|i| self.weight(i)).collect()
    }
}
