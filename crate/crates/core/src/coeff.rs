//! The coefficient tensor acting on symmetric-matrix fields.
//!
//! Three representations are supported: the identity, a positive scalar
//! field times the identity, and a constant matrix acting on the stored
//! components. The map must be self-adjoint with respect to the tensor
//! inner product, whose off-diagonal component carries multiplicity two;
//! for a componentwise constant matrix this forces the couplings between
//! the shear component and the normal components to vanish, so admissible
//! 2D matrices have the block form
//!
//! ```text
//!   [ a  b  0 ]
//!   [ b  c  0 ]      with [a b; b c] positive definite and e > 0.
//!   [ 0  0  e ]
//! ```
//!
//! Spectral bounds are computed analytically per representation.

use crate::error::{Error, Result};
use crate::field::{ScalarField, TensorField};
use crate::grid::Grid;

/// Whether to apply the tensor or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApplyMode {
    Direct,
    Inverse,
}

#[derive(Debug, Clone)]
enum Repr {
    Identity,
    /// c(x) * identity with c > 0 everywhere.
    Scalar(ScalarField),
    /// Constant matrix on the component vector, together with its inverse.
    Constant {
        mat: Vec<f64>,
        inv: Vec<f64>,
        size: usize,
    },
}

/// Self-adjoint, uniformly positive definite map on tensor fields.
#[derive(Debug, Clone)]
pub struct CoefficientTensor {
    repr: Repr,
    kappa: (f64, f64),
}

impl CoefficientTensor {
    pub fn identity() -> Self {
        CoefficientTensor {
            repr: Repr::Identity,
            kappa: (1.0, 1.0),
        }
    }

    /// `c(x) * identity`; rejects fields that are not strictly positive.
    pub fn scalar(c: ScalarField) -> Result<Self> {
        let min = c.values().iter().cloned().fold(f64::INFINITY, f64::min);
        let max = c.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if min.is_nan() || min <= 0.0 || !max.is_finite() {
            return Err(Error::NotSpd(format!(
                "scalar coefficient must be positive and finite everywhere (min {min:e})"
            )));
        }
        Ok(CoefficientTensor {
            repr: Repr::Scalar(c),
            kappa: (min, max),
        })
    }

    /// Constant matrix on the stored components: 1x1 in 1D, 3x3 in 2D with
    /// the block structure described in the module docs.
    pub fn constant_matrix(mat: &[Vec<f64>]) -> Result<Self> {
        let size = mat.len();
        if size != 1 && size != 3 {
            return Err(Error::NotSpd(format!(
                "constant coefficient matrix must be 1x1 or 3x3, got {size}x{size}"
            )));
        }
        if mat.iter().any(|row| row.len() != size) {
            return Err(Error::NotSpd(
                "constant coefficient matrix must be square".into(),
            ));
        }
        let at = |i: usize, j: usize| mat[i][j];
        for i in 0..size {
            for j in 0..i {
                if at(i, j) != at(j, i) {
                    return Err(Error::NotSpd(format!(
                        "matrix is not symmetric at ({i},{j}): {} vs {}",
                        at(i, j),
                        at(j, i)
                    )));
                }
            }
        }
        let (kappa, inv) = if size == 1 {
            let a = at(0, 0);
            if a.is_nan() || a <= 0.0 {
                return Err(Error::NotSpd(format!(
                    "1x1 coefficient must be positive, got {a}"
                )));
            }
            ((a, a), vec![1.0 / a])
        } else {
            if at(0, 2) != 0.0 || at(1, 2) != 0.0 {
                return Err(Error::NotSpd(
                    "couplings between the shear and normal components must be zero \
                     (entries (1,3) and (2,3)); otherwise the map is not self-adjoint \
                     in the tensor inner product"
                        .into(),
                ));
            }
            let (a, b, c, e) = (at(0, 0), at(0, 1), at(1, 1), at(2, 2));
            let det = a * c - b * b;
            let bad = |v: f64| v.is_nan() || v <= 0.0;
            if bad(a) || bad(det) || bad(e) {
                return Err(Error::NotSpd(format!(
                    "matrix is not positive definite (a = {a}, det of normal block = {det}, shear = {e})"
                )));
            }
            // Eigenvalues: the 2x2 normal block pair plus the shear entry.
            let half_tr = 0.5 * (a + c);
            let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
            let lo = (half_tr - disc).min(e);
            let hi = (half_tr + disc).max(e);
            let inv = vec![
                c / det,
                -b / det,
                0.0,
                -b / det,
                a / det,
                0.0,
                0.0,
                0.0,
                1.0 / e,
            ];
            ((lo, hi), inv)
        };
        let flat: Vec<f64> = mat.iter().flatten().cloned().collect();
        Ok(CoefficientTensor {
            repr: Repr::Constant {
                mat: flat,
                inv,
                size,
            },
            kappa,
        })
    }

    /// Spectral bounds (kappa_1, kappa_2) of the map in the tensor inner
    /// product, valid at every node.
    pub fn kappa_bounds(&self) -> (f64, f64) {
        self.kappa
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.repr, Repr::Identity)
    }

    fn matrix_size(&self) -> Option<usize> {
        match &self.repr {
            Repr::Constant { size, .. } => Some(*size),
            _ => None,
        }
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        match &self.repr {
            Repr::Identity => Ok(()),
            Repr::Scalar(c) => {
                if c.grid() != grid {
                    Err(Error::GridMismatch)
                } else {
                    Ok(())
                }
            }
            Repr::Constant { size, .. } => {
                if *size != grid.tensor_components() {
                    Err(Error::NotSpd(format!(
                        "coefficient matrix is {size}x{size} but the grid carries {} components",
                        grid.tensor_components()
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Validate that this tensor can act on fields over `grid`.
    pub fn validate_for(&self, grid: &Grid) -> Result<()> {
        self.check_grid(grid)
    }

    pub(crate) fn apply_raw(&self, grid: &Grid, q: &[f64], out: &mut [f64], mode: ApplyMode) {
        let m = grid.tensor_components();
        match &self.repr {
            Repr::Identity => out.copy_from_slice(q),
            Repr::Scalar(c) => {
                for node in 0..grid.node_count() {
                    let f = match mode {
                        ApplyMode::Direct => c.values()[node],
                        ApplyMode::Inverse => 1.0 / c.values()[node],
                    };
                    for comp in 0..m {
                        out[node * m + comp] = f * q[node * m + comp];
                    }
                }
            }
            Repr::Constant { mat, inv, size } => {
                let a = match mode {
                    ApplyMode::Direct => mat,
                    ApplyMode::Inverse => inv,
                };
                let s = *size;
                for node in 0..grid.node_count() {
                    let base = node * s;
                    for i in 0..s {
                        let mut acc = 0.0;
                        for j in 0..s {
                            acc += a[i * s + j] * q[base + j];
                        }
                        out[base + i] = acc;
                    }
                }
            }
        }
    }

    /// Apply the tensor (or its inverse) nodewise to a tensor field.
    pub fn apply(&self, q: &TensorField, mode: ApplyMode) -> Result<TensorField> {
        self.check_grid(q.grid())?;
        if let Some(size) = self.matrix_size() {
            debug_assert_eq!(size, q.components());
        }
        let mut out = TensorField::zeros(q.grid().clone());
        let grid = q.grid().clone();
        self.apply_raw(&grid, q.values(), out.values_mut(), mode);
        Ok(out)
    }

    /// Squared weighted norm `(A q, q)` (direct) or `(A^{-1} q, q)` (inverse).
    pub fn weighted_norm_sq(&self, q: &TensorField, mode: ApplyMode) -> Result<f64> {
        let aq = self.apply(q, mode)?;
        aq.inner(q)
    }
}
