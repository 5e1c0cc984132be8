//! Discrete Hessian, its exact quadrature-weighted adjoint, and the
//! clamped fourth-order energy operator.
//!
//! The Hessian uses central second differences for the diagonal components
//! and the four-point diagonal stencil for the cross derivative. Clamped
//! boundary conditions (zero value and zero normal derivative) enter
//! through ghost nodes obtained by even reflection about the boundary
//! node: `v[-1] = v[1]`.
//!
//! The divergence-of-divergence operator is *defined* as the adjoint of
//! the Hessian with respect to the trapezoid-weighted inner products,
//! `divDiv = W_V^{-1} L^T W_Y`, so the discrete integration-by-parts
//! identity
//!
//! ```text
//!   (hessian(v), q)_Y = (v, div_div(q))_V
//! ```
//!
//! holds to machine precision for every field, not just asymptotically.
//! All higher-level identities in this crate inherit their exactness from
//! this choice.

use crate::coeff::{ApplyMode, CoefficientTensor};
use crate::error::{Error, Result};
use crate::field::{ScalarField, TensorField};
use crate::grid::Grid;
use crate::linalg;

/// Marker for the single boundary convention of this crate: zero value and
/// zero normal derivative on the whole boundary, realized by even ghost
/// reflection in the stencils.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClampedBoundary;

/// Mirror an index that stepped outside `[0, n)` back into the grid
/// (even reflection about the boundary node).
#[inline]
fn mirror(i: isize, n: usize) -> usize {
    if i < 0 {
        (-i) as usize
    } else if (i as usize) < n {
        i as usize
    } else {
        2 * (n - 1) - i as usize
    }
}

pub(crate) fn hessian_raw(grid: &Grid, v: &[f64], out: &mut [f64]) {
    let nx = grid.nx();
    if grid.dim() == 1 {
        let h = grid.axes()[0].spacing;
        let inv_h2 = 1.0 / (h * h);
        for i in 0..nx {
            let vm = v[mirror(i as isize - 1, nx)];
            let vp = v[mirror(i as isize + 1, nx)];
            out[i] = (vm - 2.0 * v[i] + vp) * inv_h2;
        }
        return;
    }
    let ny = grid.ny();
    let hx = grid.axes()[0].spacing;
    let hy = grid.axes()[1].spacing;
    let inv_hx2 = 1.0 / (hx * hx);
    let inv_hy2 = 1.0 / (hy * hy);
    let inv_cross = 1.0 / (4.0 * hx * hy);
    for iy in 0..ny {
        let ym = mirror(iy as isize - 1, ny) * nx;
        let y0 = iy * nx;
        let yp = mirror(iy as isize + 1, ny) * nx;
        for ix in 0..nx {
            let xm = mirror(ix as isize - 1, nx);
            let xp = mirror(ix as isize + 1, nx);
            let base = 3 * (y0 + ix);
            out[base] = (v[y0 + xm] - 2.0 * v[y0 + ix] + v[y0 + xp]) * inv_hx2;
            out[base + 1] = (v[ym + ix] - 2.0 * v[y0 + ix] + v[yp + ix]) * inv_hy2;
            out[base + 2] = (v[yp + xp] - v[yp + xm] - v[ym + xp] + v[ym + xm]) * inv_cross;
        }
    }
}

/// Adjoint of the Hessian against the Y-weighted pairing, without the final
/// division by the scalar quadrature weights: `out = L^T W_Y q`.
pub(crate) fn hessian_adjoint_weighted_raw(grid: &Grid, q: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    let nx = grid.nx();
    if grid.dim() == 1 {
        let h = grid.axes()[0].spacing;
        let inv_h2 = 1.0 / (h * h);
        for i in 0..nx {
            let t = grid.weight(i) * q[i] * inv_h2;
            out[mirror(i as isize - 1, nx)] += t;
            out[i] -= 2.0 * t;
            out[mirror(i as isize + 1, nx)] += t;
        }
        return;
    }
    let ny = grid.ny();
    let hx = grid.axes()[0].spacing;
    let hy = grid.axes()[1].spacing;
    let inv_hx2 = 1.0 / (hx * hx);
    let inv_hy2 = 1.0 / (hy * hy);
    let inv_cross = 1.0 / (4.0 * hx * hy);
    for iy in 0..ny {
        let ym = mirror(iy as isize - 1, ny) * nx;
        let y0 = iy * nx;
        let yp = mirror(iy as isize + 1, ny) * nx;
        for ix in 0..nx {
            let node = y0 + ix;
            let w = grid.weight(node);
            let xm = mirror(ix as isize - 1, nx);
            let xp = mirror(ix as isize + 1, nx);
            let base = 3 * node;
            let txx = w * q[base] * inv_hx2;
            out[y0 + xm] += txx;
            out[node] -= 2.0 * txx;
            out[y0 + xp] += txx;
            let tyy = w * q[base + 1] * inv_hy2;
            out[ym + ix] += tyy;
            out[node] -= 2.0 * tyy;
            out[yp + ix] += tyy;
            // stored off-diagonal component counts twice in the contraction
            let txy = 2.0 * w * q[base + 2] * inv_cross;
            out[yp + xp] += txy;
            out[yp + xm] -= txy;
            out[ym + xp] -= txy;
            out[ym + xm] += txy;
        }
    }
}

/// Discrete Hessian of a clamped scalar field.
pub fn hessian(v: &ScalarField) -> Result<TensorField> {
    v.require_clamped()?;
    let grid = v.grid().clone();
    let mut out = TensorField::zeros(grid.clone());
    hessian_raw(&grid, v.values(), out.values_mut());
    Ok(out)
}

/// Exact discrete adjoint of [`hessian`]: `div_div = W_V^{-1} L^T W_Y`.
pub fn div_div(q: &TensorField) -> ScalarField {
    let grid = q.grid().clone();
    let mut out = ScalarField::zeros(grid.clone());
    hessian_adjoint_weighted_raw(&grid, q.values(), out.values_mut());
    for (i, v) in out.values_mut().iter_mut().enumerate() {
        *v /= grid.weight(i);
    }
    out
}

/// Scratch buffers for repeated operator applications.
#[derive(Debug, Clone)]
pub struct OperatorScratch {
    t1: Vec<f64>,
    t2: Vec<f64>,
}

/// The clamped fourth-order form `H = L^T W_Y A L` on nodal vectors.
///
/// `apply_full` acts on full-length vectors (boundary entries are honoured
/// as given; clamped callers keep them at zero). The interior variants view
/// the operator on the clamped subspace, which is symmetric positive
/// definite there.
#[derive(Debug, Clone)]
pub struct EnergyOperator {
    grid: Grid,
    coeff: CoefficientTensor,
    interior: Vec<usize>,
    weights: Vec<f64>,
}

impl EnergyOperator {
    pub fn new(grid: Grid, coeff: CoefficientTensor) -> Result<Self> {
        coeff.validate_for(&grid)?;
        let interior = grid.interior_nodes();
        let weights = grid.weights();
        Ok(EnergyOperator {
            grid,
            coeff,
            interior,
            weights,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficient(&self) -> &CoefficientTensor {
        &self.coeff
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scratch(&self) -> OperatorScratch {
        let m = self.grid.node_count() * self.grid.tensor_components();
        OperatorScratch {
            t1: vec![0.0; m],
            t2: vec![0.0; m],
        }
    }

    /// `out = L^T W_Y A L v` on full-length vectors.
    pub fn apply_full(&self, v: &[f64], out: &mut [f64], s: &mut OperatorScratch) {
        hessian_raw(&self.grid, v, &mut s.t1);
        if self.coeff.is_identity() {
            hessian_adjoint_weighted_raw(&self.grid, &s.t1, out);
        } else {
            self.coeff
                .apply_raw(&self.grid, &s.t1, &mut s.t2, ApplyMode::Direct);
            hessian_adjoint_weighted_raw(&self.grid, &s.t2, out);
        }
    }

    /// Apply the operator between interior-indexed vectors (boundary zero).
    pub fn apply_interior(
        &self,
        v_int: &[f64],
        out_int: &mut [f64],
        full_in: &mut [f64],
        full_out: &mut [f64],
        s: &mut OperatorScratch,
    ) {
        full_in.fill(0.0);
        for (k, &node) in self.interior.iter().enumerate() {
            full_in[node] = v_int[k];
        }
        self.apply_full(full_in, full_out, s);
        for (k, &node) in self.interior.iter().enumerate() {
            out_int[k] = full_out[node];
        }
    }

    /// Dense interior block of the operator, assembled column by column.
    pub fn assemble_dense_interior(&self) -> nalgebra::DMatrix<f64> {
        let n = self.interior.len();
        let total = self.grid.node_count();
        let mut s = self.scratch();
        let mut full_in = vec![0.0; total];
        let mut full_out = vec![0.0; total];
        let mut h = nalgebra::DMatrix::zeros(n, n);
        for j in 0..n {
            full_in.fill(0.0);
            full_in[self.interior[j]] = 1.0;
            self.apply_full(&full_in, &mut full_out, &mut s);
            for (i, &node) in self.interior.iter().enumerate() {
                h[(i, j)] = full_out[node];
            }
        }
        h
    }

    /// Solve `H w = rhs` on the clamped subspace; `rhs` is given at the
    /// interior nodes, the returned vector is full-length with zero
    /// boundary entries. Small systems use a dense Cholesky factorization
    /// with one refinement pass; larger ones fall back to conjugate
    /// gradients at relative tolerance 1e-12.
    pub fn solve_clamped(&self, rhs_interior: &[f64]) -> Result<Vec<f64>> {
        const DIRECT_LIMIT: usize = 1200;
        let n = self.interior.len();
        assert_eq!(rhs_interior.len(), n);
        let total = self.grid.node_count();
        let x_int = if n <= DIRECT_LIMIT {
            let h = self.assemble_dense_interior();
            let chol = h.clone().cholesky().ok_or_else(|| {
                Error::NotSpd("clamped operator lost positive definiteness".into())
            })?;
            let rhs = nalgebra::DVector::from_column_slice(rhs_interior);
            let mut x = chol.solve(&rhs);
            let residual = &rhs - &h * &x;
            x += chol.solve(&residual);
            x.iter().cloned().collect::<Vec<f64>>()
        } else {
            let mut s = self.scratch();
            let mut full_in = vec![0.0; total];
            let mut full_out = vec![0.0; total];
            linalg::conjugate_gradient(
                |v, out| self.apply_interior(v, out, &mut full_in, &mut full_out, &mut s),
                rhs_interior,
                1e-12,
                (400 * n).min(2_000_000),
            )?
        };
        let mut w = vec![0.0; total];
        for (k, &node) in self.interior.iter().enumerate() {
            w[node] = x_int[k];
        }
        Ok(w)
    }

    /// Upper bound for the largest interior eigenvalue via power iteration
    /// (20 steps, 5% safety factor). Deterministic start vector.
    pub fn lipschitz_bound(&self) -> f64 {
        let n = self.interior.len();
        let total = self.grid.node_count();
        let mut s = self.scratch();
        let mut full_in = vec![0.0; total];
        let mut full_out = vec![0.0; total];
        let estimate = linalg::power_iteration_max(
            |x, y| self.apply_interior(x, y, &mut full_in, &mut full_out, &mut s),
            n,
            20,
        );
        1.05 * estimate
    }
}

/// The `count` lowest clamped eigenmodes of the pencil `(H, W_V)`,
/// normalized to unit weighted norm, as full-grid fields. Dense solve;
/// refuses grids beyond the dense-eigensolve limit.
pub fn lowest_clamped_modes(op: &EnergyOperator, count: usize) -> Result<Vec<ScalarField>> {
    let grid = op.grid().clone();
    let interior = op.interior().to_vec();
    let n = interior.len();
    if n > DENSE_EIG_LIMIT {
        return Err(Error::TooLargeForDense {
            interior: n,
            limit: DENSE_EIG_LIMIT,
        });
    }
    let sqrt_w: Vec<f64> = interior.iter().map(|&i| grid.weight(i).sqrt()).collect();
    let mut h = op.assemble_dense_interior();
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (h[(i, j)] + h[(j, i)]);
            h[(i, j)] = avg;
            h[(j, i)] = avg;
        }
    }
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] /= sqrt_w[i] * sqrt_w[j];
        }
    }
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let mut modes = Vec::new();
    for &k in order.iter().take(count.min(n)) {
        let mut field = ScalarField::zeros(grid.clone());
        for (idx, &node) in interior.iter().enumerate() {
            field.values_mut()[node] = eig.eigenvectors[(idx, k)] / sqrt_w[idx];
        }
        modes.push(field);
    }
    Ok(modes)
}

/// How [`coercivity_constant`] extracts the smallest generalized eigenvalue.
#[derive(Debug, Clone, Copy)]
pub enum CoercivityMode {
    /// Dense symmetric eigensolve; limited to 2500 interior nodes.
    Dense,
    /// Inverse power iteration with conjugate-gradient inner solves.
    Iterative { tol: f64, max_iter: usize },
}

const DENSE_EIG_LIMIT: usize = 2500;

/// Discrete coercivity constant `kappa > 0` of the clamped operator:
/// the square root of the smallest eigenvalue of `(H, W_V)` on interior
/// nodes. A nonpositive eigenvalue is a structural failure and is
/// reported as an error.
pub fn coercivity_constant(
    grid: &Grid,
    _bc: ClampedBoundary,
    coeff: &CoefficientTensor,
    mode: CoercivityMode,
) -> Result<f64> {
    let op = EnergyOperator::new(grid.clone(), coeff.clone())?;
    let interior = op.interior().to_vec();
    let n = interior.len();
    let sqrt_w: Vec<f64> = interior.iter().map(|&i| grid.weight(i).sqrt()).collect();
    let lambda_min = match mode {
        CoercivityMode::Dense => {
            if n > DENSE_EIG_LIMIT {
                return Err(Error::TooLargeForDense {
                    interior: n,
                    limit: DENSE_EIG_LIMIT,
                });
            }
            let mut h = op.assemble_dense_interior();
            // symmetrize against rounding before W^{-1/2} H W^{-1/2}
            for i in 0..n {
                for j in 0..i {
                    let avg = 0.5 * (h[(i, j)] + h[(j, i)]);
                    h[(i, j)] = avg;
                    h[(j, i)] = avg;
                }
            }
            for i in 0..n {
                for j in 0..n {
                    h[(i, j)] /= sqrt_w[i] * sqrt_w[j];
                }
            }
            let eig = h.symmetric_eigenvalues();
            eig.iter().cloned().fold(f64::INFINITY, f64::min)
        }
        CoercivityMode::Iterative { tol, max_iter } => {
            let total = grid.node_count();
            let mut s = op.scratch();
            let mut full_in = vec![0.0; total];
            let mut full_out = vec![0.0; total];
            linalg::smallest_generalized_eig_iterative(
                |x, y| op.apply_interior(x, y, &mut full_in, &mut full_out, &mut s),
                &sqrt_w,
                tol,
                max_iter,
            )?
        }
    };
    if lambda_min.is_nan() || lambda_min <= 0.0 {
        return Err(Error::NotCoercive(lambda_min));
    }
    Ok(lambda_min.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing;

    fn line(n: usize) -> Grid {
        Grid::line(0.0, 1.0, n).unwrap()
    }

    fn unit_square(n: usize) -> Grid {
        Grid::rectangle((0.0, 1.0), (0.0, 1.0), (n, n)).unwrap()
    }

    #[test]
    fn hessian_of_zero_is_zero() {
        let v = ScalarField::zeros(unit_square(5));
        let q = hessian(&v).unwrap();
        assert!(q.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn hessian_rejects_non_clamped_input() {
        let g = line(5);
        let v = ScalarField::from_fn(g, |x, _| x);
        assert!(matches!(hessian(&v), Err(Error::NotClamped { .. })));
    }

    #[test]
    fn quartic_second_difference_matches_hand_value() {
        // v = x^2 (1-x)^2 sampled on h = 1/4; the central second difference
        // at x = 0.5 is (0.03515625 - 2*0.0625 + 0.03515625) / 0.0625.
        let g = line(5);
        let v = ScalarField::from_fn(g, |x, _| x * x * (1.0 - x) * (1.0 - x));
        let q = hessian(&v).unwrap();
        assert!((q.get(2, 0) - (-0.875)).abs() < 1e-13);
    }

    #[test]
    fn central_differences_are_exact_on_quadratics_away_from_boundary() {
        let g = unit_square(9);
        let v = ScalarField::from_fn(g.clone(), |x, y| {
            // restriction of x^2 + y^2, zeroed at the boundary to stay clamped
            if x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0 {
                0.0
            } else {
                x * x + y * y
            }
        });
        let q = hessian(&v).unwrap();
        for node in 0..g.node_count() {
            let (ix, iy) = g.node_split(node);
            if ix >= 2 && ix + 2 < 9 && iy >= 2 && iy + 2 < 9 {
                assert!((q.get(node, 0) - 2.0).abs() < 1e-10, "xx at node {node}");
                assert!((q.get(node, 1) - 2.0).abs() < 1e-10, "yy at node {node}");
                assert!(q.get(node, 2).abs() < 1e-10, "xy at node {node}");
            }
        }
    }

    #[test]
    fn hessian_is_linear() {
        let g = unit_square(7);
        let mut rng = testing::rng(5);
        let v = testing::random_clamped(&g, &mut rng, true);
        let w = testing::random_clamped(&g, &mut rng, false);
        let combo = v.add_scaled(-2.5, &w).unwrap();
        let lhs = hessian(&combo).unwrap();
        let rhs = hessian(&v)
            .unwrap()
            .add_scaled(-2.5, &hessian(&w).unwrap())
            .unwrap();
        let diff = lhs.sub(&rhs).unwrap();
        assert!(diff.norm_sq().sqrt() <= 1e-14 * (1.0 + lhs.norm_sq().sqrt()));
    }

    #[test]
    fn div_div_of_zero_is_zero() {
        let q = TensorField::zeros(unit_square(5));
        assert!(div_div(&q).values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn adjointness_is_exact_for_random_pairs() {
        let grids = [
            line(7),
            line(21),
            unit_square(5),
            Grid::rectangle((0.0, 1.0), (0.0, 2.0), (9, 7)).unwrap(),
        ];
        let mut rng = testing::rng(42);
        for g in &grids {
            for _ in 0..100 {
                let v = testing::random_clamped(g, &mut rng, false);
                let q = testing::random_tensor(g, &mut rng);
                let lhs = hessian(&v).unwrap().inner(&q).unwrap();
                let dd = div_div(&q);
                let rhs: f64 = v
                    .values()
                    .iter()
                    .zip(dd.values())
                    .enumerate()
                    .map(|(i, (&a, &b))| g.weight(i) * a * b)
                    .sum();
                let scale = 1.0 + lhs.abs();
                assert!((lhs - rhs).abs() <= 1e-12 * scale, "{lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn div_div_recovers_the_second_derivative_inside() {
        let g = line(201);
        let q = TensorField::from_fn(g.clone(), |x, _, _| x * (1.0 - x));
        let dd = div_div(&q);
        let h = g.axes()[0].spacing;
        for i in 0..g.node_count() {
            let x = g.node_coord(i)[0];
            if x >= 3.0 * h - 1e-12 && x <= 1.0 - 3.0 * h + 1e-12 {
                assert!(
                    (dd.values()[i] + 2.0).abs() <= 0.01,
                    "node {i}: {}",
                    dd.values()[i]
                );
            }
        }
    }

    #[test]
    fn dense_interior_block_is_symmetric() {
        let g = unit_square(6);
        let mut rng = testing::rng(9);
        let a = testing::random_coefficient(&g, &mut rng);
        let op = EnergyOperator::new(g, a).unwrap();
        let h = op.assemble_dense_interior();
        let norm = h.norm();
        let asym = (&h - h.transpose()).norm();
        assert!(asym <= 1e-13 * norm, "asymmetry {asym} vs norm {norm}");
    }

    #[test]
    fn interior_rows_compose_to_the_fourth_difference() {
        let g = line(11);
        let h = g.axes()[0].spacing;
        let op = EnergyOperator::new(g.clone(), CoefficientTensor::identity()).unwrap();
        let mut s = op.scratch();
        let n = g.node_count();
        let mut unit = vec![0.0; n];
        let mut out = vec![0.0; n];
        // row at node 5 of W^{-1} H: hit with unit vectors and read the row
        let expected = [1.0, -4.0, 6.0, -4.0, 1.0].map(|c| c / h.powi(4));
        for (offset, &coeff) in (-2..=2).zip(expected.iter()) {
            unit.fill(0.0);
            unit[(5 + offset) as usize] = 1.0;
            op.apply_full(&unit, &mut out, &mut s);
            let entry = out[5] / g.weight(5);
            assert!(
                (entry - coeff).abs() <= 1e-9 * coeff.abs().max(1.0),
                "offset {offset}: {entry} vs {coeff}"
            );
        }
    }

    #[test]
    fn coercivity_constant_is_positive_and_scales_with_the_coefficient() {
        let g = line(21);
        let id = CoefficientTensor::identity();
        let k1 = coercivity_constant(&g, ClampedBoundary, &id, CoercivityMode::Dense).unwrap();
        assert!(k1 > 0.0);
        let four = CoefficientTensor::scalar(ScalarField::from_fn(g.clone(), |_, _| 4.0)).unwrap();
        let k4 = coercivity_constant(&g, ClampedBoundary, &four, CoercivityMode::Dense).unwrap();
        assert!((k4 - 2.0 * k1).abs() <= 1e-10 * k1);
    }

    #[test]
    fn coercivity_refinement_approaches_a_grid_independent_limit() {
        let mut previous: Option<f64> = None;
        for n in [21, 41] {
            let g = line(n);
            let k = coercivity_constant(
                &g,
                ClampedBoundary,
                &CoefficientTensor::identity(),
                CoercivityMode::Dense,
            )
            .unwrap();
            if let Some(p) = previous {
                let change = ((k * k - p) / p).abs();
                assert!(change < 0.05, "change {change}");
            }
            previous = Some(k * k);
        }
    }

    #[test]
    fn lowest_modes_satisfy_the_eigen_relation() {
        let g = line(21);
        let op = EnergyOperator::new(g.clone(), CoefficientTensor::identity()).unwrap();
        let modes = lowest_clamped_modes(&op, 3).unwrap();
        assert_eq!(modes.len(), 3);
        let kappa = coercivity_constant(
            &g,
            ClampedBoundary,
            &CoefficientTensor::identity(),
            CoercivityMode::Dense,
        )
        .unwrap();
        let mut s = op.scratch();
        let mut out = vec![0.0; g.node_count()];
        // first mode: H psi = kappa^2 W psi, and |psi|_W = 1
        let psi = &modes[0];
        op.apply_full(psi.values(), &mut out, &mut s);
        let mut weighted_norm = 0.0;
        let mut worst = 0.0_f64;
        for (i, (&value, &hv)) in psi.values().iter().zip(&out).enumerate() {
            let w = g.weight(i);
            weighted_norm += w * value * value;
            if !g.is_boundary(i) {
                worst = worst.max((hv - kappa * kappa * w * value).abs());
            }
        }
        assert!((weighted_norm - 1.0).abs() <= 1e-10);
        assert!(worst <= 1e-7 * kappa * kappa, "eigen residual {worst:e}");
    }

    #[test]
    fn iterative_mode_matches_dense() {
        let g = line(21);
        let id = CoefficientTensor::identity();
        let dense = coercivity_constant(&g, ClampedBoundary, &id, CoercivityMode::Dense).unwrap();
        let iter = coercivity_constant(
            &g,
            ClampedBoundary,
            &id,
            CoercivityMode::Iterative {
                tol: 1e-10,
                max_iter: 2000,
            },
        )
        .unwrap();
        assert!((dense - iter).abs() <= 1e-6 * dense, "{dense} vs {iter}");
    }
}
