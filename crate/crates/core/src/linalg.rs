//! Small matrix-free linear-algebra helpers shared by the solvers.

use crate::error::{Error, Result};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Deterministic non-degenerate start vector for the iterations below.
fn seed_vector(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let mut z = (i as u64)
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .wrapping_add(1);
            z ^= z >> 30;
            z = z.wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z ^= z >> 27;
            1.0 + (z % 1000) as f64 / 1000.0
        })
        .collect()
}

/// Rayleigh-quotient estimate of the largest eigenvalue of a symmetric
/// positive semidefinite operator.
pub fn power_iteration_max(
    mut apply: impl FnMut(&[f64], &mut [f64]),
    n: usize,
    iters: usize,
) -> f64 {
    let mut x = seed_vector(n);
    let mut y = vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..iters {
        let nx = norm(&x);
        if nx == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|v| *v /= nx);
        apply(&x, &mut y);
        estimate = dot(&x, &y);
        std::mem::swap(&mut x, &mut y);
    }
    estimate.abs()
}

/// Conjugate gradients for a symmetric positive definite operator.
/// Iterates until `|r| <= tol * |b|` (with an absolute floor) and returns
/// the achieved relative residual together with the solution.
pub fn conjugate_gradient(
    mut apply: impl FnMut(&[f64], &mut [f64]),
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let n = b.len();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = tol * b_norm;
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let mut best = rr.sqrt();
    for _ in 0..max_iter {
        if rr.sqrt() <= target {
            return Ok(x);
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        best = best.min(rr_new.sqrt());
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    if rr.sqrt() <= target {
        Ok(x)
    } else {
        Err(Error::LinearSolve {
            iterations: max_iter,
            residual: best / b_norm,
        })
    }
}

/// Smallest eigenvalue of the pencil `(H, W)` with diagonal positive `W`,
/// by inverse power iteration on `B = W^{-1/2} H W^{-1/2}` with CG inner
/// solves. `sqrt_w` holds the square roots of the diagonal of `W`.
pub fn smallest_generalized_eig_iterative(
    mut apply_h: impl FnMut(&[f64], &mut [f64]),
    sqrt_w: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let n = sqrt_w.len();
    // B z = W^{-1/2} H W^{-1/2} z
    let mut tmp_in = vec![0.0; n];
    let mut tmp_out = vec![0.0; n];
    let mut apply_b = move |z: &[f64], out: &mut [f64]| {
        for i in 0..n {
            tmp_in[i] = z[i] / sqrt_w[i];
        }
        apply_h(&tmp_in, &mut tmp_out);
        for i in 0..n {
            out[i] = tmp_out[i] / sqrt_w[i];
        }
    };
    let mut z = seed_vector(n);
    let nz = norm(&z);
    z.iter_mut().for_each(|v| *v /= nz);
    let mut lambda = f64::INFINITY;
    for _ in 0..max_iter {
        let next = conjugate_gradient(&mut apply_b, &z, 1e-10, 200 * n)?;
        let nn = norm(&next);
        if nn == 0.0 {
            return Err(Error::Eigensolve(
                "inverse iteration collapsed to zero".into(),
            ));
        }
        z = next;
        z.iter_mut().for_each(|v| *v /= nn);
        let mut bz = vec![0.0; n];
        apply_b(&z, &mut bz);
        let new_lambda = dot(&z, &bz);
        let done = (new_lambda - lambda).abs() <= tol * new_lambda.abs().max(1e-300);
        lambda = new_lambda;
        if done {
            return Ok(lambda);
        }
    }
    Ok(lambda)
}
