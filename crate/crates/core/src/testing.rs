//! Seeded generators for fields and coefficients, shared by the unit tests,
//! the acceptance suite and the benchmarks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coeff::CoefficientTensor;
use crate::field::{ScalarField, TensorField};
use crate::grid::Grid;

/// Deterministic RNG for reproducible corpora.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random clamped scalar field. `smooth` draws a few low-frequency bubble
/// modes; otherwise every interior node gets independent noise.
pub fn random_clamped(grid: &Grid, rng: &mut ChaCha8Rng, smooth: bool) -> ScalarField {
    let mut v = ScalarField::zeros(grid.clone());
    if smooth {
        let coeffs: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let axes = grid.axes().to_vec();
        let dim = grid.dim();
        for node in 0..grid.node_count() {
            if grid.is_boundary(node) {
                continue;
            }
            let [x, y] = grid.node_coord(node);
            let tx = (x - axes[0].min) / (axes[0].max - axes[0].min);
            let ty = if dim == 2 {
                (y - axes[1].min) / (axes[1].max - axes[1].min)
            } else {
                0.5
            };
            let bubble = |t: f64, k: usize| {
                let s = t * (1.0 - t);
                s * s * ((k as f64 + 1.0) * std::f64::consts::PI * t).sin()
            };
            let mut acc = 0.0;
            for (k, c) in coeffs.iter().enumerate() {
                acc += c * bubble(tx, k) * if dim == 2 { bubble(ty, k) } else { 1.0 };
            }
            v.values_mut()[node] = 16.0 * acc;
        }
    } else {
        for node in 0..grid.node_count() {
            if !grid.is_boundary(node) {
                v.values_mut()[node] = rng.random_range(-1.0..1.0);
            }
        }
    }
    v
}

/// Random tensor field with components of order one.
pub fn random_tensor(grid: &Grid, rng: &mut ChaCha8Rng) -> TensorField {
    let mut q = TensorField::zeros(grid.clone());
    for v in q.values_mut() {
        *v = rng.random_range(-1.0..1.0);
    }
    q
}

/// Random admissible coefficient tensor, cycling through the supported
/// representations with moderate condition numbers.
pub fn random_coefficient(grid: &Grid, rng: &mut ChaCha8Rng) -> CoefficientTensor {
    match rng.random_range(0..3u8) {
        0 => CoefficientTensor::identity(),
        1 => {
            let lo = rng.random_range(0.3..0.8);
            let hi = rng.random_range(1.2..4.0);
            let amp = rng.random_range(0.1..1.0);
            let field = ScalarField::from_fn(grid.clone(), |x, y| {
                let mid = 0.5 * (lo + hi);
                let span = 0.5 * (hi - lo);
                mid + span * amp * (3.0 * x + 2.0 * y).sin()
            });
            CoefficientTensor::scalar(field).expect("positive scalar field")
        }
        _ => {
            if grid.tensor_components() == 1 {
                let a = rng.random_range(0.4..3.0);
                CoefficientTensor::constant_matrix(&[vec![a]]).expect("positive 1x1")
            } else {
                let a: f64 = rng.random_range(1.0..3.0);
                let c: f64 = rng.random_range(1.0..3.0);
                let b = rng.random_range(-0.5..0.5) * (a * c).sqrt();
                let e = rng.random_range(0.4..3.0);
                CoefficientTensor::constant_matrix(&[
                    vec![a, b, 0.0],
                    vec![b, c, 0.0],
                    vec![0.0, 0.0, e],
                ])
                .expect("block SPD matrix")
            }
        }
    }
}
