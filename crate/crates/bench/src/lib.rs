//! Shared problem builders for the benchmark suite.

use devlab_core::{CoefficientTensor, Grid, ObstacleProblem, ScalarField};

/// Clamped beam pressed onto a flat obstacle.
pub fn contact_beam(nodes: usize) -> ObstacleProblem {
    let grid = Grid::line(0.0, 1.0, nodes).unwrap();
    ObstacleProblem::new(
        ScalarField::from_fn(grid.clone(), |_, _| -5.0),
        ScalarField::from_fn(grid, |_, _| -0.001),
        CoefficientTensor::identity(),
    )
    .unwrap()
}

/// Clamped square plate over a flat obstacle.
pub fn contact_plate(nodes: usize) -> ObstacleProblem {
    let grid = Grid::rectangle((0.0, 1.0), (0.0, 1.0), (nodes, nodes)).unwrap();
    ObstacleProblem::new(
        ScalarField::from_fn(grid.clone(), |_, _| -5.0),
        ScalarField::from_fn(grid, |_, _| -0.0005),
        CoefficientTensor::identity(),
    )
    .unwrap()
}
