//! Problem fixtures shared by the benchmarks.

use std::f64::consts::PI;

use greenbc::prelude::*;

pub fn unit_interval() -> BoundaryDiscretization {
    discretize_boundary(&Domain::interval(0.0, 1.0).unwrap(), 2).unwrap()
}

pub fn unit_disk(n: usize) -> BoundaryDiscretization {
    discretize_boundary(&Domain::circle([0.0, 0.0], 1.0).unwrap(), n).unwrap()
}

pub fn laplace() -> FundamentalSolution {
    FundamentalSolution::new(OperatorSpec::Laplace2D).unwrap()
}

pub fn helmholtz_1d(k: f64) -> FundamentalSolution {
    FundamentalSolution::new(OperatorSpec::helmholtz_1d(k)).unwrap()
}

/// Dirichlet data on the upper and lower half circles as two conditions.
pub fn half_circle_arcs() -> BoundaryConditionSet {
    BoundaryConditionSet::new(vec![
        BoundaryCondition::dirichlet_2d(Support::Arc { start: 0.0, end: PI }),
        BoundaryCondition::dirichlet_2d(Support::Arc { start: PI, end: 2.0 * PI }),
    ])
    .unwrap()
}
