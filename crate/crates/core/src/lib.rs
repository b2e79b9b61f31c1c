//! Green functions of linear differential operators on bounded 1D/2D domains,
//! assembled from free-space fundamental solutions under general linear
//! boundary conditions (local or nonlocal, homogeneous or inhomogeneous).
//!
//! The construction works entirely on the boundary: the boundary operator is
//! composed with the fundamental solution and its adjoint to form a
//! boundary-response matrix; inverting that matrix yields a boundary density
//! whose potential corrects the fundamental solution into the Green function.
//!
//! ```
//! use greenbc::prelude::*;
//!
//! let fs = FundamentalSolution::new(OperatorSpec::helmholtz_1d(1.0)).unwrap();
//! let domain = Domain::interval(0.0, 1.0).unwrap();
//! let bd = discretize_boundary(&domain, 2).unwrap();
//! let gop = dirichlet_green(&fs, &bd).unwrap();
//! let g = gop.eval_g(&Point::d1(0.25), &Point::d1(0.75)).unwrap();
//! let exact = -(0.25f64).sin().powi(2) / 1f64.sin();
//! assert!((g.re - exact).abs() < 1e-12);
//! ```

pub mod assembly;
pub mod boundary;
pub mod bvp;
pub mod error;
pub mod fundamental;
pub mod geometry;
mod linalg;
pub mod oracle;
pub mod potential;
pub mod recursive;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
/// Dense complex row vector.
pub type CRowVector = nalgebra::RowDVector<C64>;

/// Condition estimates above this value mark the boundary-response matrix as ill-posed.
pub const ILL_POSED_THRESHOLD: f64 = 1e12;

pub mod prelude {
    pub use crate::assembly::{
        assemble_g, dirichlet_green, Density, GMatrix, GreenFunction, GreenOperator, Method,
        Target,
    };
    pub use crate::boundary::{
        trace_e, BoundaryCondition, BoundaryConditionSet, BoundaryFunction, ResolvedConditions,
        SpinorBoundaryFunction, Support, Which,
    };
    pub use crate::bvp::{
        residual_report, solve_bvp, BoundaryData, BoundaryDatum, FieldSolution, ResidualReport,
        SourceField,
    };
    pub use crate::fundamental::{
        AdjointKernel, Arg, Branch, FundamentalSolution, Kernel, OperatorSpec,
    };
    pub use crate::geometry::{
        discretize_boundary, discretize_volume, BoundaryDiscretization, Curve, Domain, Point,
        VolumeQuadrature,
    };
    pub use crate::oracle::{fd_solve, jump_check, AnalyticGreen, FdSolution, FdSolver1D};
    pub use crate::recursive::{
        block_inverse, recursive_green, recursive_green_ordered, BlockMatrix2x2, RecursiveGreen,
        RecursiveState,
    };
    pub use crate::{CMatrix, CRowVector, CVector, Error, Result, C64};
}
