//! Symplectic Runge-Kutta and partitioned Runge-Kutta methods, their
//! structure-preservation step-size regions on linear Hamiltonian model
//! problems, and fixed-point classification of the discrete dynamics they
//! induce.
//!
//! The numerical core is generic over [`Scalar`] (`f32`, `f64` and the
//! double-double [`Dd`]). The aliases below fix the working precision for the
//! common cases.

// Guards are written as `!(x > 0)` so that NaN is rejected along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod composition;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod method;
pub mod numerics;
#[cfg(test)]
mod properties;
pub mod region;
pub mod scalar;
pub mod tableau;

pub use composition::{compose_step, triple_jump, CompositionScheme};
pub use dynamics::{
    classify, classify_system, discrete_jacobian, simulate, EquilibriumClass, EquilibriumReport, ModelProblem,
    ProblemKind, StepMap, Structure, SystemReport, Trajectory,
};
pub use error::{Error, Result};
pub use method::{catalog, Method};
pub use numerics::{eig2, gauss_nodes, lobatto_nodes, lu_det, lu_solve, Matrix, Vector};
pub use region::{find_region, Kind, RegionResult, ScanConfig, SpectralReport};
pub use scalar::{Dd, Scalar};
pub use tableau::{
    check_sprk_symplectic, check_srk_symplectic, gauss, lobatto_iiia, lobatto_iiib, lobatto_pair, symplectic_euler,
    ButcherTableau, PartitionedPair,
};

pub type Tableau = ButcherTableau<f64>;
pub type TableauDd = ButcherTableau<Dd>;
pub type Pair = PartitionedPair<f64>;
pub type PairDd = PartitionedPair<Dd>;
pub type Scheme = CompositionScheme<f64>;
pub type Map = StepMap<f64>;
pub type Problem = ModelProblem<f64>;
pub type Region = RegionResult<f64>;
pub type RegionDd = RegionResult<Dd>;
