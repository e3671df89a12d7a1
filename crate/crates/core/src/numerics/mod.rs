//! Small dense linear algebra and Legendre root finding.

mod eig;
mod lu;
mod matrix;
mod nodes;

pub use eig::eig2;
pub(crate) use eig::roots_from_invariants;
pub use lu::{det_nonsingular, lu_det, lu_solve, Lu};
pub use matrix::{Matrix, Vector};
pub use nodes::{gauss_nodes, legendre_pair, legendre_values, lobatto_nodes};
