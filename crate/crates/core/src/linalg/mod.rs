//! Dense complex linear algebra for small quantum states.

pub mod density;
pub mod eigen;
pub mod entropy;
pub mod matrix;

pub use density::{DensityMatrix, PureState, StateFactor};
pub use eigen::{eig_hermitian, eigvals_hermitian, singular_values_3x3};
pub use entropy::{binary_entropy, entropy_of_spectrum, matrix_sqrt_psd, shannon_entropy, von_neumann_entropy};
pub use matrix::{ComplexMatrix, C64};
