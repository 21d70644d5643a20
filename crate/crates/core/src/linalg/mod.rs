//! Dense complex matrices, the Hermitian eigensolver and seeded sampling.

mod eig;
mod matrix;
mod rng;
mod sample;

pub use eig::{eig_hermitian, operator_norm, HermitianEig, MAX_SWEEPS, OFF_DIAGONAL_THRESHOLD};
pub use matrix::{vdot, vnorm, ComplexMatrix};
pub use num_complex::Complex64;
pub use rng::{mix64, CounterRng};
pub use sample::{
    conjugate_diagonal, haar_unitary, haar_unitary_with, random_effect, random_effect_with,
    random_hermitian_with, random_projection_with, random_unit_vector_with,
};
