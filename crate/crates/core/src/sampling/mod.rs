//! Haar sampling, squeezing profiles and assembly of random Gaussian states.

mod haar;
mod rng;
mod squeezing;
mod state;

pub use haar::{
    embed_unitary, haar_rows, haar_unitary, hilbert_schmidt_distance, nearby_unitary, passive_rows,
    random_physical_covariance, random_symplectic, unitarity_residual, TOL_EMBED_IMAG, TOL_UNITARY,
};
pub use rng::{derived_seed, stream_rng};
pub use squeezing::{
    build_j_tilde, flat_z_max, sample_squeezing, SqueezingSpec, ZProfile, MAX_REJECTION_ATTEMPTS,
};
pub use state::{
    reduced_covariance, sample_random_state, sample_with_spec, Pipeline, RandomSample,
    RandomStateConfig,
};
