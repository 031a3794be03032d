//! Random energy-bounded Gaussian states and the Gaussian extractable work
//! of their subsystems.
//!
//! - [`phase_space`]: covariance matrices, symplectic spectra, Williamson
//!   normal form, purification and the extractable-work functional.
//! - [`sampling`]: Haar-random passive unitaries, squeezing profiles and
//!   random reduced states.
//! - [`typicality`]: local-thermality statistics, the work bound and tail
//!   estimates.
//! - [`weingarten`]: degree-2 Haar moments in closed form and Monte Carlo
//!   estimates of the same quantities.
//! - [`harness`]: configuration, record output and experiment drivers.

pub mod error;
pub mod harness;
pub mod phase_space;
pub mod sampling;
pub mod stats;
pub mod typicality;
pub mod weingarten;

pub use error::{Error, Result};
pub use phase_space::{CovarianceMatrix, OrthogonalSymplectic, SymplecticMatrix};
