//! Beltrami coefficients on grids and the FFT solver for the normalized solution.

pub mod fft;
pub mod field;
pub mod snapshot;
pub mod solver;
pub mod transforms;

pub use field::BeltramiField;
pub use snapshot::{read_snapshot, write_snapshot, SnapshotKind};
pub use solver::{deviation_profile, iteration_bound, mu_for_modulus, mu_sequence, solve_beltrami, DeviationProfile, QCMapApprox};
pub use transforms::{beurling_multiplier, beurling_multiplier_periodic, beurling_transform, cauchy_transform, Transforms};
