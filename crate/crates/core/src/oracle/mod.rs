//! Floating-point ground truth: Haar sampling, Monte Carlo group integrals,
//! the unitary determinant formula and reconstruction of the full integral
//! from an exact series.

pub mod det;
pub mod haar;
pub mod mc;
pub mod numeric;
pub mod quaternion;
pub mod reconstruct;

pub use det::hciz_unitary_det;
pub use haar::{Ensemble, HaarSample};
pub use mc::{mc_group_integral, McConfig, MCEstimate};
pub use numeric::pde_residual_numeric;
pub use quaternion::Quaternion;
pub use reconstruct::{reconstruct_full_integral, PermutationWeights};
