//! Exact and numeric tools for the large-spectrum expansion of group
//! integrals `int dg exp(i tr Lambda g X g^-1)` over O(k), U(k) and Sp(k).
//!
//! The integral is written as `N * exp(i sum lambda_a x_a) * chi / prod tau_ab^(beta/2)`
//! with `tau_ab = (lambda_a - lambda_b)(x_a - x_b)`, and `chi` is expanded in
//! inverse powers of the `tau_ab`. Modules:
//!
//! - [`series`], [`ypoly`], [`edge`]: exact series in `1/tau` with coefficients polynomial in `y`.
//! - [`recursion`]: closed-form coefficients for `k = 2, 3`.
//! - [`graph`]: the `beta = 4` graph expansion and its deletion rules.
//! - [`pde`]: the annihilating operator and the collocation solver.
//! - [`largey`]: the large-`y` exponent expansion and its identities.
//! - [`oracle`]: Haar sampling and Monte Carlo estimates of the integral.

pub mod edge;
pub mod error;
pub mod gauss;
pub mod graph;
pub mod identities;
pub mod largey;
pub mod linalg;
pub mod oracle;
pub mod pde;
pub mod point;
pub mod rational;
pub mod recursion;
pub mod report;
pub mod series;
pub mod ypoly;

pub use edge::{EdgeIndex, EdgeMonomial, VLabeling};
pub use error::{HizError, Result};
pub use gauss::GaussRational;
pub use point::SpectralPoint;
pub use rational::Rational;
pub use report::{Outcome, VerificationReport};
pub use series::ChiSeries;
pub use ypoly::YPolynomial;
