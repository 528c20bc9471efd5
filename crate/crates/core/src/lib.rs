//! Explicit integral-formula solutions of the ∂̄-equation `λ = ∂̄g` on
//! weighted homogeneous (possibly singular) subvarieties of ℂⁿ.
//!
//! The crate is organised bottom-up:
//!
//! * [`variety`]: weighted homogeneous polynomials, the weighted scaling
//!   action `s^β * z`, membership/regularity tests and Gauss–Newton projection.
//! * [`quadrature`]: planar integrals `∫_ℂ K(w) dw∧dw̄` of compactly supported
//!   kernels with integrable point singularities.
//! * [`charts`]: generalized-cone parametrizations `Π(s, x)` around regular
//!   points and pullbacks of (0,1)-forms through them.
//! * [`form`]: (0,1)-forms `λ = Σ f_k dz̄_k` with compact support.
//! * [`solver`]: the solution operators (direct, scaled, L², weighted
//!   Cauchy–Pompeiu) and the Θ-map reduction from weighted varieties to cones.
//! * [`measure`]: Monte Carlo surface integrals on cones, link sampling and a
//!   projected-path proxy for the intrinsic distance.
//! * [`verify`]: empirical checks of the solution property and of the Hölder
//!   and L² estimates.
//! * [`cli`]: TOML job configuration and JSON/CSV reports.

pub mod charts;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod form;
pub mod linalg;
pub mod measure;
pub mod quadrature;
pub mod solver;
pub mod variety;
pub mod verify;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use form::ZeroOneForm;
pub use quadrature::QuadratureParams;
pub use variety::{SparsePolynomial, Variety, Weights};
