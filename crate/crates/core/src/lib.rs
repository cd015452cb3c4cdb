//! Numerical toolkit for area-type estimates of univalent functions.
//!
//! The crate is layered bottom-up:
//!
//! * [`elliptic`] complete elliptic integrals and the parameter pack built from `x0`;
//! * [`theta`] the theta function `θ0`, Jacobi's `Z` and `sn`, `cn`, `dn`;
//! * [`green`] the Green-type function of the torus subdomain and its derivative `Q_D`;
//! * [`maps`] the bridges between the torus, the unit disk and the exterior disk;
//! * [`catalog`] univalent test maps with exact derivatives;
//! * [`quadrature`] deterministic adaptive cubature with singular-point handling;
//! * [`inequality`] the verifiers that tie everything together.

// Domain guards use `!(x > a)` so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod elliptic;
pub mod error;
pub mod green;
pub mod inequality;
pub mod maps;
pub mod quadrature;
pub mod theta;

pub use catalog::{catalog, MapClass, UnivalentMap};
pub use elliptic::{complete_e, complete_k, params_from_x0, x0_from_zeta_abs, EllipticParams};
pub use error::{Error, Result};
pub use green::{GreenEvaluator, TorusGeometry};
pub use inequality::{InequalityId, PsiEvaluator, Status, VerificationReport};
pub use maps::{BranchTracker, BridgeMaps};
pub use num_complex::Complex64;
pub use quadrature::{QuadratureSpec, Rect, SingularPoint};
pub use theta::{JacobiContext, Modulus};
