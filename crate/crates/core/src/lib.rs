//! Curvature operators of oriented Riemannian four-manifolds and the
//! definite-connection inequalities.
//!
//! - [`curvature`]: block operators `(A, B, C)` on `Λ+ ⊕ Λ-`
//! - [`definite`]: the operator `D = A² − BᵀB`, classification and taming
//! - [`sectional`]: sectional curvature extrema and pinching verification
//! - [`cohom`]: cohomogeneity-one families and their connection paths
//! - [`topology`]: Chern numbers and twistor degrees

pub mod cohom;
pub mod curvature;
pub mod definite;
pub mod error;
pub mod io;
pub mod linalg;
pub mod sampling;
pub mod sectional;
pub mod topology;
pub mod verify;

pub use curvature::{CurvatureOperator, WeylScalarParts};
pub use definite::{classify, d_operator, DefiniteClassification};
pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
