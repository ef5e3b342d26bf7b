//! Quantitative two-photon photoacoustic tomography.
//!
//! Finite-element forward solver for the semilinear diffusion model
//! `-div(γ∇u) + σu + μ|u|u = 0`, the internal datum `H = Γ(σu + μ|u|u)`,
//! its linearization, and two reconstruction methods for the single- and
//! two-photon absorption coefficients (σ, μ):
//!
//! * [`recon_direct`]: one linear solve per datum followed by pointwise
//!   inversion;
//! * [`recon_lsq`]: regularized output least squares with adjoint-state
//!   gradients and projected L-BFGS.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fem;
pub mod frechet;
pub mod forward;
pub mod mesh;
pub mod metrics;
pub mod recon_direct;
pub mod recon_lsq;

pub use error::{Error, Result};
pub use fem::{NodalField, SparseMatrix};
pub use forward::{BoundaryField, BoundarySource, CoefficientSet, NewtonConfig, SolverReport};
pub use frechet::CoefficientPerturbation;
pub use mesh::Mesh;
pub use recon_direct::{DatumMeta, DatumSet, PairReconstruction};
pub use recon_lsq::{LsqConfig, LsqReport, Unknowns};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
