//! Quantum coherence measures of finite-dimensional density matrices.
//!
//! Six measures are provided: the relative entropy of coherence `C_r`, the
//! geometric coherence `C_g`, the min- and max-entropies of coherence
//! `C_min`/`C_max`, the coherence of formation `C_f` and the coherence rank
//! monotone `C_0`.
//!
//! `C_min` and `C_max` are computed twice: once as a direct optimization over
//! incoherent states and once as the conditional min/max entropy of the
//! classical-quantum state obtained by dephasing a purification. Both routes
//! are small semidefinite programs solved by the interior-point solver in
//! [`sdp`]; their disagreement is reported as a self-check.
//!
//! Module layout:
//!
//! - [`linalg`]: dense complex matrices, Jacobi eigendecomposition, density
//!   matrices, purification, fidelity.
//! - [`sdp`]: primal-dual interior-point solver over real symmetric cones with
//!   a Hermitian-to-real embedding.
//! - [`entropies`]: von Neumann, relative and Rényi divergences, conditional
//!   entropies (including the SDP-based min/max entropies).
//! - [`coherence`]: the measures, the dephasing pipeline, convex-roof search
//!   and the operational quantities `p_guess`/`p_secr`.

#![forbid(unsafe_code)]

pub mod coherence;
pub mod entropies;
mod error;
pub mod linalg;
pub mod sdp;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, PurifiedState, C64};
