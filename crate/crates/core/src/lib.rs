//! Quantum mechanics of a charged particle on a magnetized torus in the
//! holomorphic gauge.
//!
//! The crate builds the finite-dimensional Landau levels as theta-function
//! sections of the magnetic line bundle and checks, numerically, the statements
//! that make the construction consistent:
//!
//! - [`geometry`]: natural units and the flux quantization gate `L1 L2 = N pi`.
//! - [`lll_basis`]: the `N` ground states in Fourier and Gaussian (Poisson-dual) form.
//! - [`levels`]: Hermitian structure, quadrature inner products, the creation
//!   operator, the Hamiltonian and the density maps.
//! - [`translations`]: magnetic translations, their projective algebra and the
//!   residual `Z_N x Z_N` symmetry.
//! - [`cocycle`]: transition functions and cocycles on a triangulated torus and
//!   the flux = cocycle-sum identity.
//! - [`cli`]: the runnable front end (reports, grids, the verification suite).

pub mod cli;
pub mod cocycle;
pub mod config;
pub mod error;
pub mod geometry;
pub mod levels;
pub mod lll_basis;
pub mod quadrature;
pub mod tolerances;
pub mod translations;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{dirac_quantize, to_natural, PhysicalConfig, TorusGeometry};
pub use lll_basis::{BoundaryPhases, GroundBasis, Representation, ThetaBasisFunction};
pub use num_complex::Complex64;
pub use quadrature::TorusGrid;
