//! Finite-dimensional perturbation theory for dense complex matrices.
//!
//! The crate evaluates resolvent (Neumann) series, eigenvalue and eigenvector
//! perturbation series, Dyson and matrix-exponential series, regularized
//! scattering-matrix entries and their time-ordered diagram decomposition, and
//! checks each of them against an exact linear-algebra oracle: a direct
//! inverse, a dense Hermitian eigensolver, or high-resolution time integration.
//!
//! Module map:
//!
//! * [`matcore`]: matrices, norms, inverse, eigendecomposition, `expm`, contour quadrature
//! * [`resolvent`]: Neumann series with exact remainder, Feynman-parameter integrals
//! * [`spectral`]: eigenvalue/projection coefficients, Schur-complement eigenvector machinery
//! * [`evolution`]: exponential and Dyson series, propagators, Laplace bridge, adiabatic evolution
//! * [`scattering`]: regularized S-matrix entries, their series, Born and Rutherford demos
//! * [`symdiag`]: symmetry block reduction and time-ordered diagrams
//! * [`tensor`]: Kronecker sums, convolution resolvent identities, block inverses
//! * [`io`] and [`ensemble`]: file formats and seeded random test instances

pub mod ensemble;
pub mod error;
pub mod evolution;
pub mod io;
pub mod matcore;
pub mod resolvent;
pub mod scattering;
pub mod spectral;
pub mod symdiag;
pub mod tensor;

pub use error::{Error, Result};
pub use matcore::{c64, CMatrix, CVector, ContourSpec, SpectralDecomposition, C64};
