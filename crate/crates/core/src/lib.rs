//! Isogeometric spectral discretizations of the Laplacian on `[0, 1]^d`.
//!
//! The crate assembles standard IGA, outlier-free IGA and softIGA pencils on
//! uniform tensor-product B-spline meshes, solves the resulting generalized
//! symmetric-definite eigenproblems, and compares the spectra against the
//! continuum eigenvalues and the closed-form discrete ones.
//!
//! softIGA subtracts a scaled penalty on the jumps of the `p`-th derivative
//! across element interfaces from the stiffness form, which lowers the top of
//! the discrete spectrum and with it the condition number of the system.

pub mod analytic;
pub mod assembly;
pub mod banded;
pub mod eigensolve;
pub mod error;
pub mod quadrature;
pub mod spaces;
pub mod spectral_analysis;
pub mod splines;
pub mod tensor;
pub mod verify;

pub use analytic::{EtaChoice, EtaTable, Rational};
pub use assembly::{
    assemble_mass, assemble_softness, assemble_stiffness, build_soft_system, build_system, EtaStatus,
    Method, SoftSystem, SoftnessFaces,
};
pub use banded::SymBandedMatrix;
pub use eigensolve::{generalized_eig, PencilMeta, Spectrum};
pub use error::{Error, Result};
pub use spaces::{build_of_space, build_standard_space, SpaceFlavor, SplineSpace};
pub use spectral_analysis::{ConditionStats, SpectralReport};
pub use splines::{BasisEval, KnotVector, Side};
pub use tensor::{kron_sum_spectrum, TensorSpectrum};
