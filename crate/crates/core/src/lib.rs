//! Kinks of the nonlinear Schrödinger equation with competing power
//! nonlinearities: profiles, weighted Sturm-Liouville spectra of the
//! linearization, and time evolution with modulation tracking.

pub mod discretize;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod linalg;
pub mod params;
pub mod profile;
pub mod spectra;

pub use discretize::{Boundary, TridiagonalOperator, Which};
pub use error::{Error, Result};
pub use grid::{GridSpec, Variable};
pub use linalg::EigenPair;
pub use params::NonlinearityParams;
pub use profile::{build_general_profile, threshold_r0, x_of_z, z_of_x, KinkProfile, PotentialSet};
