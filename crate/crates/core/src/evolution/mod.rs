//! Time evolution of perturbed kinks and the quantities that measure their
//! distance from the kink orbit.

mod decomposition;
mod distance;
mod energy;
mod experiment;
mod field;
mod modulation;
mod stepper;

pub use decomposition::{decomposition_check, DecompositionReport, Perturbation};
pub use distance::{eta, eta_sup_check, rho_r, rho_r_modulated, x1_norm};
pub use energy::{discrete_energy, energy};
pub use experiment::{stability_experiment, ExperimentConfig, LogRow, PerturbationShape, StabilityReport};
pub use field::{derivative, grid_kink, FieldState, GridKink};
pub use modulation::{modulation_fit, modulation_residual, ModulationFit, ModulationJacobian};
pub use stepper::{step_cn, CrankNicolson, MAX_DT};
