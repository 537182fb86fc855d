use super::field::{complex_derivative, FieldState};
use crate::linalg::simpson;
use crate::params::NonlinearityParams;

/// `E(psi) = int |psi'|^2 + |psi|^2 (q(1 - |psi|^p) - p(1 - |psi|^q))/(q - p) dx`,
/// with fourth-order derivatives and Simpson's rule.
pub fn energy(state: &FieldState, params: &NonlinearityParams) -> f64 {
    let h = state.grid.h();
    let d = complex_derivative(&state.psi, h);
    let density: Vec<f64> =
        state.psi.iter().zip(&d).map(|(z, dz)| dz.norm_sqr() + params.potential_density(z.norm_sqr())).collect();
    simpson(&density, h).expect("grids have at least 17 nodes")
}

/// Lattice energy `sum h |D_+ psi|^2 + sum_trapezoid h P(|psi|^2)`, the
/// Hamiltonian of the semi-discrete system advanced by [`super::CrankNicolson`].
pub fn discrete_energy(state: &FieldState, params: &NonlinearityParams) -> f64 {
    let h = state.grid.h();
    let psi = &state.psi;
    let n = psi.len();
    let kinetic: f64 = psi.windows(2).map(|w| (w[1] - w[0]).norm_sqr()).sum::<f64>() / h;
    let mut pot: f64 = psi[1..n - 1].iter().map(|z| params.potential_density(z.norm_sqr())).sum();
    pot += 0.5 * (params.potential_density(psi[0].norm_sqr()) + params.potential_density(psi[n - 1].norm_sqr()));
    kinetic + h * pot
}
