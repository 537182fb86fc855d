use num_complex::Complex64;

use super::field::{complex_derivative, FieldState};
use crate::grid::GridSpec;
use crate::linalg::{simpson, trapezoid};
use crate::profile::KinkProfile;

/// `int_a^right f dx` from node values: Simpson from the first node at or past
/// `a`, plus the partial cell by linear interpolation.
pub(crate) fn integrate_from(values: &[f64], grid: &GridSpec, a: f64) -> f64 {
    let h = grid.h();
    if a <= grid.left {
        return simpson(values, h).unwrap_or_else(|_| trapezoid(values, h));
    }
    if a >= grid.right {
        return 0.0;
    }
    let j = ((a - grid.left) / h).ceil() as usize;
    let tail = &values[j..];
    let mut s = if tail.len() >= 3 { simpson(tail, h).unwrap() } else { trapezoid(tail, h) };
    let xj = grid.node(j);
    if xj > a && j > 0 {
        let t = (xj - a) / h;
        let fa = values[j] + t * (values[j - 1] - values[j]);
        s += 0.5 * (xj - a) * (fa + values[j]);
    }
    s
}

/// Distance `rho_R(psi, phi)` of the field from the kink `profile`:
/// `||psi' - phi'||^2 + ||psi - phi||^2_{H_R} + || |psi|^2 - phi^2 ||^2_{L^2(R, inf)}`.
pub fn rho_r(state: &FieldState, profile: &KinkProfile, r: f64) -> f64 {
    let grid = &state.grid;
    let h = grid.h();
    let pot = profile.potentials(r);
    let d = complex_derivative(&state.psi, h);
    let nodes = grid.nodes();
    let mut grad = Vec::with_capacity(nodes.len());
    let mut weighted = Vec::with_capacity(nodes.len());
    let mut modulus = Vec::with_capacity(nodes.len());
    for ((&x, z), dz) in nodes.iter().zip(&state.psi).zip(&d) {
        let phi = profile.phi(x);
        grad.push((dz - Complex64::new(profile.phi_prime(x), 0.0)).norm_sqr());
        weighted.push((z - Complex64::new(phi, 0.0)).norm_sqr() * pot.w_r(x));
        let e = z.norm_sqr() - phi * phi;
        modulus.push(e * e);
    }
    simpson(&grad, h).unwrap() + simpson(&weighted, h).unwrap() + integrate_from(&modulus, grid, r)
}

/// `rho_R(e^{i alpha} psi(. + beta), phi)`, evaluated by moving the reference
/// kink instead of the field.
pub fn rho_r_modulated(state: &FieldState, profile: &KinkProfile, r: f64, alpha: f64, beta: f64) -> f64 {
    let rotated = state.gauge(alpha);
    let moved = profile.translated(profile.offset() + beta);
    rho_r(&rotated, &moved, r + beta)
}

/// `eta = |psi|^2 - phi^2` at every node.
pub fn eta(state: &FieldState, profile: &KinkProfile) -> Vec<f64> {
    state.grid.nodes().iter().zip(&state.psi).map(|(&x, z)| z.norm_sqr() - profile.phi(x).powi(2)).collect()
}

/// `sup |eta|` over nodes with `x > r`.
pub fn eta_sup_check(state: &FieldState, profile: &KinkProfile, r: f64) -> f64 {
    state.grid.nodes().iter().zip(eta(state, profile)).filter(|(&x, _)| x > r).fold(0.0, |m, (_, e)| m.max(e.abs()))
}

/// `||psi||_inf + ||psi'||_{L^2}`.
pub fn x1_norm(state: &FieldState) -> f64 {
    let h = state.grid.h();
    let sup = state.psi.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let d: Vec<f64> = complex_derivative(&state.psi, h).iter().map(|z| z.norm_sqr()).collect();
    sup + simpson(&d, h).unwrap().sqrt()
}
