use num_complex::Complex64;

use super::field::FieldState;
use crate::error::{Error, Result};
use crate::linalg::simpson;
use crate::profile::KinkProfile;

/// Phase and translation that put the field in modulated form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationFit {
    pub alpha: f64,
    pub beta: f64,
    /// Euclidean norm of the constraint map at the solution.
    pub residual: f64,
    pub iterations: usize,
    /// `<Re(e^{i alpha} psi(. + beta)) - phi, phi'>`.
    pub constraint_real: f64,
    /// `<Im(e^{i alpha} psi(. + beta)), phi>_{H_R}`.
    pub constraint_imag: f64,
}

/// The constraint map and its Jacobian at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationJacobian {
    pub value: [f64; 2],
    /// `[[dF1/dalpha, dF1/dbeta], [dF2/dalpha, dF2/dbeta]]`.
    pub jacobian: [[f64; 2]; 2],
}

const TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 25;

/// Evaluates the constraint map with the reference kink moved to `y - beta`.
pub fn modulation_residual(
    state: &FieldState,
    profile: &KinkProfile,
    r: f64,
    alpha: f64,
    beta: f64,
) -> Result<ModulationJacobian> {
    let grid = &state.grid;
    let margin = 0.25 * (grid.right - grid.left);
    if !beta.is_finite() || beta.abs() > margin || !(r + beta > grid.left && r + beta < grid.right) {
        return Err(Error::OutOfRange(beta));
    }
    let moved = profile.translated(profile.offset() + beta);
    let pot = moved.potentials(r + beta);
    let g = Complex64::from_polar(1.0, alpha);
    let n = grid.len();
    let mut cols: [Vec<f64>; 6] = std::array::from_fn(|_| Vec::with_capacity(n));
    for (x, z) in grid.nodes().into_iter().zip(&state.psi) {
        let w = g * z;
        let phi = moved.phi(x);
        let d1 = moved.phi_prime(x);
        let d2 = moved.phi_second(x);
        let wr = pot.w_r(x);
        cols[0].push((w.re - phi) * d1);
        cols[1].push(w.im * phi * wr);
        cols[2].push(-w.im * d1);
        cols[3].push(-w.re * d2 + d1 * d1 + phi * d2);
        cols[4].push(w.re * phi * wr);
        cols[5].push(-w.im * pot.phi_w_r_prime(x));
    }
    let h = grid.h();
    let q: Vec<f64> = cols.iter().map(|c| simpson(c, h)).collect::<Result<_>>()?;
    Ok(ModulationJacobian { value: [q[0], q[1]], jacobian: [[q[2], q[3]], [q[4], q[5]]] })
}

/// Newton iteration for `(alpha, beta)` from `seed`.
pub fn modulation_fit(state: &FieldState, profile: &KinkProfile, r: f64, seed: (f64, f64)) -> Result<ModulationFit> {
    let (mut alpha, mut beta) = seed;
    let mut last = f64::INFINITY;
    for it in 0..=MAX_ITERATIONS {
        let m = modulation_residual(state, profile, r, alpha, beta)?;
        let res = m.value[0].hypot(m.value[1]);
        if !res.is_finite() {
            return Err(Error::NonFinite("modulation fit"));
        }
        if res < TOLERANCE {
            return Ok(ModulationFit {
                alpha,
                beta,
                residual: res,
                iterations: it,
                constraint_real: m.value[0],
                constraint_imag: m.value[1],
            });
        }
        last = res;
        if it == MAX_ITERATIONS {
            break;
        }
        let [[a, b], [c, d]] = m.jacobian;
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        alpha -= (d * m.value[0] - b * m.value[1]) / det;
        beta -= (-c * m.value[0] + a * m.value[1]) / det;
    }
    Err(Error::NoConvergence { what: "modulation fit", iterations: MAX_ITERATIONS, residual: last })
}
