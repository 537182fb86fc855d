use num_complex::Complex64;

use super::field::FieldState;
use crate::error::{invalid, Error, Result};
use crate::params::NonlinearityParams;

/// Largest accepted time step.
pub const MAX_DT: f64 = 0.1;
const FIXED_POINT_TOLERANCE: f64 = 1e-12;
const FIXED_POINT_ITERATIONS: usize = 50;

/// Crank-Nicolson integrator for `i psi_t = psi_xx - f(psi)`,
/// `f(psi) = psi (1 - a|psi|^p + b|psi|^q)`, with the end nodes held fixed.
///
/// The implicit nonlinearity is resolved by fixed-point iteration; the linear
/// part `(i/dt) I - (1/2) D^2` is factored once.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    params: NonlinearityParams,
    dt: f64,
    h: f64,
    // LU of the interior matrix: pivots and multipliers
    pivots: Vec<Complex64>,
    mult: Vec<Complex64>,
    off: f64,
}

impl CrankNicolson {
    pub fn new(params: NonlinearityParams, dt: f64, h: f64, nodes: usize) -> Result<Self> {
        if !(dt > 0.0 && dt <= MAX_DT) {
            return Err(invalid(format!("time step must lie in (0, {MAX_DT}], got {dt}")));
        }
        if nodes < 3 {
            return Err(invalid("need at least one interior node"));
        }
        let m = nodes - 2;
        let diag = Complex64::new(1.0 / (h * h), 1.0 / dt);
        let off = -0.5 / (h * h);
        let mut pivots = Vec::with_capacity(m);
        let mut mult = Vec::with_capacity(m);
        pivots.push(diag);
        for i in 1..m {
            let l = off / pivots[i - 1];
            mult.push(l);
            pivots.push(diag - l * off);
        }
        Ok(Self { params, dt, h, pivots, mult, off })
    }

    pub fn for_state(params: NonlinearityParams, dt: f64, state: &FieldState) -> Result<Self> {
        Self::new(params, dt, state.grid.h(), state.psi.len())
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn f(&self, z: Complex64) -> Complex64 {
        z * self.params.factor_sq(z.norm_sqr())
    }

    fn solve(&self, x: &mut [Complex64]) {
        let m = x.len();
        for i in 1..m {
            let prev = x[i - 1];
            x[i] -= self.mult[i - 1] * prev;
        }
        x[m - 1] /= self.pivots[m - 1];
        for i in (0..m - 1).rev() {
            let next = x[i + 1];
            x[i] = (x[i] - self.off * next) / self.pivots[i];
        }
    }

    /// Advance by one step; returns the number of fixed-point iterations.
    pub fn step(&self, state: &mut FieldState) -> Result<usize> {
        let psi = &state.psi;
        let n = psi.len();
        if n != self.pivots.len() + 2 {
            return Err(invalid("state does not match the integrator size"));
        }
        let inv_h2 = 1.0 / (self.h * self.h);
        let idt = Complex64::new(0.0, 1.0 / self.dt);
        let base: Vec<Complex64> = (1..n - 1)
            .map(|i| {
                let lap = (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) * inv_h2;
                let mut b = idt * psi[i] + 0.5 * lap - 0.5 * self.f(psi[i]);
                if i == 1 {
                    b += 0.5 * psi[0] * inv_h2;
                }
                if i == n - 2 {
                    b += 0.5 * psi[n - 1] * inv_h2;
                }
                b
            })
            .collect();
        let mut guess: Vec<Complex64> = psi[1..n - 1].to_vec();
        let mut next = vec![Complex64::new(0.0, 0.0); n - 2];
        let mut last_change = f64::NAN;
        for it in 1..=FIXED_POINT_ITERATIONS {
            for ((nx, b), g) in next.iter_mut().zip(&base).zip(&guess) {
                *nx = b - 0.5 * self.f(*g);
            }
            self.solve(&mut next);
            let change = next.iter().zip(&guess).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
            if !change.is_finite() {
                return Err(Error::NonFinite("Crank-Nicolson step").at_time(state.t));
            }
            std::mem::swap(&mut guess, &mut next);
            last_change = change;
            if change < FIXED_POINT_TOLERANCE {
                state.psi[1..n - 1].copy_from_slice(&guess);
                state.t += self.dt;
                return Ok(it);
            }
        }
        Err(Error::NoConvergence {
            what: "Crank-Nicolson fixed point",
            iterations: FIXED_POINT_ITERATIONS,
            residual: last_change,
        }
        .at_time(state.t))
    }

    /// One step backwards in time, using the conjugation symmetry of the equation.
    pub fn step_back(&self, state: &mut FieldState) -> Result<usize> {
        conjugate(state);
        state.t = -state.t;
        let it = self.step(state);
        state.t = -state.t;
        conjugate(state);
        it
    }
}

fn conjugate(state: &mut FieldState) {
    for z in state.psi.iter_mut() {
        *z = z.conj();
    }
}

/// One Crank-Nicolson step of size `dt`.
pub fn step_cn(state: &FieldState, dt: f64, params: &NonlinearityParams) -> Result<FieldState> {
    let cn = CrankNicolson::for_state(*params, dt, state)?;
    let mut next = state.clone();
    cn.step(&mut next)?;
    Ok(next)
}
