use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::distance::{eta_sup_check, rho_r, rho_r_modulated, x1_norm};
use super::energy::discrete_energy;
use super::field::{grid_kink, FieldState};
use super::modulation::modulation_fit;
use super::stepper::CrankNicolson;
use crate::error::{invalid, Error, Result};
use crate::grid::GridSpec;
use crate::profile::KinkProfile;

/// Initial perturbation profiles, all `exp(-x^2)` centred at the kink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationShape {
    /// Bump in `Re psi`.
    GaussianRe,
    /// Bump in `Im psi`.
    GaussianIm,
    /// Equal bumps in both components.
    GaussianMix,
}

impl PerturbationShape {
    pub fn name(&self) -> &'static str {
        match self {
            Self::GaussianRe => "gaussian-re",
            Self::GaussianIm => "gaussian-im",
            Self::GaussianMix => "gaussian-mix",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gaussian-re" => Ok(Self::GaussianRe),
            "gaussian-im" => Ok(Self::GaussianIm),
            "gaussian-mix" => Ok(Self::GaussianMix),
            other => {
                Err(invalid(format!("unknown shape {other:?}; expected gaussian-re, gaussian-im or gaussian-mix")))
            }
        }
    }

    fn value(&self, x: f64) -> Complex64 {
        let g = (-x * x).exp();
        match self {
            Self::GaussianRe => Complex64::new(g, 0.0),
            Self::GaussianIm => Complex64::new(0.0, g),
            Self::GaussianMix => Complex64::new(g, g) * std::f64::consts::FRAC_1_SQRT_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub delta: f64,
    pub shape: PerturbationShape,
    pub t_final: f64,
    pub dt: f64,
    pub r: f64,
    pub log_every: f64,
    pub grid: GridSpec,
}

impl ExperimentConfig {
    pub fn new(delta: f64, shape: PerturbationShape) -> Self {
        Self { delta, shape, t_final: 50.0, dt: 0.005, r: 1.0, log_every: 0.5, grid: GridSpec::default_evolution() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(invalid(format!("final time must be positive, got {}", self.t_final)));
        }
        if !(self.log_every > 0.0) {
            return Err(invalid("logging interval must be positive"));
        }
        if !(self.grid.left <= -10.0 && self.grid.right >= 10.0) {
            return Err(invalid("evolution grid must contain [-10, 10]"));
        }
        if !(self.r > self.grid.left + 5.0 && self.r < self.grid.right - 5.0) {
            return Err(invalid(format!("R = {} too close to the grid ends", self.r)));
        }
        Ok(())
    }
}

/// One logged time slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogRow {
    pub t: f64,
    pub energy: f64,
    pub rho_modulated: f64,
    pub alpha: f64,
    pub beta: f64,
    pub eta_sup: f64,
    /// Distance without modulation.
    pub rho_raw: f64,
    pub x1_norm: f64,
    /// Larger of the two constraint inner products after the fit.
    pub constraint: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub config: ExperimentConfig,
    /// Scale applied to the shape so that `rho_R(psi_0, phi) = delta^2`.
    pub amplitude: f64,
    pub rho_initial: f64,
    pub rows: Vec<LogRow>,
    /// `max_t rho_modulated / delta^2`.
    pub ratio: f64,
    /// `max_t |E(t) - E(0)| / max(|E(0)|, 1)`.
    pub energy_drift: f64,
    pub max_constraint: f64,
    /// `max_t eta_sup / sqrt(rho_modulated)`.
    pub eta_ratio: f64,
    pub x1_growth: f64,
}

fn perturbed(kink: &FieldState, shape: PerturbationShape, amplitude: f64) -> FieldState {
    let mut s = kink.clone();
    for (z, x) in s.psi.iter_mut().zip(kink.grid.nodes()) {
        *z += amplitude * shape.value(x);
    }
    s
}

/// Scale of `shape` giving `rho_R = delta^2` to within 0.1%.
fn calibrate(kink: &FieldState, profile: &KinkProfile, cfg: &ExperimentConfig) -> Result<(f64, f64)> {
    let target = cfg.delta * cfg.delta;
    let rho = |a: f64| rho_r(&perturbed(kink, cfg.shape, a), profile, cfg.r);
    let base = rho(0.0);
    let mut a = cfg.delta / (rho(1.0) - base).sqrt();
    for _ in 0..50 {
        let value = rho(a);
        if ((value - target) / target).abs() < 1e-3 {
            return Ok((a, value));
        }
        // rho - base grows roughly like a^2
        a *= ((target - base) / (value - base)).sqrt();
    }
    Err(Error::NoConvergence { what: "amplitude calibration", iterations: 50, residual: rho(a) - target })
}

/// Evolve a perturbed kink and record its modulated distance from the orbit.
pub fn stability_experiment(profile: &KinkProfile, cfg: &ExperimentConfig) -> Result<StabilityReport> {
    cfg.validate()?;
    let prm = *profile.params();
    let kink = grid_kink(profile, &cfg.grid)?.state(cfg.grid)?;
    let (amplitude, rho_initial) = calibrate(&kink, profile, cfg)?;
    let mut state = perturbed(&kink, cfg.shape, amplitude);
    let cn = CrankNicolson::for_state(prm, cfg.dt, &state)?;
    let steps = (cfg.t_final / cfg.dt).round() as usize;
    let stride = ((cfg.log_every / cfg.dt).round() as usize).max(1);
    let e0 = discrete_energy(&state, &prm);
    let x1_0 = x1_norm(&state);
    let mut rows = Vec::with_capacity(steps / stride + 2);
    let mut seed = (0.0, 0.0);
    for k in 0..=steps {
        if k % stride == 0 || k == steps {
            let fit = modulation_fit(&state, profile, cfg.r, seed).map_err(|e| e.at_time(state.t))?;
            seed = (fit.alpha, fit.beta);
            let rho_mod = rho_r_modulated(&state, profile, cfg.r, fit.alpha, fit.beta);
            let moved = profile.translated(profile.offset() + fit.beta);
            let rotated = state.gauge(fit.alpha);
            rows.push(LogRow {
                t: state.t,
                energy: discrete_energy(&state, &prm),
                rho_modulated: rho_mod,
                alpha: fit.alpha,
                beta: fit.beta,
                eta_sup: eta_sup_check(&rotated, &moved, cfg.r + fit.beta),
                rho_raw: rho_r(&state, profile, cfg.r),
                x1_norm: x1_norm(&state),
                constraint: fit.constraint_real.abs().max(fit.constraint_imag.abs()),
            });
        }
        if k < steps {
            cn.step(&mut state)?;
        }
    }
    let target = cfg.delta * cfg.delta;
    let ratio = rows.iter().map(|r| r.rho_modulated / target).fold(0.0, f64::max);
    let energy_drift = rows.iter().map(|r| (r.energy - e0).abs()).fold(0.0, f64::max) / e0.abs().max(1.0);
    let max_constraint = rows.iter().map(|r| r.constraint).fold(0.0, f64::max);
    let eta_ratio =
        rows.iter().filter(|r| r.rho_modulated > 0.0).map(|r| r.eta_sup / r.rho_modulated.sqrt()).fold(0.0, f64::max);
    let x1_growth = rows.iter().map(|r| r.x1_norm).fold(0.0, f64::max) / x1_0;
    Ok(StabilityReport {
        config: *cfg,
        amplitude,
        rho_initial,
        rows,
        ratio,
        energy_drift,
        max_constraint,
        eta_ratio,
        x1_growth,
    })
}
