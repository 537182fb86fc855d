use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::grid::GridSpec;
use crate::linalg::simpson;
use crate::profile::KinkProfile;

/// Real and imaginary parts `u`, `v` of a perturbation `phi + u + i v`, with
/// their derivatives, sampled on a grid.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub grid: GridSpec,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Bump {
    amp: f64,
    center: f64,
    width: f64,
}

impl Bump {
    fn value(&self, x: f64) -> f64 {
        let s = (x - self.center) / self.width;
        self.amp * (-s * s).exp()
    }

    fn slope(&self, x: f64) -> f64 {
        let s = (x - self.center) / self.width;
        -2.0 * s / self.width * self.value(x)
    }
}

impl Perturbation {
    pub fn zero(grid: GridSpec) -> Self {
        let n = grid.len();
        Self { grid, u: vec![0.0; n], du: vec![0.0; n], v: vec![0.0; n], dv: vec![0.0; n] }
    }

    /// Sample `u`, `v` and their derivatives from closures.
    pub fn from_fns<U, DU, V, DV>(grid: GridSpec, u: U, du: DU, v: V, dv: DV) -> Self
    where
        U: Fn(f64) -> f64,
        DU: Fn(f64) -> f64,
        V: Fn(f64) -> f64,
        DV: Fn(f64) -> f64,
    {
        let x = grid.nodes();
        Self {
            grid,
            u: x.iter().map(|&t| u(t)).collect(),
            du: x.iter().map(|&t| du(t)).collect(),
            v: x.iter().map(|&t| v(t)).collect(),
            dv: x.iter().map(|&t| dv(t)).collect(),
        }
    }

    /// Sum of three Gaussian bumps in each component with centers in `[-5, 5]`,
    /// widths in `[0.5, 2]`, and sup-norm at most `amplitude`.
    pub fn random_smooth(grid: GridSpec, seed: u64, amplitude: f64) -> Result<Self> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(invalid(format!("amplitude must be finite and non-negative, got {amplitude}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<Bump> {
            (0..3)
                .map(|_| Bump {
                    amp: rng.gen_range(-1.0..1.0) * amplitude / 3.0,
                    center: rng.gen_range(-5.0..5.0),
                    width: rng.gen_range(0.5..2.0),
                })
                .collect()
        };
        let bu = draw(&mut rng);
        let bv = draw(&mut rng);
        let sum =
            |b: &[Bump], x: f64, d: bool| -> f64 { b.iter().map(|k| if d { k.slope(x) } else { k.value(x) }).sum() };
        Ok(Self::from_fns(
            grid,
            |x| sum(&bu, x, false),
            |x| sum(&bu, x, true),
            |x| sum(&bv, x, false),
            |x| sum(&bv, x, true),
        ))
    }
}

/// Both sides of the energy decomposition around the kink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionReport {
    /// `E(phi + u + i v) - E(phi)`.
    pub lhs: f64,
    /// Split form with `L_+` quadratic part left of `R` and `L_-` right of it.
    pub rhs_split: f64,
    /// Global form `Q_-(u) + Q_-(v) + int R(eta)`.
    pub rhs_global: f64,
    pub abs_mismatch_split: f64,
    pub rel_mismatch_split: f64,
    pub abs_mismatch_global: f64,
    pub rel_mismatch_global: f64,
}

/// Evaluates the energy difference directly and through the two
/// decompositions, all with Simpson's rule on the perturbation grid.
pub fn decomposition_check(profile: &KinkProfile, pert: &Perturbation, r: f64) -> Result<DecompositionReport> {
    let grid = &pert.grid;
    let prm = *profile.params();
    let cubic_quintic = prm.is_cubic_quintic();
    let n = grid.len();
    let mut lhs = Vec::with_capacity(n);
    let mut split = Vec::with_capacity(n);
    let mut global = Vec::with_capacity(n);
    for (i, x) in grid.nodes().into_iter().enumerate() {
        let (u, du, v, dv) = (pert.u[i], pert.du[i], pert.v[i], pert.dv[i]);
        let phi = profile.phi(x);
        let d = profile.phi_prime(x);
        let p2 = phi * phi;
        let sigma = u * u + v * v;
        let eta = 2.0 * phi * u + sigma;
        let vm = prm.vminus(phi);
        let vp = prm.vplus(phi);

        let gradient = 2.0 * d * du + du * du + dv * dv;
        lhs.push(gradient + prm.potential_density(p2 + eta) - prm.potential_density(p2));

        let q_minus_u = du * du + vm * u * u;
        let q_minus_v = dv * dv + vm * v * v;
        let remainder = if cubic_quintic {
            (3.0 * p2 - 2.0) * eta * eta + eta * eta * eta
        } else {
            prm.potential_density(p2 + eta) - prm.potential_density(p2) - vm * eta
        };
        global.push(q_minus_u + q_minus_v + remainder);

        split.push(if x < r {
            let q_plus_u = du * du + vp * u * u;
            let cross = if cubic_quintic {
                (3.0 * p2 - 2.0) * sigma * (4.0 * phi * u + sigma) + eta * eta * eta
            } else {
                remainder - (vp - vm) * u * u
            };
            q_plus_u + q_minus_v + cross
        } else {
            q_minus_u + q_minus_v + remainder
        });
    }
    let h = grid.h();
    let lhs = simpson(&lhs, h)?;
    let rhs_split = simpson(&split, h)?;
    let rhs_global = simpson(&global, h)?;
    let rel = |a: f64| if lhs != 0.0 { a / lhs.abs() } else { a };
    let abs_split = (lhs - rhs_split).abs();
    let abs_global = (lhs - rhs_global).abs();
    Ok(DecompositionReport {
        lhs,
        rhs_split,
        rhs_global,
        abs_mismatch_split: abs_split,
        rel_mismatch_split: rel(abs_split),
        abs_mismatch_global: abs_global,
        rel_mismatch_global: rel(abs_global),
    })
}
