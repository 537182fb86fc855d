use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::params::NonlinearityParams;

/// Stationary kink connecting `phi = 0` at `x -> -inf` to `phi = 1` at `x -> +inf`.
///
/// The cubic-quintic kink is evaluated in closed form; other powers use a table
/// built by [`build_general_profile`] and stored in logarithmic variables so that
/// both tails keep full relative accuracy.
#[derive(Debug, Clone)]
pub struct KinkProfile {
    params: NonlinearityParams,
    x0: f64,
    table: Option<ProfileTable>,
}

#[derive(Debug, Clone)]
struct ProfileTable {
    h: f64,
    // ln(phi) at x = -i h
    left: Vec<f64>,
    // ln(1 - phi) at x = i h
    right: Vec<f64>,
    params: NonlinearityParams,
    right_rate: f64,
}

/// One sampled row of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub x: f64,
    pub phi: f64,
    pub phi_prime: f64,
    pub one_minus_phi_sq: f64,
}

impl KinkProfile {
    /// The closed-form cubic-quintic kink `phi^2 = (1 + tanh x)/2`.
    pub fn cubic_quintic() -> Self {
        Self { params: NonlinearityParams::cubic_quintic(), x0: 0.0, table: None }
    }

    /// Closed form for `(2, 4)`, otherwise a table with default span and step.
    pub fn new(params: NonlinearityParams) -> Result<Self> {
        if params.is_cubic_quintic() {
            Ok(Self::cubic_quintic())
        } else {
            build_general_profile(params, (-60.0, 60.0), 2.5e-3)
        }
    }

    pub fn params(&self) -> &NonlinearityParams {
        &self.params
    }

    pub fn offset(&self) -> f64 {
        self.x0
    }

    pub fn is_tabulated(&self) -> bool {
        self.table.is_some()
    }

    /// The same kink translated so that its center sits at `x0`.
    pub fn translated(&self, x0: f64) -> Self {
        Self { x0, ..self.clone() }
    }

    pub fn phi(&self, x: f64) -> f64 {
        let xi = x - self.x0;
        match &self.table {
            None => (1.0 / (1.0 + (-2.0 * xi).exp())).sqrt(),
            Some(t) => match t.log_value(xi) {
                Side::Left(u) => u.exp(),
                Side::Right(w) => 1.0 - w.exp(),
            },
        }
    }

    /// `1 - phi`, without cancellation as `phi -> 1`.
    pub fn one_minus_phi(&self, x: f64) -> f64 {
        let xi = x - self.x0;
        match &self.table {
            None => {
                let m = 1.0 / (1.0 + (2.0 * xi).exp());
                m / (1.0 + self.phi(x))
            }
            Some(t) => match t.log_value(xi) {
                Side::Left(u) => -u.exp_m1(),
                Side::Right(w) => w.exp(),
            },
        }
    }

    /// `1 - phi^2`, without cancellation as `phi -> 1`.
    pub fn one_minus_phi_sq(&self, x: f64) -> f64 {
        match &self.table {
            None => 1.0 / (1.0 + (2.0 * (x - self.x0)).exp()),
            Some(_) => {
                let e = self.one_minus_phi(x);
                e * (2.0 - e)
            }
        }
    }

    pub fn phi_prime(&self, x: f64) -> f64 {
        let phi = self.phi(x);
        if self.table.is_none() {
            return phi * self.one_minus_phi_sq(x);
        }
        let eps = self.one_minus_phi(x);
        if eps < 0.1 {
            phi * eps * self.params.g_over_gap_sq(eps).sqrt()
        } else {
            phi * self.params.g(phi).max(0.0).sqrt()
        }
    }

    /// `phi'' = phi (1 - a phi^p + b phi^q)`.
    pub fn phi_second(&self, x: f64) -> f64 {
        if self.table.is_none() {
            let phi = self.phi(x);
            return self.phi_prime(x) * (1.0 - 3.0 * phi * phi);
        }
        let phi = self.phi(x);
        phi * self.params.vminus(phi)
    }

    pub fn sample(&self, x: f64) -> ProfileSample {
        ProfileSample { x, phi: self.phi(x), phi_prime: self.phi_prime(x), one_minus_phi_sq: self.one_minus_phi_sq(x) }
    }

    pub fn vminus(&self, x: f64) -> f64 {
        self.params.vminus(self.phi(x))
    }

    pub fn vplus(&self, x: f64) -> f64 {
        self.params.vplus(self.phi(x))
    }

    /// Potentials and weight of the split operator with transition point `r`.
    pub fn potentials(&self, r: f64) -> PotentialSet<'_> {
        PotentialSet { profile: self, r, gap_r: self.one_minus_phi_sq(r) }
    }
}

enum Side {
    Left(f64),
    Right(f64),
}

impl ProfileTable {
    fn log_value(&self, xi: f64) -> Side {
        if xi <= 0.0 {
            let s = -xi / self.h;
            let last = self.left.len() - 1;
            if s >= last as f64 {
                // phi ~ C e^x
                return Side::Left(self.left[last] + (xi + last as f64 * self.h));
            }
            let i = s.floor() as usize;
            let t = s - i as f64;
            // the table runs towards -x, so slopes flip sign
            let (y0, y1) = (self.left[i], self.left[i + 1]);
            let (m0, m1) = (-self.left_slope(y0), -self.left_slope(y1));
            Side::Left(hermite(y0, y1, m0 * self.h, m1 * self.h, t))
        } else {
            let s = xi / self.h;
            let last = self.right.len() - 1;
            if s >= last as f64 {
                return Side::Right(self.right[last] - self.kappa() * (xi - last as f64 * self.h));
            }
            let i = s.floor() as usize;
            let t = s - i as f64;
            let (y0, y1) = (self.right[i], self.right[i + 1]);
            let (m0, m1) = (self.right_slope(y0), self.right_slope(y1));
            Side::Right(hermite(y0, y1, m0 * self.h, m1 * self.h, t))
        }
    }

    fn kappa(&self) -> f64 {
        self.right_rate.sqrt()
    }
}

// Shared with the integrator: slopes of the log variables.
impl ProfileTable {
    fn left_slope(&self, u: f64) -> f64 {
        left_rhs(&self.params, u)
    }

    fn right_slope(&self, w: f64) -> f64 {
        right_rhs(&self.params, w)
    }
}

fn hermite(y0: f64, y1: f64, m0: f64, m1: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1
}

const TAIL_SWITCH: f64 = 1e-12;

// d/dx ln(phi) = sqrt(g(phi))
fn left_rhs(params: &NonlinearityParams, u: f64) -> f64 {
    let phi = u.exp();
    if phi < TAIL_SWITCH {
        return 1.0;
    }
    params.g(phi).max(0.0).sqrt()
}

// d/dx ln(1 - phi) = -(1 - eps) sqrt(g(1 - eps)/eps^2)
fn right_rhs(params: &NonlinearityParams, w: f64) -> f64 {
    let eps = w.exp();
    if eps < TAIL_SWITCH {
        return -params.tail_rate();
    }
    -(1.0 - eps) * params.g_over_gap_sq(eps).max(0.0).sqrt()
}

fn rk4(params: &NonlinearityParams, y0: f64, h: f64, steps: usize, f: fn(&NonlinearityParams, f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0;
    out.push(y);
    for _ in 0..steps {
        let k1 = f(params, y);
        let k2 = f(params, y + 0.5 * h * k1);
        let k3 = f(params, y + 0.5 * h * k2);
        let k4 = f(params, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push(y);
    }
    out
}

/// Integrate the first-order equation `phi' = phi sqrt(g(phi))` outward from
/// `phi(0) = 2^{-1/p}` with classical RK4 in the variables `ln phi` (left) and
/// `ln(1 - phi)` (right).
pub fn build_general_profile(params: NonlinearityParams, x_span: (f64, f64), h: f64) -> Result<KinkProfile> {
    let (x_min, x_max) = x_span;
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("step must be positive, got {h}")));
    }
    if !(x_min < 0.0 && x_max > 0.0) {
        return Err(invalid(format!("span must contain 0, got ({x_min}, {x_max})")));
    }
    let phi0 = 0.5f64.powf(1.0 / params.p());
    let nl = (-x_min / h).ceil() as usize;
    let nr = (x_max / h).ceil() as usize;
    let left = rk4(&params, phi0.ln(), -h, nl, left_rhs);
    let right = rk4(&params, (1.0 - phi0).ln(), h, nr, right_rhs);
    if left.iter().chain(right.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("profile integration"));
    }
    Ok(KinkProfile {
        params,
        x0: 0.0,
        table: Some(ProfileTable { h, left, right, params, right_rate: params.p() * params.q() / 2.0 }),
    })
}

/// Smallest `R` with `phi(R)^{q-p} = (p+2)/(q+2)`.
pub fn threshold_r0(profile: &KinkProfile) -> f64 {
    let prm = profile.params();
    if profile.table.is_none() {
        return (1.0f64 / 3.0).atanh() + profile.x0;
    }
    let target = ((prm.p() + 2.0) / (prm.q() + 2.0)).powf(1.0 / (prm.q() - prm.p()));
    let (mut lo, mut hi) = (profile.x0 - 50.0, profile.x0 + 50.0);
    while hi - lo > 1e-15 * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if profile.phi(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `z = (x - ln(2 cosh x))/2`, so that `e^{2z} = phi(x)^2` for the cubic-quintic kink.
pub fn z_of_x(x: f64) -> f64 {
    if x > 0.0 {
        -0.5 * (-2.0 * x).exp().ln_1p()
    } else {
        x - 0.5 * (2.0 * x).exp().ln_1p()
    }
}

/// Inverse of [`z_of_x`], defined for `z < 0`: `x = -ln(e^{-2z} - 1)/2`.
pub fn x_of_z(z: f64) -> Result<f64> {
    if !(z < 0.0) {
        return Err(Error::Domain(format!("x_of_z requires z < 0, got {z}")));
    }
    Ok(-0.5 * (-2.0 * z).exp_m1().ln())
}

/// Potentials and weights of the split operator `L_R`.
#[derive(Debug, Clone, Copy)]
pub struct PotentialSet<'a> {
    profile: &'a KinkProfile,
    r: f64,
    gap_r: f64,
}

impl PotentialSet<'_> {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn vminus(&self, x: f64) -> f64 {
        self.profile.vminus(x)
    }

    pub fn vplus(&self, x: f64) -> f64 {
        self.profile.vplus(x)
    }

    /// `V_+` left of `R`, `V_-` right of it.
    pub fn v_r(&self, x: f64) -> f64 {
        if x < self.r {
            self.vplus(x)
        } else {
            self.vminus(x)
        }
    }

    /// Weight of `H_R`: 1 left of `R`, `(1 - phi^2(x))/(1 - phi^2(R))` right of it.
    pub fn w_r(&self, x: f64) -> f64 {
        if x < self.r {
            1.0
        } else {
            self.profile.one_minus_phi_sq(x) / self.gap_r
        }
    }

    /// Derivative of `phi W_R`.
    pub fn phi_w_r_prime(&self, x: f64) -> f64 {
        if x < self.r {
            self.profile.phi_prime(x)
        } else {
            let phi = self.profile.phi(x);
            let d = self.profile.phi_prime(x);
            (d * self.profile.one_minus_phi_sq(x) - 2.0 * phi * phi * d) / self.gap_r
        }
    }

    /// `1 - phi^2(R)`.
    pub fn gap_at_r(&self) -> f64 {
        self.gap_r
    }
}

/// Coefficients of the cubic-quintic split operator in the variable `z`,
/// where `phi = e^z` and the transition sits at `z_R = z_of_x(R)`.
#[derive(Debug, Clone, Copy)]
pub struct ZCoefficients {
    z_r: f64,
    c_r: f64,
}

impl ZCoefficients {
    pub fn new(r: f64) -> Self {
        let z_r = z_of_x(r);
        Self { z_r, c_r: 1.0 / -(2.0 * z_r).exp_m1() }
    }

    pub fn z_r(&self) -> f64 {
        self.z_r
    }

    /// `1/(1 - phi^2(R))`.
    pub fn c_r(&self) -> f64 {
        self.c_r
    }

    /// Diffusion coefficient `1 - e^{2z}`.
    pub fn diffusion(z: f64) -> f64 {
        -(2.0 * z).exp_m1()
    }

    pub fn potential(&self, z: f64) -> f64 {
        if z <= self.z_r {
            zleft_potential(z)
        } else {
            zright_potential(z)
        }
    }

    pub fn weight(&self, z: f64) -> f64 {
        if z <= self.z_r {
            1.0 / Self::diffusion(z)
        } else {
            self.c_r
        }
    }

    /// Exact mean of the potential over `[lo, hi]`, `lo < hi <= 0`.
    pub fn potential_mean(&self, lo: f64, hi: f64) -> f64 {
        self.mean(lo, hi, zleft_potential_integral, zright_potential_integral, 1.0)
    }

    /// Exact mean of the weight over `[lo, hi]`.
    pub fn weight_mean(&self, lo: f64, hi: f64) -> f64 {
        self.mean(lo, hi, zleft_weight_integral, |z| z, self.c_r)
    }

    /// Exact mean over `[lo, hi]` of `1/(1 - e^{2z})` left of `z_R` and `c_R` right of it.
    fn mean(&self, lo: f64, hi: f64, left: fn(f64) -> f64, right: fn(f64) -> f64, right_scale: f64) -> f64 {
        let mid = self.z_r.clamp(lo, hi);
        let mut total = 0.0;
        if mid > lo {
            total += left(mid) - left(lo);
        }
        if hi > mid {
            total += right_scale * (right(hi) - right(mid));
        }
        total / (hi - lo)
    }
}

/// `(1 - 12 s + 15 s^2)/(1 - s)` with `s = e^{2z}`.
pub fn zleft_potential(z: f64) -> f64 {
    let s = (2.0 * z).exp();
    (1.0 - 12.0 * s + 15.0 * s * s) / -(2.0 * z).exp_m1()
}

/// `1 - 3 e^{2z}`.
pub fn zright_potential(z: f64) -> f64 {
    1.0 - 3.0 * (2.0 * z).exp()
}

// (1 - 12 s + 15 s^2)/(1 - s) = -15 s - 3 + 4/(1 - s)
fn zleft_potential_integral(z: f64) -> f64 {
    -7.5 * (2.0 * z).exp() + z - 2.0 * (-(2.0 * z).exp_m1()).ln()
}

fn zright_potential_integral(z: f64) -> f64 {
    z - 1.5 * (2.0 * z).exp()
}

fn zleft_weight_integral(z: f64) -> f64 {
    z - 0.5 * (-(2.0 * z).exp_m1()).ln()
}
