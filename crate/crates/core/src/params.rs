use serde::Serialize;

use crate::error::{invalid, Result};

/// Powers `(p, q)` of the competing nonlinearity `-a|psi|^p psi + b|psi|^q psi`
/// together with the coefficients that make `|psi| = 1` an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlinearityParams {
    p: f64,
    q: f64,
    a: f64,
    b: f64,
}

impl NonlinearityParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite()) {
            return Err(invalid(format!("powers must be finite, got p = {p}, q = {q}")));
        }
        if p < 2.0 {
            return Err(invalid(format!("p must be at least 2, got {p}")));
        }
        if q <= p {
            return Err(invalid(format!("q must exceed p, got p = {p}, q = {q}")));
        }
        let a = q * (p + 2.0) / (2.0 * (q - p));
        let b = p * (q + 2.0) / (2.0 * (q - p));
        Ok(Self { p, q, a, b })
    }

    /// The cubic-quintic case, `a = 4`, `b = 3`.
    pub fn cubic_quintic() -> Self {
        Self { p: 2.0, q: 4.0, a: 4.0, b: 3.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn is_cubic_quintic(&self) -> bool {
        self.p == 2.0 && self.q == 4.0
    }

    /// Decay rate of `1 - phi` as `x -> +inf`.
    pub fn tail_rate(&self) -> f64 {
        (self.p * self.q / 2.0).sqrt()
    }

    /// `g(phi) = (q(1 - phi^p) - p(1 - phi^q)) / (q - p)`, so that `phi'^2 = phi^2 g(phi)`.
    pub fn g(&self, phi: f64) -> f64 {
        let gap = 1.0 - phi;
        if gap.abs() < 0.1 {
            return self.g_of_gap(gap);
        }
        (self.q * (1.0 - pow(phi, self.p)) - self.p * (1.0 - pow(phi, self.q))) / (self.q - self.p)
    }

    /// `g(1 - eps)`, accurate for small `eps`.
    pub fn g_of_gap(&self, eps: f64) -> f64 {
        if eps.abs() < 0.1 {
            eps * eps * self.gap_series(eps)
        } else {
            self.g(1.0 - eps)
        }
    }

    /// `g(1 - eps) / eps^2`, finite as `eps -> 0` with limit `pq/2`.
    pub fn g_over_gap_sq(&self, eps: f64) -> f64 {
        if eps.abs() < 0.1 {
            self.gap_series(eps)
        } else {
            self.g(1.0 - eps) / (eps * eps)
        }
    }

    // Series of g(1-eps)/eps^2 from the binomial expansion of (1-eps)^t.
    fn gap_series(&self, eps: f64) -> f64 {
        let (p, q) = (self.p, self.q);
        let mut cp = p; // C(p, 1)
        let mut cq = q;
        let mut sign = -1.0; // (-1)^(k+1) at k = 2
        let mut power = 1.0;
        let mut sum = 0.0;
        for k in 2..80 {
            let kf = k as f64;
            cp *= (p - kf + 1.0) / kf;
            cq *= (q - kf + 1.0) / kf;
            let term = sign * (q * cp - p * cq) * power;
            sum += term;
            if k > 3 && term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            sign = -sign;
            power *= eps;
        }
        sum / (q - p)
    }

    /// `1 - a s^p + b s^q`; the potential of `L_-` at `s = phi`, and the factor
    /// in `f(psi) = psi (1 - a|psi|^p + b|psi|^q)` at `s = |psi|`.
    pub fn vminus(&self, s: f64) -> f64 {
        1.0 - self.a * pow(s, self.p) + self.b * pow(s, self.q)
    }

    /// `1 - a(p+1) s^p + b(q+1) s^q`.
    pub fn vplus(&self, s: f64) -> f64 {
        1.0 - self.a * (self.p + 1.0) * pow(s, self.p) + self.b * (self.q + 1.0) * pow(s, self.q)
    }

    /// Nonlinear factor `1 - a|psi|^p + b|psi|^q` as a function of `|psi|^2`.
    pub fn factor_sq(&self, s2: f64) -> f64 {
        1.0 - self.a * pow(s2, self.p / 2.0) + self.b * pow(s2, self.q / 2.0)
    }

    /// Potential energy density `P(s2) = s2 - q/(q-p) s2^{(p+2)/2} + p/(q-p) s2^{(q+2)/2}`,
    /// equal to `|psi|^2 g(|psi|)` with `s2 = |psi|^2`.
    pub fn potential_density(&self, s2: f64) -> f64 {
        let (p, q) = (self.p, self.q);
        if self.is_cubic_quintic() {
            let m = 1.0 - s2;
            return s2 * m * m;
        }
        s2 - q / (q - p) * pow(s2, (p + 2.0) / 2.0) + p / (q - p) * pow(s2, (q + 2.0) / 2.0)
    }
}

/// `x^e` using repeated multiplication for small integer exponents.
pub(crate) fn pow(x: f64, e: f64) -> f64 {
    if e == e.trunc() && (0.0..=16.0).contains(&e) {
        x.powi(e as i32)
    } else {
        x.powf(e)
    }
}
