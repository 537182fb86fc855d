use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::{GridSpec, Variable};
use crate::linalg::TridiagLu;
use crate::profile::KinkProfile;

/// Complex field on a uniform x grid. The end nodes are held fixed in time.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: GridSpec,
    pub psi: Vec<Complex64>,
    pub t: f64,
}

impl FieldState {
    pub fn new(grid: GridSpec, psi: Vec<Complex64>, t: f64) -> Result<Self> {
        if grid.variable != Variable::X {
            return Err(invalid("fields live on x grids"));
        }
        if psi.len() != grid.len() {
            return Err(invalid(format!("field has {} nodes, grid has {}", psi.len(), grid.len())));
        }
        if psi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("field state"));
        }
        Ok(Self { grid, psi, t })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: GridSpec, f: F) -> Result<Self> {
        let psi = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, psi, 0.0)
    }

    /// The kink sampled at the nodes.
    pub fn sampled_kink(profile: &KinkProfile, grid: GridSpec) -> Result<Self> {
        Self::from_fn(grid, |x| Complex64::new(profile.phi(x), 0.0))
    }

    pub fn modulus_sq(&self) -> Vec<f64> {
        self.psi.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn gauge(&self, theta: f64) -> Self {
        let g = Complex64::from_polar(1.0, theta);
        Self { psi: self.psi.iter().map(|z| z * g).collect(), ..self.clone() }
    }

    pub fn max_distance(&self, other: &Self) -> f64 {
        self.psi.iter().zip(&other.psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Fourth-order first derivative on a uniform grid, one-sided at the ends.
pub fn derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "need at least 5 nodes");
    let mut d = vec![0.0; n];
    let c = 1.0 / (12.0 * h);
    d[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    d[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for i in 2..n - 2 {
        d[i] = c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    }
    let m = n - 1;
    d[m] = -c * (-25.0 * f[m] + 48.0 * f[m - 1] - 36.0 * f[m - 2] + 16.0 * f[m - 3] - 3.0 * f[m - 4]);
    d[m - 1] = -c * (-3.0 * f[m] - 10.0 * f[m - 1] + 18.0 * f[m - 2] - 6.0 * f[m - 3] + f[m - 4]);
    d
}

pub(crate) fn complex_derivative(psi: &[Complex64], h: f64) -> Vec<Complex64> {
    let re: Vec<f64> = psi.iter().map(|z| z.re).collect();
    let im: Vec<f64> = psi.iter().map(|z| z.im).collect();
    derivative(&re, h).into_iter().zip(derivative(&im, h)).map(|(a, b)| Complex64::new(a, b)).collect()
}

/// Stationary kink of the discrete equation `D^2 phi = phi (1 - a phi^p + b phi^q)`.
#[derive(Debug, Clone)]
pub struct GridKink {
    pub phi: Vec<f64>,
    /// Node held at the continuum value to fix the translation.
    pub pinned: usize,
    /// Residual of the discrete equation at the pinned node.
    pub pinned_residual: f64,
    /// Largest residual at the remaining interior nodes.
    pub max_residual: f64,
}

/// Discrete kink with end values and the node nearest the kink center taken
/// from the continuum profile. Each side is solved by Newton's method.
pub fn grid_kink(profile: &KinkProfile, grid: &GridSpec) -> Result<GridKink> {
    let n = grid.len();
    let h = grid.h();
    let h2 = h * h;
    let prm = *profile.params();
    let nodes = grid.nodes();
    let pinned = ((profile.offset() - grid.left) / h).round().clamp(1.0, (n - 2) as f64) as usize;
    let mut phi: Vec<f64> = nodes.iter().map(|&x| profile.phi(x)).collect();
    let residual = |phi: &[f64], i: usize| (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / h2 - phi[i] * prm.vminus(phi[i]);
    for (lo, hi) in [(1usize, pinned), (pinned + 1, n - 1)] {
        if hi <= lo {
            continue;
        }
        let mut converged = false;
        for _ in 0..40 {
            let res: Vec<f64> = (lo..hi).map(|i| residual(&phi, i)).collect();
            let diag: Vec<f64> = (lo..hi).map(|i| 2.0 / h2 + prm.vplus(phi[i])).collect();
            let off = vec![-1.0 / h2; hi - lo - 1];
            let lu = TridiagLu::factor(&diag, &off, 1e-300)?;
            let delta = lu.solve(&res);
            let step = delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
            for (k, d) in delta.iter().enumerate() {
                phi[lo + k] += d;
            }
            if step < 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            let worst = (lo..hi).map(|i| residual(&phi, i).abs()).fold(0.0, f64::max);
            return Err(Error::NoConvergence { what: "discrete kink", iterations: 40, residual: worst });
        }
    }
    let pinned_residual = residual(&phi, pinned).abs();
    let max_residual = (1..n - 1).filter(|&i| i != pinned).map(|i| residual(&phi, i).abs()).fold(0.0, f64::max);
    Ok(GridKink { phi, pinned, pinned_residual, max_residual })
}

impl GridKink {
    pub fn state(&self, grid: GridSpec) -> Result<FieldState> {
        FieldState::new(grid, self.phi.iter().map(|&p| Complex64::new(p, 0.0)).collect(), 0.0)
    }
}
