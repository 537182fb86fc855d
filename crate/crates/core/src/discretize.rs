use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grid::{GridSpec, Variable};
use crate::linalg::SymTridiag;
use crate::profile::{KinkProfile, ZCoefficients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Boundary {
    /// Zero ghost value one cell beyond the end node.
    Dirichlet,
    /// Mirror ghost; the end node carries half a control volume.
    Neumann,
}

/// Which linearized operator to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Plus,
    Minus,
}

/// Symmetric tridiagonal pencil `(A, W)` in conductance form.
///
/// `A = diag(potential) + sum_i c_i (e_i - e_{i+1})(e_i - e_{i+1})^T`, so the
/// diagonal is `potential_i + c_{i-1} + c_i` and the off-diagonal is `-c_i`.
/// Keeping the two parts apart lets quadratic forms and residuals avoid the
/// cancellation between `O(1/h^2)` stencil entries.
#[derive(Debug, Clone)]
pub struct TridiagonalOperator {
    pub grid: GridSpec,
    /// Row-sum part: cell-integrated potential plus Dirichlet ghost couplings.
    pub potential: Vec<f64>,
    /// Flux coefficients between neighbours, all positive.
    pub conductance: Vec<f64>,
    /// Diagonal weight, cell-integrated.
    pub weight: Vec<f64>,
    /// Control-volume size in units of `h` (1 inside, 1/2 at a Neumann end).
    pub mass: Vec<f64>,
    pub left: Boundary,
    pub right: Boundary,
}

impl TridiagonalOperator {
    pub fn len(&self) -> usize {
        self.potential.len()
    }

    pub fn is_empty(&self) -> bool {
        self.potential.is_empty()
    }

    pub fn diag(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut d = self.potential[i];
                if i > 0 {
                    d += self.conductance[i - 1];
                }
                if i + 1 < n {
                    d += self.conductance[i];
                }
                d
            })
            .collect()
    }

    pub fn offdiag(&self) -> Vec<f64> {
        self.conductance.iter().map(|c| -c).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.potential.clone()
    }

    /// `A v`, evaluated as potential plus flux differences.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(v.len(), n);
        let mut out: Vec<f64> = self.potential.iter().zip(v).map(|(p, x)| p * x).collect();
        for i in 0..n - 1 {
            let flux = self.conductance[i] * (v[i] - v[i + 1]);
            out[i] += flux;
            out[i + 1] -= flux;
        }
        out
    }

    /// `(A - shift W) v`.
    pub fn apply_shifted(&self, shift: f64, v: &[f64]) -> Vec<f64> {
        let mut out = self.apply(v);
        for ((o, w), x) in out.iter_mut().zip(&self.weight).zip(v) {
            *o -= shift * w * x;
        }
        out
    }

    /// `v^T A v` as a sum of flux energies and potential terms.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mut s: f64 = self.potential.iter().zip(v).map(|(p, x)| p * x * x).sum();
        for i in 0..v.len() - 1 {
            let d = v[i] - v[i + 1];
            s += self.conductance[i] * d * d;
        }
        s
    }

    pub fn weighted_norm_sq(&self, v: &[f64]) -> f64 {
        self.weight.iter().zip(v).map(|(w, x)| w * x * x).sum()
    }

    pub fn rayleigh(&self, v: &[f64]) -> f64 {
        self.quadratic_form(v) / self.weighted_norm_sq(v)
    }

    /// `W^{-1/2} A W^{-1/2}`.
    pub fn scaled(&self) -> SymTridiag {
        let s: Vec<f64> = self.weight.iter().map(|w| 1.0 / w.sqrt()).collect();
        let diag = self.diag().iter().zip(&s).map(|(d, si)| d * si * si).collect();
        let off = self.conductance.iter().enumerate().map(|(i, c)| -c * s[i] * s[i + 1]).collect();
        SymTridiag::new(diag, off)
    }

    /// Magnitude used for relative tolerances: largest Gershgorin radius of `A`.
    pub fn scale(&self) -> f64 {
        let d = self.diag();
        let n = d.len();
        (0..n)
            .map(|i| {
                let mut r = d[i].abs();
                if i > 0 {
                    r += self.conductance[i - 1];
                }
                if i + 1 < n {
                    r += self.conductance[i];
                }
                r
            })
            .fold(0.0, f64::max)
    }

    /// Continuum function sampled onto the nodes as a right-hand side (`mass * f`).
    pub fn load<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.len()).map(|i| self.mass[i] * f(self.grid.node(i))).collect()
    }
}

fn require(grid: &GridSpec, var: Variable) -> Result<()> {
    if grid.variable != var {
        return Err(invalid(format!("expected a {var:?} grid, got {:?}", grid.variable)));
    }
    Ok(())
}

fn z_transition(r: f64, grid: &GridSpec) -> Result<ZCoefficients> {
    require(grid, Variable::Z)?;
    if grid.right != 0.0 {
        return Err(invalid(format!("z grid must end at 0, got {}", grid.right)));
    }
    let coef = ZCoefficients::new(r);
    let z_r = coef.z_r();
    if !(z_r > grid.left && z_r < 0.0) {
        return Err(Error::Domain(format!("z_R = {z_r} for R = {r} lies outside ({}, 0)", grid.left)));
    }
    Ok(coef)
}

// Control volume of node i on a z grid ending at a Neumann point z = 0.
fn z_cell(grid: &GridSpec, i: usize) -> (f64, f64) {
    let h = grid.h();
    let z = grid.node(i);
    (z - 0.5 * h, (z + 0.5 * h).min(0.0))
}

/// Builds `-(a v')' + V v = lambda W v` on `[z_min, 0]` with Dirichlet at the left
/// and Neumann at `z = 0`. `potential(i, lo, hi)` and `weight(i, lo, hi)` return
/// cell means.
fn assemble_z<P, Q>(grid: &GridSpec, potential: P, weight: Q) -> TridiagonalOperator
where
    P: Fn(usize, f64, f64) -> f64,
    Q: Fn(usize, f64, f64) -> f64,
{
    let n = grid.len();
    let h = grid.h();
    let h2 = h * h;
    let mut pot = Vec::with_capacity(n);
    let mut wt = Vec::with_capacity(n);
    let mut mass = Vec::with_capacity(n);
    for i in 0..n {
        let (lo, hi) = z_cell(grid, i);
        let m = (hi - lo) / h;
        mass.push(m);
        pot.push(m * potential(i, lo, hi));
        wt.push(m * weight(i, lo, hi));
    }
    let conductance = (0..n - 1).map(|i| ZCoefficients::diffusion(grid.node(i) + 0.5 * h) / h2).collect();
    pot[0] += ZCoefficients::diffusion(grid.left - 0.5 * h) / h2;
    TridiagonalOperator {
        grid: *grid,
        potential: pot,
        conductance,
        weight: wt,
        mass,
        left: Boundary::Dirichlet,
        right: Boundary::Neumann,
    }
}

/// Cubic-quintic split operator `L_R` in the variable `z`, with weight.
///
/// Nodes use point values of the piecewise coefficients, except the single node
/// whose control volume contains `z_R`, which takes the exact cell means of both
/// branches.
pub fn assemble_lr_z(r: f64, grid: &GridSpec) -> Result<TridiagonalOperator> {
    let coef = z_transition(r, grid)?;
    let z_r = coef.z_r();
    let straddles = |lo: f64, hi: f64| lo <= z_r && z_r < hi;
    Ok(assemble_z(
        grid,
        |i, lo, hi| {
            if straddles(lo, hi) {
                coef.potential_mean(lo, hi)
            } else {
                coef.potential(grid.node(i))
            }
        },
        |i, lo, hi| {
            if straddles(lo, hi) {
                coef.weight_mean(lo, hi)
            } else {
                coef.weight(grid.node(i))
            }
        },
    ))
}

/// Cubic-quintic `L_-` in the variable `z` with the weight of `H_R`.
pub fn assemble_lminus_weighted(r: f64, grid: &GridSpec) -> Result<TridiagonalOperator> {
    let coef = z_transition(r, grid)?;
    let z_r = coef.z_r();
    Ok(assemble_z(
        grid,
        |i, _, _| crate::profile::zright_potential(grid.node(i)),
        |i, lo, hi| {
            if lo <= z_r && z_r < hi {
                coef.weight_mean(lo, hi)
            } else {
                coef.weight(grid.node(i))
            }
        },
    ))
}

fn assemble_x<P, Q>(grid: &GridSpec, right: Boundary, potential: P, weight: Q) -> TridiagonalOperator
where
    P: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
{
    let n = grid.len();
    let h = grid.h();
    let c = 1.0 / (h * h);
    let mut mass = vec![1.0; n];
    if right == Boundary::Neumann {
        mass[n - 1] = 0.5;
    }
    let mut pot: Vec<f64> = (0..n).map(|i| mass[i] * potential(grid.node(i))).collect();
    let wt = (0..n).map(|i| mass[i] * weight(grid.node(i))).collect();
    pot[0] += c;
    if right == Boundary::Dirichlet {
        pot[n - 1] += c;
    }
    TridiagonalOperator {
        grid: *grid,
        potential: pot,
        conductance: vec![c; n - 1],
        weight: wt,
        mass,
        left: Boundary::Dirichlet,
        right,
    }
}

/// Unweighted `-d^2/dx^2 + V_+` or `+ V_-` with Dirichlet ghosts at both ends.
pub fn assemble_lpm_x(which: Which, profile: &KinkProfile, grid: &GridSpec) -> Result<TridiagonalOperator> {
    require(grid, Variable::X)?;
    Ok(match which {
        Which::Plus => assemble_x(grid, Boundary::Dirichlet, |x| profile.vplus(x), |_| 1.0),
        Which::Minus => assemble_x(grid, Boundary::Dirichlet, |x| profile.vminus(x), |_| 1.0),
    })
}

/// Split operator `L_R` on an x grid, Dirichlet left and Neumann right, weight `W_R`.
pub fn assemble_lr_x(profile: &KinkProfile, r: f64, grid: &GridSpec) -> Result<TridiagonalOperator> {
    require(grid, Variable::X)?;
    check_inside(r, grid)?;
    let pot = profile.potentials(r);
    Ok(assemble_x(grid, Boundary::Neumann, |x| pot.v_r(x), |x| pot.w_r(x)))
}

/// `L_-` on an x grid with the weight `W_R`, Dirichlet left and Neumann right.
pub fn assemble_lminus_weighted_x(profile: &KinkProfile, r: f64, grid: &GridSpec) -> Result<TridiagonalOperator> {
    require(grid, Variable::X)?;
    check_inside(r, grid)?;
    let pot = profile.potentials(r);
    Ok(assemble_x(grid, Boundary::Neumann, |x| pot.vminus(x), |x| pot.w_r(x)))
}

fn check_inside(r: f64, grid: &GridSpec) -> Result<()> {
    if !(r > grid.left && r < grid.right) {
        return Err(Error::Domain(format!("R = {r} lies outside the grid ({}, {})", grid.left, grid.right)));
    }
    Ok(())
}
