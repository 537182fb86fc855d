//! Eigenvalues of the split operator `L_R`, the scalar function `F(lambda)`
//! that decides the sign of the constrained ground eigenvalue, and the
//! spectrum of the linearized evolution.

use rayon::prelude::*;
use serde::Serialize;

use crate::discretize::{assemble_lpm_x, assemble_lr_x, assemble_lr_z, TridiagonalOperator, Which};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, Variable};
use crate::linalg::{
    dot, lowest_eigenpairs, simpson, thomas_solve, tridiag_eigh, tridiag_eigvec, tridiagonalize, DenseSymmetric,
    EigenPair, DENSE_LIMIT,
};
use crate::profile::{x_of_z, z_of_x, KinkProfile};

/// One row of an R-scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionRow {
    pub r: f64,
    pub z_r: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub f0: f64,
    pub product: f64,
}

/// `F(lambda) = <(L_R - lambda W_R)^{-1} phi', phi'>` in the variable `z`,
/// where the right-hand side becomes `e^z`.
///
/// The ground state `v_1` is split off analytically,
/// `F(lambda) = c_1 <v_1, e^z> / (lambda_1 - lambda) + F_rest(lambda)`,
/// so values near the pole keep their accuracy.
#[derive(Debug, Clone)]
pub struct SpectralFunction {
    r: f64,
    op: TridiagonalOperator,
    pairs: Vec<EigenPair>,
    rhs: Vec<f64>,
    e_z: Vec<f64>,
    coupling: f64,
    pole_residue: f64,
}

impl SpectralFunction {
    pub fn new(r: f64, grid: &GridSpec) -> Result<Self> {
        let op = assemble_lr_z(r, grid)?;
        let pairs = lowest_eigenpairs(&op, 3)?;
        let e_z: Vec<f64> = grid.nodes().iter().map(|z| z.exp()).collect();
        let rhs = op.load(f64::exp);
        let v1 = &pairs[0].vector;
        let coupling = dot(v1, &rhs);
        let overlap: Vec<f64> = v1.iter().zip(&e_z).map(|(a, b)| a * b).collect();
        let pole_residue = coupling * simpson(&overlap, grid.h())?;
        Ok(Self { r, op, pairs, rhs, e_z, coupling, pole_residue })
    }

    pub fn operator(&self) -> &TridiagonalOperator {
        &self.op
    }

    pub fn eigenpairs(&self) -> &[EigenPair] {
        &self.pairs
    }

    pub fn lambda1(&self) -> f64 {
        self.pairs[0].value
    }

    fn guard(&self, lambda: f64) -> Result<()> {
        for p in &self.pairs {
            let d = (lambda - p.value).abs();
            if d < 1e-8 {
                return Err(Error::NearSingular { row: p.sturm_index, pivot: d });
            }
        }
        Ok(())
    }

    /// The regular part of `F`, with the ground state projected out.
    pub fn f_rest(&self, lambda: f64) -> Result<f64> {
        let v1 = &self.pairs[0].vector;
        let w = &self.op.weight;
        let rhs: Vec<f64> =
            self.rhs.iter().zip(v1.iter().zip(w)).map(|(b, (v, wi))| b - wi * v * self.coupling).collect();
        let mut u = thomas_solve(&self.op, lambda, &rhs)?.x;
        let c: f64 = u.iter().zip(v1.iter().zip(w)).map(|(x, (v, wi))| x * v * wi).sum();
        for (x, v) in u.iter_mut().zip(v1) {
            *x -= c * v;
        }
        let prod: Vec<f64> = u.iter().zip(&self.e_z).map(|(a, b)| a * b).collect();
        simpson(&prod, self.op.grid.h())
    }

    pub fn f(&self, lambda: f64) -> Result<f64> {
        self.guard(lambda)?;
        Ok(self.pole_residue / (self.lambda1() - lambda) + self.f_rest(lambda)?)
    }

    /// Plain evaluation by a single solve, without deflation.
    pub fn f_direct(&self, lambda: f64) -> Result<f64> {
        self.guard(lambda)?;
        let u = thomas_solve(&self.op, lambda, &self.rhs)?.x;
        let prod: Vec<f64> = u.iter().zip(&self.e_z).map(|(a, b)| a * b).collect();
        simpson(&prod, self.op.grid.h())
    }

    pub fn row(&self) -> Result<CriterionRow> {
        let lambda1 = self.lambda1();
        let rest = self.f_rest(0.0)?;
        self.guard(0.0)?;
        Ok(CriterionRow {
            r: self.r,
            z_r: z_of_x(self.r),
            lambda1,
            lambda2: self.pairs[1].value,
            lambda3: self.pairs[2].value,
            f0: self.pole_residue / lambda1 + rest,
            product: self.pole_residue + lambda1 * rest,
        })
    }
}

/// `F(lambda)` for the split operator at transition point `r`.
pub fn f_of_lambda(r: f64, lambda: f64, grid: &GridSpec) -> Result<f64> {
    SpectralFunction::new(r, grid)?.f(lambda)
}

/// Lowest three eigenvalues and `F_R(0)` at one transition point.
pub fn criterion_row(r: f64, grid: &GridSpec) -> Result<CriterionRow> {
    SpectralFunction::new(r, grid)?.row()
}

/// Outcome of one scan point; failures do not abort the scan.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub r: f64,
    pub outcome: std::result::Result<CriterionRow, Error>,
}

/// Rows for every `R`, computed in parallel and sorted by `R`.
pub fn criterion_scan(r_values: &[f64], grid: &GridSpec) -> Vec<ScanRow> {
    let mut rows: Vec<ScanRow> = r_values.par_iter().map(|&r| ScanRow { r, outcome: criterion_row(r, grid) }).collect();
    rows.sort_by(|a, b| a.r.total_cmp(&b.r));
    rows
}

/// Evenly spaced `R` values from `min` to `max` inclusive.
pub fn r_ladder(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && min <= max && min.is_finite() && max.is_finite()) {
        return Err(Error::InvalidParameter(format!("need min <= max and step > 0, got {min}, {max}, {step}")));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| min + i as f64 * step).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroundKind {
    /// `F` changes sign below `min(lambda_2, 1)`.
    Root,
    /// `F` stays negative up to the edge `min(lambda_2, 1)`, which is then
    /// the constrained ground eigenvalue.
    ContinuumEdge,
}

/// Lowest eigenvalue of `L_R` restricted to the orthogonal complement of `phi'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstrainedGround {
    pub r: f64,
    pub lambda0: f64,
    pub kind: GroundKind,
    pub f_at_lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub f0: f64,
}

pub fn constrained_ground_eigenvalue(r: f64, grid: &GridSpec) -> Result<ConstrainedGround> {
    let sf = SpectralFunction::new(r, grid)?;
    constrained_ground_from(&sf)
}

pub fn constrained_ground_from(sf: &SpectralFunction) -> Result<ConstrainedGround> {
    let lambda1 = sf.lambda1();
    let lambda2 = sf.pairs[1].value;
    if !(lambda1 < 0.0 && lambda2 > 0.0) {
        return Err(Error::Criterion(format!("need lambda1 < 0 < lambda2, got {lambda1} and {lambda2}")));
    }
    let f0 = sf.f(0.0)?;
    if !(f0 < 0.0) {
        return Err(Error::Criterion(format!("F(0) = {f0} is not negative")));
    }
    let edge = lambda2.min(1.0);
    let hi = if lambda2 <= 1.0 { lambda2 - 1e-7 * lambda2.max(1.0) } else { 1.0 };
    let f_hi = sf.f(hi)?;
    let base = ConstrainedGround {
        r: sf.r,
        lambda0: edge,
        kind: GroundKind::ContinuumEdge,
        f_at_lambda0: f_hi,
        lambda1,
        lambda2,
        f0,
    };
    if f_hi <= 0.0 {
        return Ok(base);
    }
    let (mut lo, mut up) = (0.0, hi);
    let (mut f_lo, mut f_up) = (f0, f_hi);
    let mut root = 0.5 * (lo + up);
    let mut f_root = f64::NAN;
    for it in 0..200 {
        // Illinois-flavoured false position, falling back to bisection
        let secant = up - f_up * (up - lo) / (f_up - f_lo);
        root = if it % 3 == 2 || !(secant > lo && secant < up) { 0.5 * (lo + up) } else { secant };
        f_root = sf.f(root)?;
        if f_root.abs() < 1e-12 || up - lo < 1e-14 {
            break;
        }
        if f_root < 0.0 {
            lo = root;
            f_lo = f_root;
        } else {
            up = root;
            f_up = f_root;
        }
    }
    Ok(ConstrainedGround { lambda0: root, kind: GroundKind::Root, f_at_lambda0: f_root, ..base })
}

/// `F_R(0)` from the split operator on an x grid, `Dirichlet` at the left end and
/// Neumann at the right end.
pub fn f_zero_x_form(profile: &KinkProfile, r: f64, grid: &GridSpec) -> Result<f64> {
    let op = assemble_lr_x(profile, r, grid)?;
    let rhs = op.load(|x| profile.phi_prime(x));
    let u = thomas_solve(&op, 0.0, &rhs)?.x;
    let prod: Vec<f64> = u.iter().enumerate().map(|(i, ui)| ui * profile.phi_prime(grid.node(i))).collect();
    simpson(&prod, grid.h())
}

/// Eigenfunction samples for plotting: `z`, `x(z)` and the vectors.
#[derive(Debug, Clone)]
pub struct EigenfunctionTable {
    pub z: Vec<f64>,
    pub x: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

pub fn eigenfunctions(r: f64, grid: &GridSpec, k: usize) -> Result<EigenfunctionTable> {
    let op = assemble_lr_z(r, grid)?;
    let pairs = lowest_eigenpairs(&op, k)?;
    let z = grid.nodes();
    let x = z.iter().map(|&zi| if zi < 0.0 { x_of_z(zi) } else { Ok(f64::INFINITY) }).collect::<Result<Vec<_>>>()?;
    Ok(EigenfunctionTable { z, x, vectors: pairs.into_iter().map(|p| p.vector).collect() })
}

/// A near-zero mode of the block spectrum and how it lines up with the
/// symmetry directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelMode {
    pub mu: f64,
    /// `|cos|` between the mode and `phi'`.
    pub overlap_phi_prime: f64,
    /// `|cos|` between `S` applied to the mode and `phi`.
    pub overlap_phi: f64,
}

impl KernelMode {
    pub fn is_symmetry_direction(&self) -> bool {
        self.overlap_phi_prime > 0.99 || self.overlap_phi > 0.99
    }
}

/// Spectrum of the linearization `u_t = -L_- v`, `v_t = L_+ u`.
#[derive(Debug, Clone, Serialize)]
pub struct BlockSpectrum {
    /// `(re, im)` pairs, `+-i sqrt(mu)` for each `mu`.
    pub eigenvalues: Vec<(f64, f64)>,
    /// Eigenvalues `mu` of `S L_- S`, after clipping, ascending.
    pub mu: Vec<f64>,
    pub max_abs_re: f64,
    /// Smallest `mu` before clipping.
    pub min_mu_raw: f64,
    /// Infinity norm of the reduced matrix.
    pub matrix_norm: f64,
    /// Smallest eigenvalue of the discrete `L_+` before clipping.
    pub lplus_min: f64,
    pub lplus_clipped: usize,
    /// Number of negative eigenvalues of the discrete `L_+` and `L_-` by Sturm count.
    pub lplus_negative: usize,
    pub lminus_negative: usize,
    /// True when some `mu` lies below `-1e-8 ||M||`.
    pub unstable: bool,
    pub kernel_modes: Vec<KernelMode>,
    pub grid: GridSpec,
}

/// Threshold below which `mu` counts as zero.
pub const KERNEL_TOLERANCE: f64 = 1e-6;

/// Block spectrum through the symmetric reduction `lambda^2 = -mu`, with `mu`
/// the eigenvalues of `S L_- S` and `S` the square root of `L_+`.
///
/// The reduction is carried out in the eigenbasis of `L_+`:
/// `M = Lambda^{1/2} Q^T L_- Q Lambda^{1/2}` is orthogonally similar to `S L_- S`.
pub fn block_spectrum(profile: &KinkProfile, grid: &GridSpec) -> Result<BlockSpectrum> {
    if grid.variable != Variable::X {
        return Err(Error::InvalidParameter("block spectrum needs an x grid".into()));
    }
    let n = grid.len();
    if n > DENSE_LIMIT {
        return Err(Error::SizeLimit { n, limit: DENSE_LIMIT });
    }
    let lplus = assemble_lpm_x(Which::Plus, profile, grid)?;
    let lminus = assemble_lpm_x(Which::Minus, profile, grid)?;
    let tplus = lplus.scaled();
    let lplus_negative = tplus.sturm_count(0.0);
    let lminus_negative = lminus.scaled().sturm_count(0.0);
    let (lam, q) = tridiag_eigh(&tplus);
    let lplus_min = lam[0];
    let lplus_clipped = lam.iter().filter(|&&l| l < 0.0).count();
    let root: Vec<f64> = lam.iter().map(|&l| l.max(0.0).sqrt()).collect();

    let g: Vec<Vec<f64>> = q.par_iter().map(|qj| lminus.apply(qj)).collect();
    let rows: Vec<Vec<f64>> =
        (0..n).into_par_iter().map(|i| (0..=i).map(|j| root[i] * root[j] * dot(&q[i], &g[j])).collect()).collect();
    let mut m = DenseSymmetric::zeros(n);
    for (i, row) in rows.into_iter().enumerate() {
        m.row_mut(i).copy_from_slice(&row);
    }
    let matrix_norm = m.norm_inf();
    let tri = tridiagonalize(&m)?;
    let mut mu: Vec<f64> = (0..n).into_par_iter().map(|k| tri.tri.bisect(k)).collect();
    let min_mu_raw = mu[0];
    let floor = -1e-8 * matrix_norm;
    let unstable = mu.iter().any(|&x| x < floor);

    let phi_prime: Vec<f64> = grid.nodes().iter().map(|&x| profile.phi_prime(x)).collect();
    let phi: Vec<f64> = grid.nodes().iter().map(|&x| profile.phi(x)).collect();
    let kernel_modes = mu
        .iter()
        .filter(|m| m.abs() < KERNEL_TOLERANCE)
        .map(|&value| {
            let y = tri.back_transform(&tridiag_eigvec(&tri.tri, value));
            let mut x = vec![0.0; n];
            let mut sx = vec![0.0; n];
            for (j, qj) in q.iter().enumerate() {
                for k in 0..n {
                    x[k] += y[j] * qj[k];
                    sx[k] += root[j] * y[j] * qj[k];
                }
            }
            KernelMode { mu: value, overlap_phi_prime: cosine(&x, &phi_prime), overlap_phi: cosine(&sx, &phi) }
        })
        .collect();

    for x in mu.iter_mut() {
        if *x < 0.0 && *x >= floor {
            *x = 0.0;
        }
    }
    let eigenvalues = mu
        .iter()
        .flat_map(|&m| {
            let s = m.max(0.0).sqrt();
            [(0.0, s), (0.0, -s)]
        })
        .collect();
    Ok(BlockSpectrum {
        eigenvalues,
        mu,
        max_abs_re: 0.0,
        min_mu_raw,
        matrix_norm,
        lplus_min,
        lplus_clipped,
        lplus_negative,
        lminus_negative,
        unstable,
        kernel_modes,
        grid: *grid,
    })
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot(a, b) / (na * nb)).abs()
}
