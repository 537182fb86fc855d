use crate::discretize::TridiagonalOperator;
use crate::error::{invalid, Error, Result};

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    off_sq: Vec<f64>,
    pivmin: f64,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length must be n - 1");
        let off_sq: Vec<f64> = off.iter().map(|e| e * e).collect();
        let big = off_sq.iter().cloned().fold(1.0, f64::max);
        Self { diag, off, off_sq, pivmin: f64::MIN_POSITIVE * big }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    pub fn norm(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `lambda`: the negative pivots of
    /// `T - lambda I = L D L^T`.
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - lambda;
        for i in 0..self.len() {
            if i > 0 {
                q = self.diag[i] - lambda - self.off_sq[i - 1] / q;
            }
            if q.abs() < self.pivmin {
                q = -self.pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected until the bracket is
    /// at the resolution of the Sturm counts.
    pub fn bisect(&self, k: usize) -> f64 {
        let (glo, ghi) = self.gershgorin();
        let norm = glo.abs().max(ghi.abs());
        let pad = f64::EPSILON * norm + f64::MIN_POSITIVE;
        self.bisect_in(k, glo - pad, ghi + pad, f64::EPSILON * norm)
    }

    pub(crate) fn bisect_in(&self, k: usize, mut lo: f64, mut hi: f64, abs_tol: f64) -> f64 {
        loop {
            let mid = 0.5 * (lo + hi);
            let width = hi - lo;
            if width <= abs_tol.max(2.0 * f64::EPSILON * lo.abs().max(hi.abs())) || mid <= lo || mid >= hi {
                return mid;
            }
            if self.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out: Vec<f64> = self.diag.iter().zip(v).map(|(d, x)| d * x).collect();
        for i in 0..n - 1 {
            out[i] += self.off[i] * v[i + 1];
            out[i + 1] += self.off[i] * v[i];
        }
        out
    }

    /// LU factorization of `T - shift I`, replacing tiny pivots by `floor`.
    pub(crate) fn factor_shifted_guarded(&self, shift: f64, floor: f64) -> TridiagLu {
        let diag: Vec<f64> = self.diag.iter().map(|d| d - shift).collect();
        TridiagLu::factor_guarded(&diag, &self.off, floor)
    }
}

/// LU factors of a (not necessarily symmetric-definite) tridiagonal matrix with
/// equal sub- and super-diagonals, without pivoting.
#[derive(Debug, Clone)]
pub struct TridiagLu {
    pivots: Vec<f64>,
    mult: Vec<f64>,
    off: Vec<f64>,
}

impl TridiagLu {
    /// Fails with [`Error::NearSingular`] when a pivot falls below `threshold`.
    pub fn factor(diag: &[f64], off: &[f64], threshold: f64) -> Result<Self> {
        let n = diag.len();
        let mut pivots = Vec::with_capacity(n);
        let mut mult = Vec::with_capacity(n.saturating_sub(1));
        let mut q = diag[0];
        for i in 0..n {
            if i > 0 {
                let m = off[i - 1] / pivots[i - 1];
                mult.push(m);
                q = diag[i] - m * off[i - 1];
            }
            if !(q.abs() > threshold) {
                return Err(Error::NearSingular { row: i, pivot: q });
            }
            pivots.push(q);
        }
        Ok(Self { pivots, mult, off: off.to_vec() })
    }

    fn factor_guarded(diag: &[f64], off: &[f64], floor: f64) -> Self {
        let n = diag.len();
        let mut pivots = Vec::with_capacity(n);
        let mut mult = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n {
            let mut q = diag[i];
            if i > 0 {
                let m = off[i - 1] / pivots[i - 1];
                mult.push(m);
                q -= m * off[i - 1];
            }
            if q.abs() < floor {
                q = if q < 0.0 { -floor } else { floor };
            }
            pivots.push(q);
        }
        Self { pivots, mult, off: off.to_vec() }
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.pivots.len();
        for i in 1..n {
            x[i] -= self.mult[i - 1] * x[i - 1];
        }
        x[n - 1] /= self.pivots[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (x[i] - self.off[i] * x[i + 1]) / self.pivots[i];
        }
    }

    fn smallest_pivot(&self) -> (usize, f64) {
        self.pivots
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, p)| (i, *p))
            .unwrap_or((0, 0.0))
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Result of [`thomas_solve`].
#[derive(Debug, Clone)]
pub struct Solve {
    pub x: Vec<f64>,
    /// `||(A - shift W) x - rhs|| / ||rhs||` after refinement.
    pub relative_residual: f64,
}

const SOLVE_RESIDUAL_LIMIT: f64 = 1e-6;

/// Solve `(A - shift W) x = rhs` by the Thomas algorithm with one pass of
/// iterative refinement. A relative residual above `1e-6` after refinement is
/// reported as [`Error::NearSingular`].
pub fn thomas_solve(op: &TridiagonalOperator, shift: f64, rhs: &[f64]) -> Result<Solve> {
    if rhs.len() != op.len() {
        return Err(invalid(format!("right-hand side has length {}, operator has {}", rhs.len(), op.len())));
    }
    let diag: Vec<f64> = op.diag().iter().zip(&op.weight).map(|(d, w)| d - shift * w).collect();
    let off = op.offdiag();
    let scale = diag
        .iter()
        .enumerate()
        .map(|(i, d)| d.abs() + if i > 0 { off[i - 1].abs() } else { 0.0 } + off.get(i).map_or(0.0, |e| e.abs()))
        .fold(0.0, f64::max);
    let lu = TridiagLu::factor(&diag, &off, 1e-14 * scale)?;
    let mut x = lu.solve(rhs);
    let r: Vec<f64> = residual(op, shift, &x, rhs);
    let dx = lu.solve(&r);
    for (xi, d) in x.iter_mut().zip(&dx) {
        *xi += d;
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("thomas_solve"));
    }
    let r = residual(op, shift, &x, rhs);
    let rn = norm2(rhs);
    let relative_residual = if rn > 0.0 { norm2(&r) / rn } else { norm2(&r) };
    if relative_residual > SOLVE_RESIDUAL_LIMIT {
        // pivots passed the threshold but the factorization is too close to
        // singular for refinement to recover a solution
        let (row, pivot) = lu.smallest_pivot();
        return Err(Error::NearSingular { row, pivot });
    }
    Ok(Solve { x, relative_residual })
}

fn residual(op: &TridiagonalOperator, shift: f64, x: &[f64], rhs: &[f64]) -> Vec<f64> {
    let ax = op.apply_shifted(shift, x);
    rhs.iter().zip(&ax).map(|(b, a)| b - a).collect()
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Number of weighted eigenvalues of the pencil below `lambda`.
pub fn sturm_count(op: &TridiagonalOperator, lambda: f64) -> usize {
    op.scaled().sturm_count(lambda)
}
