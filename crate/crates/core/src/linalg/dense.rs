use rayon::prelude::*;

use super::eigen::{sign_changes, tridiag_eigh, EigenPair};
use super::tridiag::{norm2, SymTridiag};
use crate::error::{Error, Result};

/// Largest order accepted by the dense routines.
pub const DENSE_LIMIT: usize = 4001;

/// Symmetric matrix in packed lower-triangular storage (row by row).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymmetric {
    n: usize,
    packed: Vec<f64>,
}

impl DenseSymmetric {
    pub fn zeros(n: usize) -> Self {
        Self { n, packed: vec![0.0; n * (n + 1) / 2] }
    }

    pub fn from_fn<F: Fn(usize, usize) -> f64>(n: usize, f: F) -> Self {
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                packed.push(f(i, j));
            }
        }
        Self { n, packed }
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    fn index(i: usize, j: usize) -> usize {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        i * (i + 1) / 2 + j
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[Self::index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.packed[Self::index(i, j)] = v;
    }

    /// Packed lower-triangular row `i`, columns `0..=i`.
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let start = i * (i + 1) / 2;
        &mut self.packed[start..start + i + 1]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            let row = &self.packed[i * (i + 1) / 2..i * (i + 1) / 2 + i + 1];
            let mut acc = 0.0;
            for j in 0..i {
                acc += row[j] * v[j];
                out[j] += row[j] * v[i];
            }
            out[i] += acc + row[i] * v[i];
        }
        out
    }

    fn to_lower_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.packed[i * (i + 1) / 2..i * (i + 1) / 2 + i + 1].to_vec()).collect()
    }
}

/// `Q^T M Q = T` with `Q` a product of Householder reflectors.
#[derive(Debug, Clone)]
pub struct Tridiagonalization {
    pub tri: SymTridiag,
    // reflector k acts on indices k+1.. as I - beta v v^T
    reflectors: Vec<(Vec<f64>, f64)>,
}

impl Tridiagonalization {
    /// Map an eigenvector of `T` back to one of `M`.
    pub fn back_transform(&self, y: &[f64]) -> Vec<f64> {
        let mut x = y.to_vec();
        for (k, (v, beta)) in self.reflectors.iter().enumerate().rev() {
            let tail = &mut x[k + 1..];
            let c: f64 = v.iter().zip(tail.iter()).map(|(a, b)| a * b).sum::<f64>() * beta;
            for (t, vi) in tail.iter_mut().zip(v) {
                *t -= c * vi;
            }
        }
        x
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > DENSE_LIMIT {
        return Err(Error::SizeLimit { n, limit: DENSE_LIMIT });
    }
    Ok(())
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
pub fn tridiagonalize(m: &DenseSymmetric) -> Result<Tridiagonalization> {
    let n = m.order();
    check_size(n)?;
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let mut a = m.to_lower_rows();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    for k in 0..n.saturating_sub(2) {
        diag[k] = a[k][k];
        // column k below the diagonal
        let mut v: Vec<f64> = (k + 1..n).map(|i| a[i][k]).collect();
        let xnorm = norm2(&v);
        if xnorm == 0.0 {
            off[k] = 0.0;
            reflectors.push((vec![0.0; n - k - 1], 0.0));
            continue;
        }
        let alpha = if v[0] > 0.0 { -xnorm } else { xnorm };
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        let beta = 2.0 / vtv;
        off[k] = alpha;
        let m_sz = n - k - 1;
        // p = beta * B v with B the trailing block (lower rows, offset k+1)
        let mut p = vec![0.0; m_sz];
        for i in 0..m_sz {
            let row = &a[k + 1 + i][k + 1..];
            let mut acc = 0.0;
            for j in 0..i {
                acc += row[j] * v[j];
                p[j] += row[j] * v[i];
            }
            p[i] += acc + row[i] * v[i];
        }
        for pi in p.iter_mut() {
            *pi *= beta;
        }
        let kappa = 0.5 * beta * p.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
        let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - kappa * vi).collect();
        a[k + 1..].par_iter_mut().enumerate().for_each(|(i, row)| {
            let row = &mut row[k + 1..];
            let (vi, wi) = (v[i], w[i]);
            for j in 0..=i {
                row[j] -= vi * w[j] + wi * v[j];
            }
        });
        reflectors.push((v, beta));
    }
    if n >= 2 {
        diag[n - 2] = a[n - 2][n - 2];
        off[n - 2] = a[n - 1][n - 2];
    }
    diag[n - 1] = a[n - 1][n - 1];
    Ok(Tridiagonalization { tri: SymTridiag::new(diag, off), reflectors })
}

/// All eigenvalues of a dense symmetric matrix, ascending.
pub fn dense_sym_eigenvalues(m: &DenseSymmetric) -> Result<Vec<f64>> {
    let t = tridiagonalize(m)?;
    let n = t.tri.len();
    Ok((0..n).into_par_iter().map(|k| t.tri.bisect(k)).collect())
}

/// Full eigendecomposition of a dense symmetric matrix.
pub fn dense_sym_eigs(m: &DenseSymmetric) -> Result<Vec<EigenPair>> {
    let t = tridiagonalize(m)?;
    let (values, vecs) = tridiag_eigh(&t.tri);
    let pairs: Vec<EigenPair> = values
        .par_iter()
        .zip(vecs.par_iter())
        .enumerate()
        .map(|(k, (&lam, y))| {
            let x = t.back_transform(y);
            let mx = m.apply(&x);
            let value = x.iter().zip(&mx).map(|(a, b)| a * b).sum::<f64>();
            let r: Vec<f64> = mx.iter().zip(&x).map(|(a, b)| a - value * b).collect();
            EigenPair {
                value,
                bisection_value: lam,
                residual: norm2(&r) / norm2(&x),
                sturm_index: k,
                sign_changes: sign_changes(&x),
                vector: x,
            }
        })
        .collect();
    let worst = pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
    let tol = 1e-8 * m.norm_inf().max(1.0);
    if worst > tol {
        return Err(Error::NoConvergence { what: "dense eigensolver", iterations: 3, residual: worst });
    }
    Ok(pairs)
}
