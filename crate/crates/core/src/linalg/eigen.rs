use serde::Serialize;

use super::tridiag::{norm2, SymTridiag};
use crate::discretize::TridiagonalOperator;
use crate::error::{invalid, Error, Result};

/// Eigenpair of a weighted pencil `A v = lambda W v`.
#[derive(Debug, Clone, Serialize)]
pub struct EigenPair {
    /// Rayleigh quotient of the returned vector.
    pub value: f64,
    /// Value located by Sturm bisection.
    pub bisection_value: f64,
    /// Normalized so that `v^T W v = 1`.
    #[serde(skip)]
    pub vector: Vec<f64>,
    /// `||A v - lambda W v||_2 / ||v||_2`.
    pub residual: f64,
    /// Number of eigenvalues below this one.
    pub sturm_index: usize,
    /// Strict sign alternations of the vector above the noise floor.
    pub sign_changes: usize,
}

const MAX_INVERSE_ITERATIONS: usize = 5;
const ACCEPT_RESIDUAL: f64 = 1e-8;

/// Strict sign alternations, ignoring entries below `1e-9 ||v||_inf`.
pub fn sign_changes(v: &[f64]) -> usize {
    let floor = 1e-9 * v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut last = 0.0f64;
    let mut count = 0;
    for &x in v {
        if x.abs() <= floor {
            continue;
        }
        if last != 0.0 && (x > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = x;
    }
    count
}

// Deterministic start vector with no special symmetry.
fn start_vector(n: usize, seed: usize) -> Vec<f64> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (seed as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            1.0 + ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        })
        .collect()
}

fn orthogonalize(y: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c: f64 = b.iter().zip(y.iter()).map(|(p, q)| p * q).sum();
            for (yi, bi) in y.iter_mut().zip(b) {
                *yi -= c * bi;
            }
        }
    }
}

fn normalize(y: &mut [f64]) -> f64 {
    let n = norm2(y);
    for yi in y.iter_mut() {
        *yi /= n;
    }
    n
}

/// The `k` smallest eigenpairs of the pencil `(A, W)`.
///
/// Eigenvalues are bracketed by Sturm bisection on `W^{-1/2} A W^{-1/2}`;
/// vectors come from shifted inverse iteration, orthogonalized against the
/// previously found vectors in the `W` inner product.
pub fn lowest_eigenpairs(op: &TridiagonalOperator, k: usize) -> Result<Vec<EigenPair>> {
    if k == 0 || k > op.len() {
        return Err(invalid(format!("need 1 <= k <= {}, got {k}", op.len())));
    }
    let t = op.scaled();
    let norm = t.norm();
    let s: Vec<f64> = op.weight.iter().map(|w| 1.0 / w.sqrt()).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut pairs = Vec::with_capacity(k);
    for j in 0..k {
        let lam_b = t.bisect(j);
        let shift = lam_b + 1e-12 * norm;
        let lu = t.factor_shifted_guarded(shift, f64::EPSILON * norm);
        let mut y = start_vector(op.len(), j);
        orthogonalize(&mut y, &basis);
        normalize(&mut y);
        let mut best: Option<(f64, f64, Vec<f64>)> = None;
        for _ in 0..MAX_INVERSE_ITERATIONS {
            lu.solve_in_place(&mut y);
            orthogonalize(&mut y, &basis);
            normalize(&mut y);
            let v: Vec<f64> = y.iter().zip(&s).map(|(a, b)| a * b).collect();
            let value = op.rayleigh(&v);
            let residual = pencil_residual(op, value, &v);
            let better = best.as_ref().map_or(true, |b| residual < b.1);
            if better {
                best = Some((value, residual, v));
            }
            if residual < 0.1 * ACCEPT_RESIDUAL {
                break;
            }
        }
        let (value, residual, mut v) = best.expect("at least one iteration");
        if !(residual < ACCEPT_RESIDUAL) {
            return Err(Error::NoConvergence {
                what: "inverse iteration",
                iterations: MAX_INVERSE_ITERATIONS,
                residual,
            });
        }
        let wn = op.weighted_norm_sq(&v).sqrt();
        for x in v.iter_mut() {
            *x /= wn;
        }
        // fix the sign so the dominant lobe is positive
        let imax = v.iter().enumerate().fold(0, |m, (i, x)| if x.abs() > v[m].abs() { i } else { m });
        if v[imax] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        basis.push(v.iter().zip(&op.weight).map(|(x, w)| x * w.sqrt()).collect());
        pairs.push(EigenPair {
            value,
            bisection_value: lam_b,
            sign_changes: sign_changes(&v),
            vector: v,
            residual,
            sturm_index: j,
        });
    }
    Ok(pairs)
}

fn pencil_residual(op: &TridiagonalOperator, value: f64, v: &[f64]) -> f64 {
    norm2(&op.apply_shifted(value, v)) / norm2(v)
}

/// Full eigendecomposition of a symmetric tridiagonal matrix: eigenvalues
/// ascending and orthonormal eigenvectors.
///
/// Bisection per eigenvalue, two to three steps of inverse iteration per
/// vector, and Gram-Schmidt inside clusters of close eigenvalues.
pub fn tridiag_eigh(t: &SymTridiag) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = t.len();
    let norm = t.norm().max(f64::MIN_POSITIVE);
    let values: Vec<f64> = (0..n).map(|k| t.bisect(k)).collect();
    let cluster_gap = 1e-5 * norm;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut cluster_start = 0;
    for j in 0..n {
        if j > 0 && values[j] - values[j - 1] > cluster_gap {
            cluster_start = j;
        }
        // nudge shifts apart inside a cluster so the factorizations differ
        let shift = values[j] + (j - cluster_start) as f64 * 10.0 * f64::EPSILON * norm;
        let lu = t.factor_shifted_guarded(shift, f64::EPSILON * norm);
        let mut y = start_vector(n, j);
        normalize(&mut y);
        for it in 0..3 {
            lu.solve_in_place(&mut y);
            orthogonalize(&mut y, &vectors[cluster_start..j]);
            let grow = normalize(&mut y);
            // growth ~ 1/|lambda - shift|: converged once it is huge
            if it >= 1 && grow > 1e10 / norm {
                break;
            }
        }
        vectors.push(y);
    }
    (values, vectors)
}

/// Unit eigenvector of `t` for an eigenvalue `lambda` located beforehand.
pub fn tridiag_eigvec(t: &SymTridiag, lambda: f64) -> Vec<f64> {
    let norm = t.norm().max(f64::MIN_POSITIVE);
    let lu = t.factor_shifted_guarded(lambda + 1e-12 * norm, f64::EPSILON * norm);
    let mut y = start_vector(t.len(), 7);
    normalize(&mut y);
    for _ in 0..3 {
        lu.solve_in_place(&mut y);
        normalize(&mut y);
    }
    y
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
