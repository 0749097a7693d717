//! Dense symmetric matrix algebra: packed symmetric storage, isometric
//! vectorization, eigendecomposition, PSD-cone projection, and power-method
//! operator norm estimation.
//!
//! All product-space norms used by the splitting iteration are plain
//! Euclidean norms on `svec` coordinates, which makes them agree with the
//! Frobenius geometry on matrix blocks: `<svec(A), svec(B)> = tr(AB)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// Number of entries in the packed triangle of an `n x n` symmetric matrix.
pub const fn tri_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Packed index of entry `(i, j)` with `i <= j`, columns stacked:
/// `(0,0), (0,1), (1,1), (0,2), (1,2), (2,2), ...`
#[inline]
pub const fn tri_index(i: usize, j: usize) -> usize {
    j * (j + 1) / 2 + i
}

/// Dense real symmetric matrix in packed triangular storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMat {
    n: usize,
    data: Vec<f64>,
}

impl SymMat {
    pub fn zeros(n: usize) -> Self {
        SymMat { n, data: vec![0.0; tri_len(n)] }
    }

    pub fn identity(n: usize) -> Self {
        let mut s = Self::zeros(n);
        for i in 0..n {
            s.set(i, i, 1.0);
        }
        s
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut s = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            s.set(i, i, v);
        }
        s
    }

    /// Builds from a full row-major `n x n` slice, symmetrizing as
    /// `(A + A^T)/2`.
    pub fn from_dense(n: usize, a: &[f64]) -> Self {
        assert_eq!(a.len(), n * n, "dense data length");
        let mut s = Self::zeros(n);
        for j in 0..n {
            for i in 0..=j {
                s.set(i, j, 0.5 * (a[i * n + j] + a[j * n + i]));
            }
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.data[tri_index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.data[tri_index(i, j)] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.data[tri_index(i, j)] += v;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius inner product `tr(self * other)`.
    pub fn dot(&self, other: &SymMat) -> f64 {
        assert_eq!(self.n, other.n);
        let mut acc = 0.0;
        for j in 0..self.n {
            for i in 0..=j {
                let w = if i == j { 1.0 } else { 2.0 };
                acc += w * self.get(i, j) * other.get(i, j);
            }
        }
        acc
    }

    pub fn norm_fro(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, a: f64) -> SymMat {
        SymMat { n: self.n, data: self.data.iter().map(|v| a * v).collect() }
    }

    pub fn add(&self, other: &SymMat) -> SymMat {
        assert_eq!(self.n, other.n);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        SymMat { n: self.n, data }
    }

    pub fn sub(&self, other: &SymMat) -> SymMat {
        assert_eq!(self.n, other.n);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        SymMat { n: self.n, data }
    }

    /// Quadratic form `x^T S x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        let mut acc = 0.0;
        for j in 0..self.n {
            for i in 0..=j {
                let w = if i == j { 1.0 } else { 2.0 };
                acc += w * self.get(i, j) * x[i] * x[j];
            }
        }
        acc
    }

    /// Matrix-vector product `S x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                out[i] += self.get(i, j) * x[j];
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Isometric vectorization: off-diagonal entries scaled by sqrt(2), so
    /// that the Euclidean inner product of two `svec`s equals the trace
    /// inner product of the matrices.
    pub fn svec(&self) -> SVec {
        let mut data = Vec::with_capacity(tri_len(self.n));
        for j in 0..self.n {
            for i in 0..=j {
                let v = self.data[tri_index(i, j)];
                data.push(if i == j { v } else { SQRT2 * v });
            }
        }
        SVec { n: self.n, data }
    }

    /// Writes `svec(self)` into a slice of length `tri_len(n)`.
    pub fn svec_into(&self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), tri_len(self.n));
        for j in 0..self.n {
            for i in 0..=j {
                let idx = tri_index(i, j);
                let v = self.data[idx];
                out[idx] = if i == j { v } else { SQRT2 * v };
            }
        }
    }

    /// Inverse of [`SymMat::svec_into`].
    pub fn from_svec_slice(n: usize, v: &[f64]) -> SymMat {
        debug_assert_eq!(v.len(), tri_len(n));
        let mut data = Vec::with_capacity(tri_len(n));
        for j in 0..n {
            for i in 0..=j {
                let x = v[tri_index(i, j)];
                data.push(if i == j { x } else { x / SQRT2 });
            }
        }
        SymMat { n, data }
    }
}

/// Isometric vectorization of a symmetric matrix (see [`SymMat::svec`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SVec {
    n: usize,
    data: Vec<f64>,
}

impl SVec {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn dot(&self, other: &SVec) -> f64 {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn smat(&self) -> SymMat {
        SymMat::from_svec_slice(self.n, &self.data)
    }
}

/// Symmetric eigendecomposition `S = Q diag(w) Q^T` with eigenvalues in
/// descending order and orthonormal eigenvector columns.
pub fn sym_eig(s: &SymMat) -> Result<(Vec<f64>, DMatrix<f64>), LinalgError> {
    if !s.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let eig = s.to_dense().symmetric_eigen();
    let n = s.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Frobenius-nearest positive semidefinite matrix: eigenvalues clamped at 0.
pub fn project_psd(s: &SymMat) -> SymMat {
    let n = s.dim();
    let eig = s.to_dense().symmetric_eigen();
    let mut out = SymMat::zeros(n);
    for idx in 0..n {
        let w = eig.eigenvalues[idx];
        if w <= 0.0 {
            continue;
        }
        let q = eig.eigenvectors.column(idx);
        for j in 0..n {
            for i in 0..=j {
                out.add_to(i, j, w * q[i] * q[j]);
            }
        }
    }
    out
}

/// Estimates the largest singular value of a linear operator by power
/// iteration on the normal operator `K* K`, starting from a seeded unit
/// Gaussian vector. The estimate never exceeds the true norm and is
/// nondecreasing in the iteration count.
pub fn power_method_norm<F, G>(
    apply: F,
    apply_adjoint: G,
    dim_in: usize,
    dim_out: usize,
    iters: usize,
    seed: u64,
) -> f64
where
    F: Fn(&[f64], &mut [f64]),
    G: Fn(&[f64], &mut [f64]),
{
    assert!(iters >= 1, "power iteration count must be >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = DVector::from_fn(dim_in, |_, _| {
        rng.sample::<f64, _>(rand_distr::StandardNormal)
    });
    let nrm = u.norm();
    if nrm == 0.0 {
        return 0.0;
    }
    u /= nrm;

    let mut ku = vec![0.0; dim_out];
    let mut ktku = vec![0.0; dim_in];
    for _ in 0..iters {
        apply(u.as_slice(), &mut ku);
        apply_adjoint(&ku, &mut ktku);
        let w = DVector::from_column_slice(&ktku);
        let wn = w.norm();
        if wn == 0.0 {
            return 0.0;
        }
        u = w / wn;
    }
    apply(u.as_slice(), &mut ku);
    ku.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn random_sym(n: usize, seed: u64) -> SymMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = SymMat::zeros(n);
        for j in 0..n {
            for i in 0..=j {
                s.set(i, j, rng.random_range(-2.0..2.0));
            }
        }
        s
    }

    #[test]
    fn eig_diagonal() {
        let s = SymMat::from_diag(&[3.0, 1.0]);
        let (w, _) = sym_eig(&s).unwrap();
        assert_relative_eq!(w[0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(w[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_offdiag() {
        let mut s = SymMat::zeros(2);
        s.set(0, 1, 1.0);
        let (w, _) = sym_eig(&s).unwrap();
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(w[1], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_reconstruction_and_orthonormality() {
        let s = random_sym(5, 7);
        let (w, q) = sym_eig(&s).unwrap();
        let lam = DMatrix::from_diagonal(&DVector::from_vec(w));
        let rec = &q * lam * q.transpose();
        let err = (rec - s.to_dense()).norm();
        assert!(err <= 1e-10, "reconstruction error {err}");
        let orth = (&q * q.transpose() - DMatrix::<f64>::identity(5, 5)).norm();
        assert!(orth <= 1e-10 * 5.0, "orthonormality {orth}");
    }

    #[test]
    fn eig_rejects_non_finite() {
        let mut s = SymMat::zeros(2);
        s.set(0, 0, f64::NAN);
        assert!(sym_eig(&s).is_err());
    }

    #[test]
    fn psd_projection_clamps_negative_eigenvalue() {
        let s = SymMat::from_diag(&[1.0, -1.0]);
        let p = project_psd(&s);
        assert_relative_eq!(p.get(0, 0), 1.0, epsilon = 1e-12);
        assert_relative_eq!(p.get(1, 1), 0.0, epsilon = 1e-12);
        assert_relative_eq!(p.get(0, 1), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn psd_projection_fixes_psd_input() {
        let mut s = SymMat::zeros(3);
        s.set(0, 0, 2.0);
        s.set(1, 1, 1.0);
        s.set(0, 1, 0.5);
        s.set(2, 2, 0.1);
        let p = project_psd(&s);
        assert!(p.sub(&s).norm_fro() <= 1e-12);
    }

    #[test]
    fn svec_matches_trace_inner_product() {
        let a = random_sym(4, 1);
        let b = random_sym(4, 2);
        assert_relative_eq!(a.svec().dot(&b.svec()), a.dot(&b), epsilon = 1e-12);
    }

    #[test]
    fn power_method_known_singular_value() {
        // 3x2 operator with largest singular value exactly 3.
        let k = [[3.0, 0.0], [0.0, 1.0], [0.0, 0.5]];
        let apply = |x: &[f64], out: &mut [f64]| {
            for (r, row) in k.iter().enumerate() {
                out[r] = row[0] * x[0] + row[1] * x[1];
            }
        };
        let adj = |y: &[f64], out: &mut [f64]| {
            out[0] = k[0][0] * y[0] + k[1][0] * y[1] + k[2][0] * y[2];
            out[1] = k[0][1] * y[0] + k[1][1] * y[1] + k[2][1] * y[2];
        };
        let est = power_method_norm(apply, adj, 2, 3, 50, 1);
        assert_relative_eq!(est, 3.0, epsilon = 1e-3);
    }

    #[test]
    fn power_method_zero_operator() {
        let apply = |_: &[f64], out: &mut [f64]| out.fill(0.0);
        let adj = |_: &[f64], out: &mut [f64]| out.fill(0.0);
        assert_eq!(power_method_norm(apply, adj, 3, 3, 12, 0), 0.0);
    }

    #[test]
    fn power_method_lower_bound_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = DMatrix::<f64>::from_fn(8, 6, |_, _| rng.random_range(-1.0..1.0));
        let true_norm = m.clone().svd(false, false).singular_values[0];
        let apply = |x: &[f64], out: &mut [f64]| {
            let y = &m * DVector::from_column_slice(x);
            out.copy_from_slice(y.as_slice());
        };
        let adj = |y: &[f64], out: &mut [f64]| {
            let x = m.transpose() * DVector::from_column_slice(y);
            out.copy_from_slice(x.as_slice());
        };
        let mut last = 0.0;
        for iters in [1, 2, 4, 8, 16, 32] {
            let est = power_method_norm(&apply, &adj, 6, 8, iters, 9);
            assert!(est <= true_norm + 1e-12, "estimate must lower-bound the norm");
            assert!(est + 1e-12 >= last, "estimate must be nondecreasing in iters");
            last = est;
        }
        assert_relative_eq!(last, true_norm, epsilon = 1e-6);
    }

    proptest! {
        #[test]
        fn psd_projection_nonexpansive(seed_a in 0u64..500, seed_b in 500u64..1000) {
            let a = random_sym(4, seed_a);
            let b = random_sym(4, seed_b);
            let pa = project_psd(&a);
            let pb = project_psd(&b);
            prop_assert!(pa.sub(&pb).norm_fro() <= a.sub(&b).norm_fro() + 1e-10);
        }

        #[test]
        fn psd_projection_idempotent(seed in 0u64..1000) {
            let a = random_sym(5, seed);
            let p = project_psd(&a);
            let pp = project_psd(&p);
            prop_assert!(pp.sub(&p).norm_fro() <= 1e-10);
        }

        #[test]
        fn svec_roundtrip(seed in 0u64..1000) {
            let a = random_sym(5, seed);
            let back = a.svec().smat();
            prop_assert!(back.sub(&a).norm_fro() <= 1e-14);
        }
    }
}
