//! Multivariate polynomial representation, graded-lexicographic monomial
//! bases, moment matrices, and SOS-convexity certification.
//!
//! The monomial ordering is fixed globally: ascending total degree, ties
//! broken lexicographically with earlier variables dominating, so the
//! canonical basis reads `1, x1, ..., xd, x1^2, x1 x2, ...`. All index
//! arithmetic (basis pairing, moment extraction) relies on this order being
//! deterministic.

use crate::conicif::{self, ConicError, LinearFunctional, SdpProblem, SdpStatus};
use crate::linalg::SymMat;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use thiserror::Error;

/// Hard cap on monomial basis sizes; protects against accidentally huge
/// moment systems.
pub const MAX_BASIS_LEN: usize = 50_000;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("dimension mismatch: polynomial has {0} variables, point has {1}")]
    DimensionMismatch(usize, usize),
    #[error("moment matrices require even degree, got {0}")]
    OddDegree(u32),
    #[error("basis size s({d},{omega}) = {size} exceeds the cap of {MAX_BASIS_LEN}")]
    BasisTooLarge { d: usize, omega: u32, size: usize },
    #[error("dimension must be >= 1")]
    ZeroDimension,
    #[error(transparent)]
    Backend(#[from] ConicError),
}

/// Exponent tuple of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zeros(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    /// The i-th standard unit multi-index in d variables.
    pub fn unit(d: usize, i: usize) -> Self {
        let mut e = vec![0; d];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `|alpha|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Evaluates the monomial `x^alpha`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &xi)| xi.powi(a as i32))
            .product()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {
                for (a, b) in self.0.iter().zip(&other.0) {
                    match b.cmp(a) {
                        Ordering::Equal => continue,
                        // Higher leading exponent sorts earlier within a degree.
                        ord => return ord,
                    }
                }
                Ordering::Equal
            }
            ord => ord,
        }
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One term of the serialized polynomial format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermRecord {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

/// Sparse multivariate polynomial with real coefficients. Zero coefficients
/// are never stored; the map is keyed in the global monomial order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<MultiIndex, f64>,
    degree: u32,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: BTreeMap::new(), degree: 0 }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::zeros(dim), c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, f64)>>(dim: usize, it: I) -> Self {
        let mut p = Self::zero(dim);
        for (alpha, c) in it {
            p.add_term(alpha, c);
        }
        p
    }

    /// The squared-distance polynomial `||v - x||^2` in the variables `x`.
    pub fn squared_distance(v: &[f64]) -> Self {
        let d = v.len();
        let mut p = Self::zero(d);
        p.add_term(MultiIndex::zeros(d), v.iter().map(|a| a * a).sum());
        for i in 0..d {
            p.add_term(MultiIndex::unit(d, i), -2.0 * v[i]);
            let mut sq = vec![0; d];
            sq[i] = 2;
            p.add_term(MultiIndex(sq), 1.0);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &f64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> f64 {
        self.terms.get(alpha).copied().unwrap_or(0.0)
    }

    /// Accumulates a coefficient, dropping the term if it cancels to zero.
    pub fn add_term(&mut self, alpha: MultiIndex, c: f64) {
        assert_eq!(alpha.len(), self.dim, "multi-index length");
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(alpha).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            let key = self
                .terms
                .iter()
                .find(|(_, &v)| v == 0.0)
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
        self.degree = self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0);
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, PolyError> {
        if x.len() != self.dim {
            return Err(PolyError::DimensionMismatch(self.dim, x.len()));
        }
        Ok(self.terms.iter().map(|(a, &c)| c * a.eval(x)).sum())
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::from_terms(self.dim, self.terms.iter().map(|(a, &c)| (a.clone(), s * c)))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, other.dim);
        let mut p = self.clone();
        for (a, &c) in &other.terms {
            p.add_term(a.clone(), c);
        }
        p
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, other.dim);
        let mut p = Polynomial::zero(self.dim);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                p.add_term(a.add(b), ca * cb);
            }
        }
        p
    }

    /// Partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut p = Polynomial::zero(self.dim);
        for (a, &c) in &self.terms {
            let e = a.0[var];
            if e > 0 {
                let mut b = a.0.clone();
                b[var] = e - 1;
                p.add_term(MultiIndex(b), c * e as f64);
            }
        }
        p
    }

    /// Re-expresses the polynomial over `target_dim` variables, sending
    /// variable `i` to `var_map[i]`.
    pub fn embed(&self, target_dim: usize, var_map: &[usize]) -> Polynomial {
        assert_eq!(var_map.len(), self.dim);
        let mut p = Polynomial::zero(target_dim);
        for (a, &c) in &self.terms {
            let mut b = vec![0u32; target_dim];
            for (i, &e) in a.0.iter().enumerate() {
                b[var_map[i]] += e;
            }
            p.add_term(MultiIndex(b), c);
        }
        p
    }

    /// Variables that occur in at least one term with nonzero exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        let mut used = vec![false; self.dim];
        for a in self.terms.keys() {
            for (i, &e) in a.0.iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        (0..self.dim).filter(|&i| used[i]).collect()
    }

    /// Restricts to the listed variables; every term must be supported on
    /// them (callers use [`Polynomial::support_vars`] first).
    pub fn restrict_vars(&self, keep: &[usize]) -> Polynomial {
        let mut pos = vec![usize::MAX; self.dim];
        for (new, &old) in keep.iter().enumerate() {
            pos[old] = new;
        }
        let mut p = Polynomial::zero(keep.len());
        for (a, &c) in &self.terms {
            let mut b = vec![0u32; keep.len()];
            for (i, &e) in a.0.iter().enumerate() {
                if e > 0 {
                    assert!(pos[i] != usize::MAX, "term supported outside kept variables");
                    b[pos[i]] = e;
                }
            }
            p.add_term(MultiIndex(b), c);
        }
        p
    }

    /// Splits a polynomial of degree <= 2 as `x^T A x + b^T x + r`.
    /// Returns `None` when the degree exceeds 2.
    pub fn decompose_quadratic(&self) -> Option<(SymMat, Vec<f64>, f64)> {
        if self.degree > 2 {
            return None;
        }
        let d = self.dim;
        let mut a = SymMat::zeros(d);
        let mut b = vec![0.0; d];
        let mut r = 0.0;
        for (alpha, &c) in &self.terms {
            match alpha.degree() {
                0 => r = c,
                1 => {
                    let i = alpha.0.iter().position(|&e| e == 1).unwrap();
                    b[i] = c;
                }
                2 => {
                    let nz: Vec<usize> =
                        (0..d).filter(|&i| alpha.0[i] > 0).collect();
                    if nz.len() == 1 {
                        a.add_to(nz[0], nz[0], c);
                    } else {
                        a.add_to(nz[0], nz[1], 0.5 * c);
                    }
                }
                _ => unreachable!(),
            }
        }
        Some((a, b, r))
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(a, &c)| TermRecord { exponents: a.0.clone(), coeff: c })
            .collect()
    }

    pub fn from_records(dim: usize, records: &[TermRecord]) -> Self {
        Polynomial::from_terms(
            dim,
            records.iter().map(|r| (MultiIndex(r.exponents.clone()), r.coeff)),
        )
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_records().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(d)?;
        let dim = records
            .first()
            .map(|r| r.exponents.len())
            .ok_or_else(|| serde::de::Error::custom("empty polynomial record list"))?;
        Ok(Polynomial::from_records(dim, &records))
    }
}

/// Ordered monomial basis of all `|alpha| <= max_degree` in the global
/// graded-lexicographic order; the first entry is the zero multi-index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    pub dim: usize,
    pub max_degree: u32,
    pub entries: Vec<MultiIndex>,
}

impl MonomialBasis {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Position of a multi-index in the basis.
    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.entries.binary_search_by(|e| e.cmp(alpha)).ok()
    }

    /// Evaluates the basis vector `y(x)`.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.entries.iter().map(|a| a.eval(x)).collect()
    }
}

/// Number of monomials in `d` variables of degree at most `omega`:
/// `C(d + omega, omega)`.
pub fn basis_len(d: usize, omega: u32) -> usize {
    let mut acc: usize = 1;
    for i in 1..=omega as usize {
        acc = acc * (d + i) / i;
    }
    acc
}

/// Enumerates the monomial basis of degree at most `omega` in `d` variables.
pub fn enumerate_basis(d: usize, omega: u32) -> Result<MonomialBasis, PolyError> {
    if d == 0 {
        return Err(PolyError::ZeroDimension);
    }
    let size = basis_len(d, omega);
    if size > MAX_BASIS_LEN {
        return Err(PolyError::BasisTooLarge { d, omega, size });
    }
    let mut entries = Vec::with_capacity(size);
    let mut current = vec![0u32; d];
    for deg in 0..=omega {
        push_compositions(&mut entries, &mut current, 0, deg);
    }
    debug_assert_eq!(entries.len(), size);
    debug_assert!(entries.windows(2).all(|w| w[0] < w[1]));
    Ok(MonomialBasis { dim: d, max_degree: omega, entries })
}

/// Emits all exponent tuples of total degree `remaining` starting at `pos`,
/// leading variable largest first.
fn push_compositions(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        current[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        push_compositions(out, current, pos + 1, remaining - e);
        current[pos] = 0;
    }
}

/// The coefficient matrices `B_alpha` satisfying
/// `sum_alpha B_alpha x^alpha = y(x) y(x)^T` over the basis `y` at degree
/// `omega/2`.
#[derive(Debug, Clone)]
pub struct MomentMatrixSet {
    pub dim: usize,
    pub omega: u32,
    /// Basis at degree `omega/2` indexing rows/columns of each `B_alpha`.
    pub basis: MonomialBasis,
    pub matrices: BTreeMap<MultiIndex, SymMat>,
}

impl MomentMatrixSet {
    /// Evaluates `sum_alpha B_alpha v^alpha`.
    pub fn reconstruct(&self, v: &[f64]) -> SymMat {
        let n = self.basis.len();
        let mut out = SymMat::zeros(n);
        for (alpha, b) in &self.matrices {
            let w = alpha.eval(v);
            if w != 0.0 {
                for j in 0..n {
                    for i in 0..=j {
                        out.add_to(i, j, w * b.get(i, j));
                    }
                }
            }
        }
        out
    }
}

pub fn moment_matrices(d: usize, omega: u32) -> Result<MomentMatrixSet, PolyError> {
    if omega == 0 || omega % 2 != 0 {
        return Err(PolyError::OddDegree(omega));
    }
    let full = basis_len(d, omega);
    if full > MAX_BASIS_LEN {
        return Err(PolyError::BasisTooLarge { d, omega, size: full });
    }
    let basis = enumerate_basis(d, omega / 2)?;
    let n = basis.len();
    let mut matrices: BTreeMap<MultiIndex, SymMat> = BTreeMap::new();
    for j in 0..n {
        for i in 0..=j {
            let alpha = basis.entries[i].add(&basis.entries[j]);
            matrices
                .entry(alpha)
                .or_insert_with(|| SymMat::zeros(n))
                .set(i, j, 1.0);
        }
    }
    Ok(MomentMatrixSet { dim: d, omega, basis, matrices })
}

/// Outcome of an SOS-convexity check at the natural degree.
#[derive(Debug, Clone)]
pub enum SosConvexity {
    /// Gram matrix of the gap polynomial in the doubled basis.
    Certificate(SymMat),
    /// No certificate at the natural degree. Not a proof of non-convexity.
    Refuted,
}

/// Certifies SOS-convexity of `g` by checking that the gap polynomial
/// `g(v) - g(x) - grad g(x)^T (v - x)` over the doubled variables `(v, x)`
/// is a sum of squares.
pub fn verify_sos_convex(g: &Polynomial, tol: f64) -> Result<SosConvexity, PolyError> {
    let d = g.dim();
    // gap(v, x) with v mapped to variables 0..d and x to d..2d
    let v_map: Vec<usize> = (0..d).collect();
    let x_map: Vec<usize> = (d..2 * d).collect();
    let mut gap = g.embed(2 * d, &v_map);
    gap = gap.add(&g.embed(2 * d, &x_map).scale(-1.0));
    for i in 0..d {
        // -dg/dx_i(x) * (v_i - x_i)
        let di = g.derivative(i).embed(2 * d, &x_map);
        let mut lin = Polynomial::zero(2 * d);
        lin.add_term(MultiIndex::unit(2 * d, i), 1.0);
        lin.add_term(MultiIndex::unit(2 * d, d + i), -1.0);
        gap = gap.add(&di.mul(&lin).scale(-1.0));
    }
    if gap.num_terms() == 0 {
        // Affine g: the gap vanishes identically.
        return Ok(SosConvexity::Certificate(SymMat::zeros(1)));
    }

    let deg = gap.degree();
    let half = deg.div_ceil(2);
    let gram_basis = enumerate_basis(2 * d, half)?;
    let moments = moment_matrices(2 * d, 2 * half)?;
    let nu = gram_basis.len();

    // Feasibility SDP: find Q >= 0 with tr(Q B_alpha) = gap_alpha for every
    // alpha up to degree 2*half; minimize tr(Q) to keep the certificate
    // bounded.
    let mut problem = SdpProblem {
        psd_blocks: vec![nu],
        free_vars: 0,
        objective: LinearFunctional::new().trace_term(0, &SymMat::identity(nu), 1.0),
        eq_constraints: vec![],
        ineq_constraints: vec![],
        hint: None,
    };
    for alpha in enumerate_basis(2 * d, 2 * half)?.entries {
        let coeff = gap.coeff(&alpha);
        let f = match moments.matrices.get(&alpha) {
            Some(b) => LinearFunctional::new().trace_term(0, b, 1.0),
            None => continue,
        };
        problem.eq_constraints.push((f, coeff));
    }

    let sol = conicif::solve_sdp(&problem, tol)?;
    match sol.status {
        SdpStatus::Optimal | SdpStatus::Inaccurate => {
            Ok(SosConvexity::Certificate(sol.block_values[0].clone()))
        }
        SdpStatus::Infeasible => Ok(SosConvexity::Refuted),
        other => Err(PolyError::Backend(ConicError::Backend(format!(
            "unexpected backend status {other:?} in SOS-convexity check"
        )))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_univariate() {
        let b = enumerate_basis(1, 2).unwrap();
        let exps: Vec<u32> = b.entries.iter().map(|a| a.0[0]).collect();
        assert_eq!(exps, vec![0, 1, 2]);
    }

    #[test]
    fn basis_counts() {
        assert_eq!(enumerate_basis(2, 2).unwrap().len(), 6);
        assert_eq!(enumerate_basis(4, 4).unwrap().len(), 70);
        for d in 1..=4 {
            for omega in 0..=6 {
                assert_eq!(enumerate_basis(d, omega).unwrap().len(), basis_len(d, omega));
            }
        }
    }

    #[test]
    fn basis_order_is_graded_lex() {
        let b = enumerate_basis(2, 2).unwrap();
        let want = vec![
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![2, 0],
            vec![1, 1],
            vec![0, 2],
        ];
        let got: Vec<Vec<u32>> = b.entries.iter().map(|a| a.0.clone()).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn basis_cap_enforced() {
        assert!(matches!(
            enumerate_basis(30, 8),
            Err(PolyError::BasisTooLarge { .. })
        ));
    }

    #[test]
    fn eval_examples() {
        // x1^2 + x2 at (2, 1)
        let p = Polynomial::from_terms(
            2,
            [
                (MultiIndex(vec![2, 0]), 1.0),
                (MultiIndex(vec![0, 1]), 1.0),
            ],
        );
        assert_relative_eq!(p.eval(&[2.0, 1.0]).unwrap(), 5.0);
        assert_relative_eq!(Polynomial::zero(3).eval(&[1.0, 2.0, 3.0]).unwrap(), 0.0);
        let h = Polynomial::squared_distance(&[1.0, 1.0]);
        assert_relative_eq!(h.eval(&[0.0, 0.0]).unwrap(), 2.0);
        assert!(p.eval(&[1.0]).is_err());
    }

    #[test]
    fn moment_matrices_univariate() {
        let mm = moment_matrices(1, 2).unwrap();
        // (1, x)(1, x)^T: B0 = e11, B1 pairs (1,x), B2 = e22.
        let b0 = &mm.matrices[&MultiIndex(vec![0])];
        let b1 = &mm.matrices[&MultiIndex(vec![1])];
        let b2 = &mm.matrices[&MultiIndex(vec![2])];
        assert_eq!(b0.get(0, 0), 1.0);
        assert_eq!(b0.get(1, 1), 0.0);
        assert_eq!(b1.get(0, 1), 1.0);
        assert_eq!(b1.get(0, 0), 0.0);
        assert_eq!(b2.get(1, 1), 1.0);
    }

    #[test]
    fn moment_matrix_cross_term_pattern() {
        let mm = moment_matrices(2, 2).unwrap();
        let b11 = &mm.matrices[&MultiIndex(vec![1, 1])];
        let mut ones = 0;
        let n = mm.basis.len();
        for i in 0..n {
            for j in 0..n {
                if b11.get(i, j) == 1.0 {
                    ones += 1;
                }
            }
        }
        assert_eq!(ones, 2, "x1 pairs with x2 in exactly two positions");
    }

    #[test]
    fn moment_reconstruction_identity() {
        let mm = moment_matrices(3, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let v: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let yv = mm.basis.eval(&v);
            let n = mm.basis.len();
            let mut outer = SymMat::zeros(n);
            for j in 0..n {
                for i in 0..=j {
                    outer.set(i, j, yv[i] * yv[j]);
                }
            }
            let rec = mm.reconstruct(&v);
            assert!(rec.sub(&outer).norm_fro() <= 1e-12, "identity violated");
        }
    }

    #[test]
    fn odd_degree_rejected() {
        assert!(matches!(moment_matrices(2, 3), Err(PolyError::OddDegree(3))));
    }

    #[test]
    fn quartic_is_sos_convex() {
        let mut g = Polynomial::zero(1);
        g.add_term(MultiIndex(vec![4]), 1.0);
        assert!(matches!(
            verify_sos_convex(&g, 1e-8).unwrap(),
            SosConvexity::Certificate(_)
        ));
    }

    #[test]
    fn psd_quadratic_is_sos_convex() {
        // x^T A x with A = [[2, 1], [1, 1]] (PSD)
        let g = Polynomial::from_terms(
            2,
            [
                (MultiIndex(vec![2, 0]), 2.0),
                (MultiIndex(vec![1, 1]), 2.0),
                (MultiIndex(vec![0, 2]), 1.0),
            ],
        );
        assert!(matches!(
            verify_sos_convex(&g, 1e-8).unwrap(),
            SosConvexity::Certificate(_)
        ));
    }

    #[test]
    fn concave_quadratic_refuted() {
        let mut g = Polynomial::zero(1);
        g.add_term(MultiIndex(vec![2]), -1.0);
        assert!(matches!(
            verify_sos_convex(&g, 1e-8).unwrap(),
            SosConvexity::Refuted
        ));
    }

    #[test]
    fn derivative_and_product() {
        // d/dx1 (x1^2 x2) = 2 x1 x2
        let p = Polynomial::from_terms(2, [(MultiIndex(vec![2, 1]), 1.0)]);
        let dp = p.derivative(0);
        assert_eq!(dp.coeff(&MultiIndex(vec![1, 1])), 2.0);
        let q = Polynomial::from_terms(2, [(MultiIndex(vec![1, 0]), 1.0)]);
        let pq = p.mul(&q);
        assert_eq!(pq.coeff(&MultiIndex(vec![3, 1])), 1.0);
    }

    #[test]
    fn record_roundtrip_is_exact() {
        let p = Polynomial::from_terms(
            3,
            [
                (MultiIndex(vec![4, 0, 0]), 1.0 / 3.0),
                (MultiIndex(vec![0, 1, 0]), -2.7182818284590451),
                (MultiIndex(vec![0, 0, 0]), 1e-17),
            ],
        );
        let json = serde_json::to_string(&p).unwrap();
        let back: Polynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn quadratic_decomposition() {
        // x1^2 + 4 x1 x2 + 3 x2 - 5
        let p = Polynomial::from_terms(
            2,
            [
                (MultiIndex(vec![2, 0]), 1.0),
                (MultiIndex(vec![1, 1]), 4.0),
                (MultiIndex(vec![0, 1]), 3.0),
                (MultiIndex(vec![0, 0]), -5.0),
            ],
        );
        let (a, b, r) = p.decompose_quadratic().unwrap();
        assert_eq!(a.get(0, 0), 1.0);
        assert_eq!(a.get(0, 1), 2.0);
        assert_eq!(b, vec![0.0, 3.0]);
        assert_eq!(r, -5.0);
        let x = [0.7, -1.3];
        let direct = p.eval(&x).unwrap();
        let via = a.quad_form(&x) + b[0] * x[0] + b[1] * x[1] + r;
        assert_relative_eq!(direct, via, epsilon = 1e-12);
    }
}
