//! Data model of the two-stage adjustable robust problem and its composite
//! reformulation: per-constraint matrix offsets, the structured linear
//! operator mapping decision blocks to LMI blocks, and its adjoint.
//!
//! Primal points live in a flat vector laid out as
//! `(x, y0, U, svec(Theta_1..q), lambda)` with matrix blocks in isometric
//! `svec` coordinates; dual points stack `svec` blocks of size `k+1` per
//! robust constraint. With this layout the plain Euclidean inner product
//! equals the trace inner product blockwise, so adjoints and norms need no
//! extra weighting.

use crate::linalg::{tri_index, tri_len, SymMat, SQRT2};
use crate::projections::SosConvexSet;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReformError {
    #[error("ball radius parameter must be strictly positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("dimension inconsistency: {0}")]
    Inconsistent(String),
    #[error("decision-rule mix must lie in [0,1], got {0}")]
    InvalidRuleMix(f64),
}

/// Euclidean-ball uncertainty set `{w : ||w - center||^2 <= radius_sq}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallUncertainty {
    pub center: Vec<f64>,
    /// Right-hand side of the squared-norm inequality; strictly positive.
    pub radius_sq: f64,
}

impl BallUncertainty {
    pub fn dim(&self) -> usize {
        self.center.len()
    }
}

/// Separable objective atom for one first-stage coordinate:
/// `linear * x + quadratic * x^2` plus an optional box indicator.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct ObjectiveAtom {
    pub linear: f64,
    pub quadratic: f64,
    pub bounds: Option<(f64, f64)>,
}

impl ObjectiveAtom {
    pub fn linear(c: f64) -> Self {
        ObjectiveAtom { linear: c, quadratic: 0.0, bounds: None }
    }

    /// `argmin_u atom(u) + (u - v)^2 / (2 tau)`.
    pub fn prox(&self, v: f64, tau: f64) -> f64 {
        let u = (v - tau * self.linear) / (1.0 + 2.0 * tau * self.quadratic);
        match self.bounds {
            Some((lo, hi)) => u.clamp(lo, hi),
            None => u,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.linear * x + self.quadratic * x * x
    }
}

/// Full data of the adjustable robust problem: affine constraint data over
/// the ball, the box and SOS-convex first-stage sets, proximable objective
/// atoms, and the decision-rule mix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArpProblem {
    /// First-stage dimension `d`.
    pub first_stage_dim: usize,
    /// Recourse dimension `q`.
    pub recourse_dim: usize,
    /// Uncertainty dimension `k`.
    pub uncertainty_dim: usize,
    /// Constant constraint vectors `a_i^{(0)}`, one per constraint.
    pub a0: Vec<Vec<f64>>,
    /// Uncertainty-coupled constraint matrices, row-major `d x k`; column
    /// `l` holds `a_i^{(l+1)}`.
    pub a_mats: Vec<Vec<f64>>,
    /// Constant right-hand sides `b_i^{(0)}`.
    pub b0: Vec<f64>,
    /// Uncertainty-coupled right-hand side vectors `(b_i^{(1)} .. b_i^{(k)})`.
    pub bvec: Vec<Vec<f64>>,
    /// Recourse cost vectors `c_i`.
    pub c: Vec<Vec<f64>>,
    pub ball: BallUncertainty,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
    pub sos_set: SosConvexSet,
    pub f_atoms: Vec<ObjectiveAtom>,
    /// Decision-rule mix: weight of the affine part, `1 - rho` on the
    /// quadratic part. Fixed problem datum, not optimized.
    pub rho: f64,
}

impl ArpProblem {
    pub fn num_constraints(&self) -> usize {
        self.a0.len()
    }

    pub fn validate(&self) -> Result<(), ReformError> {
        let (d, q, k, m) = (
            self.first_stage_dim,
            self.recourse_dim,
            self.uncertainty_dim,
            self.num_constraints(),
        );
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(ReformError::InvalidRuleMix(self.rho));
        }
        let check = |name: &str, cond: bool| -> Result<(), ReformError> {
            if cond {
                Ok(())
            } else {
                Err(ReformError::Inconsistent(name.to_string()))
            }
        };
        check("ball center length", self.ball.dim() == k)?;
        check("a_mats count", self.a_mats.len() == m)?;
        check("b0 count", self.b0.len() == m)?;
        check("bvec count", self.bvec.len() == m)?;
        check("c count", self.c.len() == m)?;
        for i in 0..m {
            check("a0 row length", self.a0[i].len() == d)?;
            check("a_mat shape", self.a_mats[i].len() == d * k)?;
            check("bvec row length", self.bvec[i].len() == k)?;
            check("c row length", self.c[i].len() == q)?;
        }
        check("box lo length", self.box_lo.len() == d)?;
        check("box hi length", self.box_hi.len() == d)?;
        check("sos set dimension", self.sos_set.dim() == d)?;
        check("objective atoms length", self.f_atoms.len() == d)?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Offsets into the flat primal vector `(x, y0, U, Theta, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimalLayout {
    pub d: usize,
    pub q: usize,
    pub k: usize,
    pub m: usize,
    /// `tri_len(k)`, the svec length of one Theta block.
    pub theta_len: usize,
    pub y0_off: usize,
    pub u_off: usize,
    pub theta_off: usize,
    pub lambda_off: usize,
    pub total: usize,
}

impl PrimalLayout {
    pub fn new(d: usize, q: usize, k: usize, m: usize) -> Self {
        let theta_len = tri_len(k);
        let y0_off = d;
        let u_off = y0_off + q;
        let theta_off = u_off + q * k;
        let lambda_off = theta_off + q * theta_len;
        PrimalLayout { d, q, k, m, theta_len, y0_off, u_off, theta_off, lambda_off, total: lambda_off + m }
    }

    pub fn theta_range(&self, p: usize) -> std::ops::Range<usize> {
        let start = self.theta_off + p * self.theta_len;
        start..start + self.theta_len
    }
}

/// The composite reformulation: constraint offsets `B_i`, the structured
/// operator `K` and its adjoint, and dimension bookkeeping. Immutable after
/// construction; operator applications are pure.
#[derive(Debug, Clone)]
pub struct CompositeProblem {
    pub arp: ArpProblem,
    pub b_offsets: Vec<SymMat>,
    pub layout: PrimalLayout,
    /// svec length of one dual block in `S^{k+1}`.
    pub block_len: usize,
    /// `||center||^2 - radius_sq`.
    ball_const: f64,
    /// Nonzero entries of each `c_i` for sparse accumulation.
    c_nz: Vec<Vec<(usize, f64)>>,
    /// Whether `A_i` is identically zero.
    a_zero: Vec<bool>,
    /// Positions of diagonal entries within a `Theta` svec block.
    theta_diag: Vec<usize>,
}

/// Builds the composite problem. Fails when the ball radius parameter is
/// not strictly positive (the LMI characterization needs strict
/// feasibility) or the problem data is dimensionally inconsistent.
pub fn build_composite(arp: ArpProblem) -> Result<CompositeProblem, ReformError> {
    arp.validate()?;
    if arp.ball.radius_sq <= 0.0 {
        return Err(ReformError::NonPositiveRadius(arp.ball.radius_sq));
    }
    let (d, q, k, m) = (
        arp.first_stage_dim,
        arp.recourse_dim,
        arp.uncertainty_dim,
        arp.num_constraints(),
    );
    let layout = PrimalLayout::new(d, q, k, m);
    let mut b_offsets = Vec::with_capacity(m);
    for i in 0..m {
        let mut b = SymMat::zeros(k + 1);
        for l in 0..k {
            b.set(l, k, -0.5 * arp.bvec[i][l]);
        }
        b.set(k, k, -arp.b0[i]);
        b_offsets.push(b);
    }
    let ball_const =
        arp.ball.center.iter().map(|x| x * x).sum::<f64>() - arp.ball.radius_sq;
    let c_nz = arp
        .c
        .iter()
        .map(|ci| {
            ci.iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(p, &v)| (p, v))
                .collect()
        })
        .collect();
    let a_zero = arp.a_mats.iter().map(|a| a.iter().all(|&v| v == 0.0)).collect();
    let theta_diag = (0..k).map(|j| tri_index(j, j)).collect();
    Ok(CompositeProblem {
        arp,
        b_offsets,
        layout,
        block_len: tri_len(k + 1),
        ball_const,
        c_nz,
        a_zero,
        theta_diag,
    })
}

impl CompositeProblem {
    pub fn primal_dim(&self) -> usize {
        self.layout.total
    }

    pub fn dual_dim(&self) -> usize {
        self.layout.m * self.block_len
    }

    /// Dimension of the lifted dual space `(Y, X, X)`.
    pub fn lifted_dual_dim(&self) -> usize {
        self.dual_dim() + 2 * self.primal_dim()
    }

    /// Total primal plus lifted dual dimension.
    pub fn total_variables(&self) -> usize {
        self.primal_dim() + self.lifted_dual_dim()
    }

    pub fn ball_const(&self) -> f64 {
        self.ball_const
    }

    /// Applies the structured operator: block `i` of the output is
    /// `svec(Psi_i(x))`.
    pub fn apply_k(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.primal_dim());
        debug_assert_eq!(out.len(), self.dual_dim());
        let lay = &self.layout;
        let (d, k) = (lay.d, lay.k);
        let one_minus_rho = 1.0 - self.arp.rho;
        let rho = self.arp.rho;
        let center = &self.arp.ball.center;
        out.fill(0.0);
        for i in 0..lay.m {
            let lam = x[lay.lambda_off + i];
            let block = &mut out[i * self.block_len..(i + 1) * self.block_len];
            // top-left: lam * svec(I_k) - (1-rho) * sum_p c_ip svec(Theta_p)
            for &dpos in &self.theta_diag {
                block[dpos] = lam;
            }
            for &(p, cip) in &self.c_nz[i] {
                let theta = &x[lay.theta_range(p)];
                let w = one_minus_rho * cip;
                for (t, &tv) in theta.iter().enumerate() {
                    block[t] -= w * tv;
                }
            }
            // last column: sqrt(2) * (-lam * center - (rho U^T c_i + A_i^T x)/2)
            let col = &mut block[lay.theta_len..];
            for l in 0..k {
                let mut v = -lam * center[l];
                for &(p, cip) in &self.c_nz[i] {
                    v -= 0.5 * rho * cip * x[lay.u_off + p * k + l];
                }
                if !self.a_zero[i] {
                    let a = &self.arp.a_mats[i];
                    let mut atx = 0.0;
                    for r in 0..d {
                        atx += a[r * k + l] * x[r];
                    }
                    v -= 0.5 * atx;
                }
                col[l] = SQRT2 * v;
            }
            // bottom-right scalar
            let mut s = lam * self.ball_const;
            for (r, &a0r) in self.arp.a0[i].iter().enumerate() {
                s -= a0r * x[r];
            }
            for &(p, cip) in &self.c_nz[i] {
                s -= rho * cip * x[lay.y0_off + p];
            }
            col[k] = s;
        }
    }

    /// Adjoint of [`CompositeProblem::apply_k`] with respect to the flat
    /// Euclidean (= blockwise trace) inner product.
    pub fn apply_k_adjoint(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.dual_dim());
        debug_assert_eq!(out.len(), self.primal_dim());
        let lay = &self.layout;
        let (d, k) = (lay.d, lay.k);
        let one_minus_rho = 1.0 - self.arp.rho;
        let rho = self.arp.rho;
        let center = &self.arp.ball.center;
        out.fill(0.0);
        let mut m12 = vec![0.0; k];
        for i in 0..lay.m {
            let block = &y[i * self.block_len..(i + 1) * self.block_len];
            let col = &block[lay.theta_len..];
            for l in 0..k {
                m12[l] = col[l] / SQRT2;
            }
            let s22 = col[k];

            // x -= A_i m12 + a0_i s22
            if !self.a_zero[i] {
                let a = &self.arp.a_mats[i];
                for r in 0..d {
                    let mut acc = 0.0;
                    for l in 0..k {
                        acc += a[r * k + l] * m12[l];
                    }
                    out[r] -= acc;
                }
            }
            for (r, &a0r) in self.arp.a0[i].iter().enumerate() {
                out[r] -= a0r * s22;
            }
            for &(p, cip) in &self.c_nz[i] {
                // y0 -= rho c_i s22
                out[lay.y0_off + p] -= rho * cip * s22;
                // U -= rho c_i m12^T
                for l in 0..k {
                    out[lay.u_off + p * k + l] -= rho * cip * m12[l];
                }
                // Theta_p -= (1-rho) c_ip Psi_{i,11}
                let w = one_minus_rho * cip;
                let range = lay.theta_range(p);
                let theta = &mut out[range];
                for (t, tv) in theta.iter_mut().enumerate() {
                    *tv -= w * block[t];
                }
            }
            // lambda_i = tr(Psi_11) - 2 center^T m12 + (||center||^2 - r) s22
            let mut tr = 0.0;
            for &dpos in &self.theta_diag {
                tr += block[dpos];
            }
            let ctm: f64 = center.iter().zip(&m12).map(|(a, b)| a * b).sum();
            out[lay.lambda_off + i] = tr - 2.0 * ctm + self.ball_const * s22;
        }
    }

    /// Checks membership of `K x` in the product of shifted PSD cones:
    /// every `Psi_i(x) - B_i` must have smallest eigenvalue `>= -tol`, and
    /// every multiplier must satisfy `lambda_i >= -tol`.
    pub fn lmi_feasibility(&self, x: &[f64], tol: f64) -> bool {
        for i in 0..self.layout.m {
            if x[self.layout.lambda_off + i] < -tol {
                return false;
            }
        }
        let mut kx = vec![0.0; self.dual_dim()];
        self.apply_k(x, &mut kx);
        for i in 0..self.layout.m {
            let block = SymMat::from_svec_slice(
                self.layout.k + 1,
                &kx[i * self.block_len..(i + 1) * self.block_len],
            );
            let shifted = block.sub(&self.b_offsets[i]);
            match crate::linalg::sym_eig(&shifted) {
                Ok((w, _)) => {
                    if w.last().copied().unwrap_or(0.0) < -tol {
                        return false;
                    }
                }
                Err(_) => return false,
            }
        }
        true
    }

    /// Evaluates the quadratic robust constraints at sampled uncertainty
    /// realizations (uniform in the ball plus boundary points) and returns
    /// the worst margin `min_i min_w  w^T P_i w + 2 q_i^T w + beta_i`.
    /// Nonnegative margins corroborate the LMI certificate empirically.
    pub fn robust_feasibility_sample(&self, x: &[f64], n_samples: usize, seed: u64) -> f64 {
        assert!(n_samples >= 1);
        let lay = &self.layout;
        let (d, q, k) = (lay.d, lay.q, lay.k);
        let rho = self.arp.rho;
        let radius = self.arp.ball.radius_sq.sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = f64::INFINITY;
        let mut w = vec![0.0; k];
        for s in 0..n_samples {
            // direction uniform on the sphere, radius uniform in volume;
            // every fourth sample sits exactly on the boundary
            let mut norm = 0.0;
            for wi in w.iter_mut() {
                *wi = rng.sample::<f64, _>(rand_distr::StandardNormal);
                norm += *wi * *wi;
            }
            norm = norm.sqrt().max(1e-300);
            let r_frac = if s % 4 == 0 {
                1.0
            } else {
                rng.random_range(0.0..1.0f64).powf(1.0 / k as f64)
            };
            let scale = radius * r_frac / norm;
            for (wi, &ci) in w.iter_mut().zip(&self.arp.ball.center) {
                *wi = *wi * scale + ci;
            }
            for i in 0..lay.m {
                // P_i = -(1-rho) sum_p c_ip Theta_p applied as w^T P_i w
                let mut quad = 0.0;
                for &(p, cip) in &self.c_nz[i] {
                    let theta =
                        SymMat::from_svec_slice(k, &x[lay.theta_range(p)]);
                    quad -= (1.0 - rho) * cip * theta.quad_form(&w);
                }
                // q_i = -(rho U^T c_i + A_i^T x - b_i) / 2
                let mut lin = 0.0;
                for l in 0..k {
                    let mut qi = self.arp.bvec[i][l];
                    for &(p, cip) in &self.c_nz[i] {
                        qi -= rho * cip * x[lay.u_off + p * k + l];
                    }
                    if !self.a_zero[i] {
                        let a = &self.arp.a_mats[i];
                        for r in 0..d {
                            qi -= a[r * k + l] * x[r];
                        }
                    }
                    lin += qi * w[l];
                }
                // beta_i = -a0_i^T x + b0_i - rho c_i^T y0
                let mut beta = self.arp.b0[i];
                for (r, &a0r) in self.arp.a0[i].iter().enumerate() {
                    beta -= a0r * x[r];
                }
                for &(p, cip) in &self.c_nz[i] {
                    beta -= rho * cip * x[lay.y0_off + p];
                }
                let _ = q;
                worst = worst.min(quad + lin + beta);
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Tiny handcrafted instance with m = k = d = q = 1.
    fn tiny_arp() -> ArpProblem {
        ArpProblem {
            first_stage_dim: 1,
            recourse_dim: 1,
            uncertainty_dim: 1,
            a0: vec![vec![1.0]],
            a_mats: vec![vec![0.5]],
            b0: vec![0.25],
            bvec: vec![vec![-1.0]],
            c: vec![vec![2.0]],
            ball: BallUncertainty { center: vec![1.0], radius_sq: 1.0 },
            box_lo: vec![0.0],
            box_hi: vec![10.0],
            sos_set: SosConvexSet::new(1, vec![], None).unwrap(),
            f_atoms: vec![ObjectiveAtom::linear(1.0)],
            rho: 0.5,
        }
    }

    fn random_vec(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn dimensions_of_tiny_instance() {
        let cp = build_composite(tiny_arp()).unwrap();
        assert_eq!(cp.primal_dim(), 5);
        assert_eq!(cp.dual_dim(), 3);
        assert_eq!(cp.lifted_dual_dim(), 13);
    }

    #[test]
    fn rejects_nonpositive_radius() {
        let mut arp = tiny_arp();
        arp.ball.radius_sq = 0.0;
        assert!(matches!(
            build_composite(arp),
            Err(ReformError::NonPositiveRadius(_))
        ));
    }

    #[test]
    fn rejects_inconsistent_dims() {
        let mut arp = tiny_arp();
        arp.c[0] = vec![1.0, 2.0];
        assert!(matches!(build_composite(arp), Err(ReformError::Inconsistent(_))));
    }

    #[test]
    fn offsets_follow_rhs_data() {
        let cp = build_composite(tiny_arp()).unwrap();
        let b = &cp.b_offsets[0];
        assert_eq!(b.get(0, 0), 0.0);
        assert_eq!(b.get(0, 1), 0.5); // -bvec/2 = -(-1)/2
        assert_eq!(b.get(1, 1), -0.25); // -b0
    }

    #[test]
    fn k_is_linear_and_zero_at_zero() {
        let cp = build_composite(tiny_arp()).unwrap();
        let zero = vec![0.0; cp.primal_dim()];
        let mut out = vec![1.0; cp.dual_dim()];
        cp.apply_k(&zero, &mut out);
        assert!(out.iter().all(|&v| v == 0.0));

        let x1 = random_vec(cp.primal_dim(), 1);
        let x2 = random_vec(cp.primal_dim(), 2);
        let alpha = 0.73;
        let mut lhs = vec![0.0; cp.dual_dim()];
        let combo: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| alpha * a + b).collect();
        cp.apply_k(&combo, &mut lhs);
        let mut k1 = vec![0.0; cp.dual_dim()];
        let mut k2 = vec![0.0; cp.dual_dim()];
        cp.apply_k(&x1, &mut k1);
        cp.apply_k(&x2, &mut k2);
        for i in 0..lhs.len() {
            assert_relative_eq!(lhs[i], alpha * k1[i] + k2[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn unit_lambda_block_reads_off_ball_data() {
        let cp = build_composite(tiny_arp()).unwrap();
        let mut x = vec![0.0; cp.primal_dim()];
        x[cp.layout.lambda_off] = 1.0;
        let mut out = vec![0.0; cp.dual_dim()];
        cp.apply_k(&x, &mut out);
        let block = SymMat::from_svec_slice(2, &out);
        // [[I, -center], [-center^T, ||center||^2 - r]]
        assert_relative_eq!(block.get(0, 0), 1.0, epsilon = 1e-12);
        assert_relative_eq!(block.get(0, 1), -1.0, epsilon = 1e-12);
        assert_relative_eq!(block.get(1, 1), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn adjoint_of_unit_bottom_corner() {
        let cp = build_composite(tiny_arp()).unwrap();
        // Psi_1 = e_{k+1} e_{k+1}^T: only the 2,2 entry set
        let mut block = SymMat::zeros(2);
        block.set(1, 1, 1.0);
        let y = block.svec();
        let mut out = vec![0.0; cp.primal_dim()];
        cp.apply_k_adjoint(y.as_slice(), &mut out);
        // x = -a0, y0 = -rho c, lambda = ||center||^2 - r
        assert_relative_eq!(out[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(out[cp.layout.y0_off], -0.5 * 2.0, epsilon = 1e-12);
        assert_relative_eq!(out[cp.layout.lambda_off], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn adjoint_identity_on_random_pairs() {
        let cp = build_composite(tiny_arp()).unwrap();
        let mut kx = vec![0.0; cp.dual_dim()];
        let mut kty = vec![0.0; cp.primal_dim()];
        for seed in 0..100 {
            let x = random_vec(cp.primal_dim(), seed);
            let y = random_vec(cp.dual_dim(), 1000 + seed);
            cp.apply_k(&x, &mut kx);
            cp.apply_k_adjoint(&y, &mut kty);
            let lhs: f64 = kx.iter().zip(&y).map(|(a, b)| a * b).sum();
            let rhs: f64 = x.iter().zip(&kty).map(|(a, b)| a * b).sum();
            assert!(
                (lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()),
                "adjoint identity violated: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn lmi_feasibility_examples() {
        let mut arp = tiny_arp();
        arp.b0 = vec![0.0];
        arp.bvec = vec![vec![0.0]];
        let cp = build_composite(arp).unwrap();
        // zero point with zero offsets is (weakly) feasible
        let zero = vec![0.0; cp.primal_dim()];
        assert!(cp.lmi_feasibility(&zero, 1e-9));
        // large lambda with benign data stays feasible
        let mut x = vec![0.0; cp.primal_dim()];
        x[cp.layout.lambda_off] = 50.0;
        assert!(cp.lmi_feasibility(&x, 1e-9));
        // negative multiplier violates
        x[cp.layout.lambda_off] = -1.0;
        assert!(!cp.lmi_feasibility(&x, 1e-9));
    }

    #[test]
    fn certified_points_pass_sampling() {
        let cp = build_composite(tiny_arp()).unwrap();
        // x = 0 with big lambda: Psi - B = lam*[[1,-1],[-1,0]] - B; find a
        // certified point by scanning lambda
        let mut x = vec![0.0; cp.primal_dim()];
        x[0] = -2.0; // a0 = 1, so -a0^T x = 2 > 0 helps the corner
        for lam in [0.1, 0.5, 1.0, 2.0] {
            x[cp.layout.lambda_off] = lam;
            if cp.lmi_feasibility(&x, 1e-9) {
                let margin = cp.robust_feasibility_sample(&x, 10_000, 7);
                assert!(margin >= -1e-7, "margin {margin} for lambda {lam}");
                return;
            }
        }
        panic!("no certified lambda found");
    }

    #[test]
    fn infeasible_point_is_witnessed_by_sampling() {
        // x <= w for all w in [0, 2]: x = 0.5 violates at w = 0.
        let arp = ArpProblem {
            first_stage_dim: 1,
            recourse_dim: 1,
            uncertainty_dim: 1,
            a0: vec![vec![1.0]],
            a_mats: vec![vec![0.0]],
            b0: vec![0.0],
            bvec: vec![vec![1.0]],
            c: vec![vec![0.0]],
            ball: BallUncertainty { center: vec![1.0], radius_sq: 1.0 },
            box_lo: vec![0.0],
            box_hi: vec![10.0],
            sos_set: SosConvexSet::new(1, vec![], None).unwrap(),
            f_atoms: vec![ObjectiveAtom::linear(1.0)],
            rho: 0.5,
        };
        let cp = build_composite(arp).unwrap();
        let mut x = vec![0.0; cp.primal_dim()];
        x[0] = 0.5;
        let margin = cp.robust_feasibility_sample(&x, 10_000, 3);
        assert!(margin < 0.0, "expected a violation witness, margin {margin}");
        // analytic violating realization: w = 0 gives margin -x = -0.5
        assert!(margin >= -0.5 - 1e-9);
    }

    #[test]
    fn shrinking_ball_margin_approaches_center_slack() {
        let mut arp = tiny_arp();
        arp.a_mats = vec![vec![0.0]];
        arp.bvec = vec![vec![0.0]];
        arp.b0 = vec![3.0];
        arp.c = vec![vec![0.0]];
        arp.ball.radius_sq = 1e-8;
        let cp = build_composite(arp).unwrap();
        let mut x = vec![0.0; cp.primal_dim()];
        x[0] = 1.0; // constraint x <= 3: slack at center = 2
        let margin = cp.robust_feasibility_sample(&x, 1000, 5);
        assert_relative_eq!(margin, 2.0, epsilon = 1e-3);
    }

    #[test]
    fn serialization_roundtrip() {
        let arp = tiny_arp();
        let json = arp.to_json().unwrap();
        let back = ArpProblem::from_json(&json).unwrap();
        assert_eq!(back.a0, arp.a0);
        assert_eq!(back.bvec, arp.bvec);
        assert_eq!(back.rho, arp.rho);
        assert_eq!(back.ball.radius_sq, arp.ball.radius_sq);
        let json2 = back.to_json().unwrap();
        assert_eq!(json, json2);
    }

    #[test]
    fn atom_prox_examples() {
        let lin = ObjectiveAtom::linear(1.0);
        assert_relative_eq!(lin.prox(2.0, 0.25), 1.75);
        let quad = ObjectiveAtom { linear: 0.0, quadratic: 1.0, bounds: None };
        // prox of x^2 at v: v / (1 + 2 tau)
        assert_relative_eq!(quad.prox(3.0, 0.5), 1.5);
        let boxed = ObjectiveAtom { linear: 0.0, quadratic: 0.0, bounds: Some((0.0, 1.0)) };
        assert_relative_eq!(boxed.prox(2.5, 1.0), 1.0);
    }
}
