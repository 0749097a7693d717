//! Primal-dual proximal splitting on the lifted composite form.
//!
//! The composite objective `F + E + H + G(K .)` is lifted so that all dual
//! blocks update in parallel: the lifted operator stacks `K` with one
//! identity copy of the primal per indicator term, and each dual step is a
//! conjugate prox evaluated through Moreau's identity from a projection.
//! The PSD-cone and box projections are closed-form; set projections may
//! solve an inner SDP.

use crate::linalg::{power_method_norm, project_psd, SymMat};
use crate::projections::{ProjectionError, SetProjector};
use crate::reformulator::{CompositeProblem, ObjectiveAtom};
use serde::Serialize;
use std::time::Instant;
use thiserror::Error;

/// Safety inflation on the power-method norm estimate: the estimate is a
/// lower bound, and the step-size condition must hold for the true norm.
pub const NORM_INFLATION: f64 = 1.02;
/// Step-size product `tau * sigma * ||K||^2` targeted by the automatic rule.
pub const STEP_PRODUCT: f64 = 1.3;

#[derive(Debug, Error)]
pub enum PdpsError {
    #[error("step sizes violate tau*sigma*||K||^2 < 4/3 (product {0:.4})")]
    StepSizeGuard(f64),
    #[error("objective atom with negative curvature at coordinate {0}")]
    UnsupportedAtom(usize),
    #[error("configuration invalid: {0}")]
    InvalidConfig(String),
}

/// Solver configuration. Defaults follow the benchmark setup: dual step
/// 0.5, automatic primal step from a 12-iteration power-method estimate,
/// full extrapolation, stopping tolerance 1e-5.
#[derive(Debug, Clone)]
pub struct PdpsConfig {
    pub sigma: f64,
    /// Primal step; `None` selects `STEP_PRODUCT / (sigma * ||K||_est^2)`
    /// with the inflated norm estimate.
    pub tau: Option<f64>,
    /// Extrapolation weight in [0, 1].
    pub theta: f64,
    /// Relative-change stopping tolerance.
    pub eps: f64,
    pub max_iters: usize,
    pub power_iters: usize,
    pub seed: u64,
    /// Tolerance of inner SDP projections; kept well below `eps` so inexact
    /// proximal steps do not pollute the outer iteration.
    pub inner_tol: f64,
    pub record_history: bool,
    /// Verify Moreau recombination of every dual prox each 100 iterations.
    pub debug_checks: bool,
}

impl Default for PdpsConfig {
    fn default() -> Self {
        PdpsConfig {
            sigma: 0.5,
            tau: None,
            theta: 1.0,
            eps: 1e-5,
            max_iters: 200_000,
            power_iters: 12,
            seed: 0,
            inner_tol: 1e-8,
            record_history: false,
            debug_checks: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIters,
    InnerFailure,
}

/// Result of one solve: final primal point, objective value of the smooth
/// part at it, iteration count, timing, and termination status.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x_final: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub status: SolveStatus,
    /// Last value of the two relative-change residuals (primal, dual).
    pub final_residuals: (f64, f64),
    /// Per-iteration stopping quantity, when recording was requested.
    pub history: Option<Vec<f64>>,
    pub norm_estimate: f64,
    pub tau: f64,
    pub sigma: f64,
    /// Failure detail when `status == InnerFailure`.
    pub failure: Option<String>,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    objective: f64,
    iterations: usize,
    wall_time_s: f64,
    status: SolveStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_history: &'a Option<Vec<f64>>,
}

impl SolveReport {
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(&ReportDoc {
            objective: self.objective,
            iterations: self.iterations,
            wall_time_s: self.wall_time_s,
            status: self.status,
            residual_history: &self.history,
        })
    }
}

/// A set-indicator dual block acting on the primal through the identity;
/// the projector handles an embedded slice and passes other coordinates
/// through.
pub struct EmbeddedSet<'a> {
    pub offset: usize,
    pub projector: &'a SetProjector,
}

/// Lifted composite problem: separable objective atoms (the prox of `F`),
/// an optional LMI block through the structured operator, a box block, and
/// further identity set blocks.
pub struct LiftedProblem<'a> {
    pub atoms: Vec<ObjectiveAtom>,
    pub lmi: Option<&'a CompositeProblem>,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
    pub set_blocks: Vec<EmbeddedSet<'a>>,
}

impl<'a> LiftedProblem<'a> {
    /// Assembles the lifted form of an adjustable robust composite: `F`
    /// from the objective atoms plus multiplier clamps, `E` the first-stage
    /// box, `H` the SOS-convex set, `G` the shifted PSD cones through `K`.
    pub fn for_composite(
        cp: &'a CompositeProblem,
        sos_projector: &'a SetProjector,
    ) -> Result<Self, PdpsError> {
        let n = cp.primal_dim();
        let lay = &cp.layout;
        let mut atoms = vec![ObjectiveAtom::default(); n];
        for (i, atom) in cp.arp.f_atoms.iter().enumerate() {
            if atom.quadratic < 0.0 {
                return Err(PdpsError::UnsupportedAtom(i));
            }
            atoms[i] = *atom;
        }
        for i in 0..lay.m {
            atoms[lay.lambda_off + i].bounds = Some((0.0, f64::INFINITY));
        }
        let mut box_lo = vec![f64::NEG_INFINITY; n];
        let mut box_hi = vec![f64::INFINITY; n];
        box_lo[..lay.d].copy_from_slice(&cp.arp.box_lo);
        box_hi[..lay.d].copy_from_slice(&cp.arp.box_hi);
        Ok(LiftedProblem {
            atoms,
            lmi: Some(cp),
            box_lo,
            box_hi,
            set_blocks: vec![EmbeddedSet { offset: 0, projector: sos_projector }],
        })
    }

    pub fn primal_dim(&self) -> usize {
        self.atoms.len()
    }

    fn lmi_dim(&self) -> usize {
        self.lmi.map_or(0, CompositeProblem::dual_dim)
    }

    /// Dimension of the stacked dual space `(Y, X, X, ...)`.
    pub fn lifted_dual_dim(&self) -> usize {
        self.lmi_dim() + (1 + self.set_blocks.len()) * self.primal_dim()
    }

    /// Applies the lifted operator `x -> (K x, x, ..., x)`.
    pub fn apply_lifted(&self, x: &[f64], out: &mut [f64]) {
        let ld = self.lmi_dim();
        if let Some(cp) = self.lmi {
            cp.apply_k(x, &mut out[..ld]);
        }
        let n = self.primal_dim();
        for b in 0..(1 + self.set_blocks.len()) {
            out[ld + b * n..ld + (b + 1) * n].copy_from_slice(x);
        }
    }

    /// Adjoint of [`LiftedProblem::apply_lifted`].
    pub fn apply_lifted_adjoint(&self, y: &[f64], out: &mut [f64]) {
        let ld = self.lmi_dim();
        let n = self.primal_dim();
        if let Some(cp) = self.lmi {
            cp.apply_k_adjoint(&y[..ld], out);
        } else {
            out.fill(0.0);
        }
        for b in 0..(1 + self.set_blocks.len()) {
            let seg = &y[ld + b * n..ld + (b + 1) * n];
            for (o, s) in out.iter_mut().zip(seg) {
                *o += s;
            }
        }
    }

    /// Power-method estimate of the lifted operator norm.
    pub fn estimate_lifted_norm(&self, iters: usize, seed: u64) -> f64 {
        power_method_norm(
            |x, out| self.apply_lifted(x, out),
            |y, out| self.apply_lifted_adjoint(y, out),
            self.primal_dim(),
            self.lifted_dual_dim(),
            iters,
            seed,
        )
    }
}

/// Proximal step of the separable objective: atom-wise prox on every
/// coordinate (multiplier coordinates carry a nonnegativity clamp).
pub fn prox_f(atoms: &[ObjectiveAtom], v: &mut [f64], tau: f64) {
    debug_assert_eq!(atoms.len(), v.len());
    for (x, atom) in v.iter_mut().zip(atoms) {
        *x = atom.prox(*x, tau);
    }
}

/// Conjugate prox of the box indicator via Moreau:
/// `v - sigma * clamp(v / sigma)`. Coordinates with infinite bounds map to
/// zero.
pub fn prox_e_star(v: &mut [f64], sigma: f64, lo: &[f64], hi: &[f64]) {
    for i in 0..v.len() {
        let p = (v[i] / sigma).clamp(lo[i], hi[i]);
        v[i] -= sigma * p;
    }
}

/// Conjugate prox of the shifted-PSD indicator, blockwise:
/// `Psi - sigma * (B + P_psd(Psi / sigma - B))`.
pub fn prox_g_star(cp: &CompositeProblem, y: &mut [f64], sigma: f64) {
    let n = cp.layout.k + 1;
    let bl = cp.block_len;
    for i in 0..cp.layout.m {
        let seg = &mut y[i * bl..(i + 1) * bl];
        let psi = SymMat::from_svec_slice(n, seg);
        let proj = project_psd(&psi.scale(1.0 / sigma).sub(&cp.b_offsets[i]));
        let res = psi.sub(&cp.b_offsets[i].add(&proj).scale(sigma));
        res.svec_into(seg);
    }
}

/// Conjugate prox of a set indicator via Moreau:
/// `v - sigma * P(v / sigma)`. The projection may solve an inner SDP, whose
/// failure is propagated.
pub fn prox_h_star(
    block: &EmbeddedSet<'_>,
    v: &mut [f64],
    sigma: f64,
) -> Result<(), ProjectionError> {
    let scaled: Vec<f64> = v.iter().map(|x| x / sigma).collect();
    let inner_dim = match block.projector {
        SetProjector::Moment(mp) => mp.set().dim(),
        SetProjector::Identity => scaled.len() - block.offset,
        SetProjector::Halfspace { full_dim, .. } => *full_dim,
        SetProjector::Quadratic { full_dim, .. } => *full_dim,
    };
    let lo = block.offset;
    let hi = lo + inner_dim;
    let projected = block.projector.project(&scaled[lo..hi])?;
    for x in v[..lo].iter_mut() {
        *x = 0.0;
    }
    for (x, p) in v[lo..hi].iter_mut().zip(&projected) {
        *x -= sigma * p;
    }
    for x in v[hi..].iter_mut() {
        *x = 0.0;
    }
    Ok(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn diff_norm_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Runs the splitting iteration on a lifted problem until the maximum of
/// the primal and dual relative changes drops to `eps`.
pub fn solve_lifted(problem: &LiftedProblem<'_>, cfg: &PdpsConfig) -> Result<SolveReport, PdpsError> {
    if cfg.sigma <= 0.0 || cfg.eps <= 0.0 || !(0.0..=1.0).contains(&cfg.theta) {
        return Err(PdpsError::InvalidConfig(
            "sigma and eps must be positive, theta in [0,1]".into(),
        ));
    }
    let start = Instant::now();
    let n = problem.primal_dim();
    let ld = problem.lmi_dim();
    let nblocks = problem.set_blocks.len();

    let norm_est_raw = problem.estimate_lifted_norm(cfg.power_iters, cfg.seed);
    let norm_est = NORM_INFLATION * norm_est_raw;
    let tau = match cfg.tau {
        Some(t) => t,
        None => {
            if norm_est == 0.0 {
                1.0
            } else {
                STEP_PRODUCT / (cfg.sigma * norm_est * norm_est)
            }
        }
    };
    let product = tau * cfg.sigma * norm_est * norm_est;
    if product >= 4.0 / 3.0 {
        return Err(PdpsError::StepSizeGuard(product));
    }

    let mut x = vec![0.0; n];
    let mut x_bar = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut y = vec![0.0; ld];
    let mut z_box = vec![0.0; n];
    let mut z_sets = vec![vec![0.0; n]; nblocks];
    let mut y_work = vec![0.0; ld];
    let mut z_work = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut kty = vec![0.0; n];

    let mut history = cfg.record_history.then(Vec::new);
    let mut residuals = (f64::INFINITY, f64::INFINITY);

    for iter in 0..cfg.max_iters {
        // dual norms of the previous lifted point
        let mut den_dual_sq = z_box.iter().map(|v| v * v).sum::<f64>()
            + y.iter().map(|v| v * v).sum::<f64>();
        for z in &z_sets {
            den_dual_sq += z.iter().map(|v| v * v).sum::<f64>();
        }

        let mut num_dual_sq = 0.0;

        // LMI block
        if let Some(cp) = problem.lmi {
            cp.apply_k(&x_bar, &mut y_work);
            for (w, yv) in y_work.iter_mut().zip(&y) {
                *w = yv + cfg.sigma * *w;
            }
            prox_g_star(cp, &mut y_work, cfg.sigma);
            if cfg.debug_checks && iter % 100 == 0 {
                debug_moreau_psd(cp, &y, &x_bar, &y_work, cfg.sigma);
            }
            num_dual_sq += diff_norm_sq(&y_work, &y);
            std::mem::swap(&mut y, &mut y_work);
        }

        // box block
        for i in 0..n {
            z_work[i] = z_box[i] + cfg.sigma * x_bar[i];
        }
        prox_e_star(&mut z_work, cfg.sigma, &problem.box_lo, &problem.box_hi);
        num_dual_sq += diff_norm_sq(&z_work, &z_box);
        std::mem::swap(&mut z_box, &mut z_work);

        // set blocks
        for (b, block) in problem.set_blocks.iter().enumerate() {
            for i in 0..n {
                z_work[i] = z_sets[b][i] + cfg.sigma * x_bar[i];
            }
            if let Err(e) = prox_h_star(block, &mut z_work, cfg.sigma) {
                return Ok(finish_report(
                    x,
                    problem,
                    iter,
                    start,
                    SolveStatus::InnerFailure,
                    residuals,
                    history,
                    norm_est_raw,
                    tau,
                    cfg,
                    Some(e.to_string()),
                ));
            }
            num_dual_sq += diff_norm_sq(&z_work, &z_sets[b]);
            std::mem::swap(&mut z_sets[b], &mut z_work);
        }

        // primal step
        if problem.lmi.is_some() {
            problem.lmi.unwrap().apply_k_adjoint(&y, &mut kty);
        } else {
            kty.fill(0.0);
        }
        for i in 0..n {
            grad[i] = kty[i] + z_box[i];
        }
        for z in &z_sets {
            for i in 0..n {
                grad[i] += z[i];
            }
        }
        for i in 0..n {
            x_new[i] = x[i] - tau * grad[i];
        }
        prox_f(&problem.atoms, &mut x_new, tau);

        // stopping quantities (relative change against the previous point)
        let num_primal = diff_norm_sq(&x_new, &x).sqrt();
        let den_primal = norm(&x).max(1e-12);
        let den_dual = den_dual_sq.sqrt().max(1e-12);
        let rel_primal = num_primal / den_primal;
        let rel_dual = num_dual_sq.sqrt() / den_dual;
        residuals = (rel_primal, rel_dual);
        let crit = rel_primal.max(rel_dual);
        if let Some(h) = history.as_mut() {
            h.push(crit);
        }

        // extrapolation
        for i in 0..n {
            x_bar[i] = x_new[i] + cfg.theta * (x_new[i] - x[i]);
        }
        std::mem::swap(&mut x, &mut x_new);

        // the first two iterations start from zero; their relative changes
        // are dominated by the denominator guard
        if iter >= 2 && crit <= cfg.eps {
            return Ok(finish_report(
                x,
                problem,
                iter + 1,
                start,
                SolveStatus::Converged,
                residuals,
                history,
                norm_est_raw,
                tau,
                cfg,
                None,
            ));
        }
    }
    Ok(finish_report(
        x,
        problem,
        cfg.max_iters,
        start,
        SolveStatus::MaxIters,
        residuals,
        history,
        norm_est_raw,
        tau,
        cfg,
        None,
    ))
}

#[allow(clippy::too_many_arguments)]
fn finish_report(
    x: Vec<f64>,
    problem: &LiftedProblem<'_>,
    iterations: usize,
    start: Instant,
    status: SolveStatus,
    residuals: (f64, f64),
    history: Option<Vec<f64>>,
    norm_estimate: f64,
    tau: f64,
    cfg: &PdpsConfig,
    failure: Option<String>,
) -> SolveReport {
    let objective = problem
        .atoms
        .iter()
        .zip(&x)
        .map(|(a, &v)| a.value(v))
        .sum();
    SolveReport {
        x_final: x,
        objective,
        iterations,
        wall_time_s: start.elapsed().as_secs_f64(),
        status,
        final_residuals: residuals,
        history,
        norm_estimate,
        tau,
        sigma: cfg.sigma,
        failure,
    }
}

fn debug_moreau_psd(cp: &CompositeProblem, y_prev: &[f64], x_bar: &[f64], y_new: &[f64], sigma: f64) {
    // recombine: pre-prox point must equal prox + sigma * projection
    let mut pre = vec![0.0; cp.dual_dim()];
    cp.apply_k(x_bar, &mut pre);
    for (p, yv) in pre.iter_mut().zip(y_prev) {
        *p = yv + sigma * *p;
    }
    let n = cp.layout.k + 1;
    let bl = cp.block_len;
    for i in 0..cp.layout.m {
        let v = SymMat::from_svec_slice(n, &pre[i * bl..(i + 1) * bl]);
        let proj = cp.b_offsets[i].add(&project_psd(&v.scale(1.0 / sigma).sub(&cp.b_offsets[i])));
        let recombined = SymMat::from_svec_slice(n, &y_new[i * bl..(i + 1) * bl])
            .add(&proj.scale(sigma));
        let err = recombined.sub(&v).norm_fro();
        debug_assert!(err <= 1e-8 * (1.0 + v.norm_fro()), "Moreau drift {err}");
    }
}

/// Solves the adjustable robust composite problem, routing the SOS-convex
/// projection to the cheapest exact machinery.
pub fn solve(cp: &CompositeProblem, cfg: &PdpsConfig) -> Result<SolveReport, PdpsError> {
    let projector = SetProjector::for_sos_set(&cp.arp.sos_set, cfg.inner_tol)
        .map_err(|e| PdpsError::InvalidConfig(format!("sos set projector: {e}")))?;
    let lifted = LiftedProblem::for_composite(cp, &projector)?;
    solve_lifted(&lifted, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::SosConvexSet;
    use crate::reformulator::{build_composite, ArpProblem, BallUncertainty};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// m = 0 instance: no robust rows, so K vanishes and the lifted
    /// operator is two stacked identities.
    fn unconstrained_arp(d: usize) -> ArpProblem {
        ArpProblem {
            first_stage_dim: d,
            recourse_dim: 1,
            uncertainty_dim: 1,
            a0: vec![],
            a_mats: vec![],
            b0: vec![],
            bvec: vec![],
            c: vec![],
            ball: BallUncertainty { center: vec![0.0], radius_sq: 1.0 },
            box_lo: vec![0.0; d],
            box_hi: vec![1.0; d],
            sos_set: SosConvexSet::new(d, vec![], None).unwrap(),
            f_atoms: vec![ObjectiveAtom::linear(1.0); d],
            rho: 0.5,
        }
    }

    #[test]
    fn lifted_norm_of_zero_k_is_sqrt2() {
        let cp = build_composite(unconstrained_arp(2)).unwrap();
        let projector = SetProjector::for_sos_set(&cp.arp.sos_set, 1e-8).unwrap();
        let lifted = LiftedProblem::for_composite(&cp, &projector).unwrap();
        let est = lifted.estimate_lifted_norm(40, 3);
        assert_relative_eq!(est, 2f64.sqrt(), epsilon = 1e-6);
    }

    #[test]
    fn prox_f_shifts_linear_and_clamps_multipliers() {
        let atoms = vec![
            ObjectiveAtom::linear(1.0),
            ObjectiveAtom { linear: 0.0, quadratic: 0.0, bounds: Some((0.0, f64::INFINITY)) },
            ObjectiveAtom::default(),
        ];
        let mut v = vec![2.0, -1.0, 0.7];
        prox_f(&atoms, &mut v, 0.5);
        assert_relative_eq!(v[0], 1.5);
        assert_relative_eq!(v[1], 0.0);
        assert_relative_eq!(v[2], 0.7);
    }

    #[test]
    fn prox_e_star_moreau_identity() {
        let lo = vec![0.0, f64::NEG_INFINITY];
        let hi = vec![1.0, f64::INFINITY];
        let sigma = 0.7;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let v: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let mut out = v.clone();
            prox_e_star(&mut out, sigma, &lo, &hi);
            for i in 0..2 {
                let p = (v[i] / sigma).clamp(lo[i], hi[i]);
                assert_relative_eq!(v[i], out[i] + sigma * p, epsilon = 1e-12);
            }
        }
        // interior point maps to zero on the box coordinate
        let mut v = vec![0.35, 2.0];
        prox_e_star(&mut v, 1.0, &lo, &hi);
        assert_relative_eq!(v[0], 0.0);
        assert_relative_eq!(v[1], 0.0);
    }

    #[test]
    fn prox_g_star_examples() {
        // single-constraint composite with zero offsets
        let mut arp = unconstrained_arp(1);
        arp.a0 = vec![vec![0.0]];
        arp.a_mats = vec![vec![0.0]];
        arp.b0 = vec![0.0];
        arp.bvec = vec![vec![0.0]];
        arp.c = vec![vec![0.0]];
        let cp = build_composite(arp).unwrap();
        let sigma = 0.5;

        // PSD input yields zero dual residual
        let psi = SymMat::from_diag(&[1.0, 2.0]);
        let mut y = psi.svec().as_slice().to_vec();
        prox_g_star(&cp, &mut y, sigma);
        assert!(y.iter().all(|v| v.abs() <= 1e-12));

        // negative-definite input is preserved
        let neg = SymMat::from_diag(&[-1.0, -1.0]);
        let mut y2 = neg.svec().as_slice().to_vec();
        prox_g_star(&cp, &mut y2, sigma);
        let back = SymMat::from_svec_slice(2, &y2);
        assert!(back.sub(&neg).norm_fro() <= 1e-12);

        // Moreau recombination on random blocks
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..25 {
            let mut m = SymMat::zeros(2);
            for j in 0..2 {
                for i in 0..=j {
                    m.set(i, j, rng.random_range(-2.0..2.0));
                }
            }
            let mut y3 = m.svec().as_slice().to_vec();
            prox_g_star(&cp, &mut y3, sigma);
            let prox = SymMat::from_svec_slice(2, &y3);
            let proj = cp.b_offsets[0]
                .add(&project_psd(&m.scale(1.0 / sigma).sub(&cp.b_offsets[0])));
            let recombined = prox.add(&proj.scale(sigma));
            assert!(recombined.sub(&m).norm_fro() <= 1e-10);
        }
    }

    #[test]
    fn solve_reaches_box_constrained_minimizer() {
        // minimize sum x_i over [0,1]^3 with no robust rows: minimizer 0.
        let cp = build_composite(unconstrained_arp(3)).unwrap();
        let cfg = PdpsConfig { eps: 1e-7, ..Default::default() };
        let report = solve(&cp, &cfg).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        assert!(report.iterations <= 500, "took {}", report.iterations);
        for i in 0..3 {
            assert!(report.x_final[i].abs() <= 1e-5);
        }
        assert!(report.objective.abs() <= 1e-4);
    }

    #[test]
    fn step_guard_rejects_oversized_steps() {
        let mut arp = unconstrained_arp(1);
        arp.a0 = vec![vec![1.0]];
        arp.a_mats = vec![vec![0.0]];
        arp.b0 = vec![0.0];
        arp.bvec = vec![vec![0.0]];
        arp.c = vec![vec![1.0]];
        let cp = build_composite(arp).unwrap();
        let cfg = PdpsConfig { tau: Some(1e3), ..Default::default() };
        assert!(matches!(solve(&cp, &cfg), Err(PdpsError::StepSizeGuard(_))));
    }

    #[test]
    fn negative_curvature_atom_rejected() {
        let mut arp = unconstrained_arp(1);
        arp.f_atoms = vec![ObjectiveAtom { linear: 0.0, quadratic: -1.0, bounds: None }];
        let cp = build_composite(arp).unwrap();
        assert!(matches!(
            solve(&cp, &PdpsConfig::default()),
            Err(PdpsError::UnsupportedAtom(0))
        ));
    }

    #[test]
    fn report_serialization_contains_required_fields() {
        let cp = build_composite(unconstrained_arp(1)).unwrap();
        let report = solve(&cp, &PdpsConfig::default()).unwrap();
        let json = report.to_json().unwrap();
        for key in ["objective", "iterations", "wall_time_s", "status"] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
    }
}
