//! Projection operators used by the proximal steps: boxes, shifted PSD
//! cones, convex quadratic sets (via a lifted SDP), and SOS-convex sets (via
//! a moment SDP whose first-order coordinates recover the projection), plus
//! a brute-force oracle for cross-checking.

use crate::conicif::{self, ConicError, LinearFunctional, SdpProblem, SdpSolution, SdpStatus};
use crate::linalg::{project_psd, SymMat};
use crate::polycore::{
    basis_len, enumerate_basis, moment_matrices, MonomialBasis, MultiIndex, PolyError, Polynomial,
};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use thiserror::Error;

/// Tolerance for the constructor-time PSD check on quadratic constraint
/// matrices and for the Slater strict-feasibility check.
const PSD_CHECK_TOL: f64 = 1e-10;
const SLATER_TOL: f64 = 1e-9;
/// Post-solve feasibility required of SDP-computed projections.
const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("box bounds inverted at coordinate {0}")]
    BoundInversion(usize),
    #[error("dimension mismatch: expected {0}, got {1}")]
    DimensionMismatch(usize, usize),
    #[error("constraint matrix {0} is not positive semidefinite (min eigenvalue {1:.3e})")]
    NotPsd(usize, f64),
    #[error("stored Slater point is not strictly feasible: g_{0} = {1:.3e}")]
    SlaterViolation(usize, f64),
    #[error("projection target set is infeasible")]
    InfeasibleSet,
    #[error("backend returned non-optimal status {0:?}")]
    BackendStatus(SdpStatus),
    #[error("projection duality gap {gap:.3e} exceeds tolerance {tol:.3e}")]
    DualityGap { gap: f64, tol: f64 },
    #[error("computed point violates constraint {index}: {value:.3e}")]
    Infeasible { index: usize, value: f64 },
    #[error("oracle projection did not converge (final step {0:.3e})")]
    OracleNonConvergence(f64),
    #[error(transparent)]
    Conic(#[from] ConicError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Componentwise clamp onto `[lo, hi]`; infinite bounds leave a side free.
pub fn project_box(v: &[f64], lo: &[f64], hi: &[f64]) -> Result<Vec<f64>, ProjectionError> {
    if v.len() != lo.len() || v.len() != hi.len() {
        return Err(ProjectionError::DimensionMismatch(v.len(), lo.len()));
    }
    for i in 0..v.len() {
        if lo[i] > hi[i] {
            return Err(ProjectionError::BoundInversion(i));
        }
    }
    Ok(v.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&x, (&l, &h))| x.clamp(l, h))
        .collect())
}

/// Frobenius-nearest point of the shifted cone `B + S_+`:
/// `B + P_psd(Psi - B)`.
pub fn project_shifted_psd(psi: &SymMat, b: &SymMat) -> Result<SymMat, ProjectionError> {
    if psi.dim() != b.dim() {
        return Err(ProjectionError::DimensionMismatch(psi.dim(), b.dim()));
    }
    Ok(b.add(&project_psd(&psi.sub(b))))
}

/// Intersection of convex quadratic constraints
/// `x^T A_j x + b_j^T x + r_j <= 0` with every `A_j` PSD.
#[derive(Debug, Clone)]
pub struct QuadraticSet {
    dim: usize,
    constraints: Vec<(SymMat, Vec<f64>, f64)>,
}

impl QuadraticSet {
    pub fn new(
        dim: usize,
        constraints: Vec<(SymMat, Vec<f64>, f64)>,
    ) -> Result<Self, ProjectionError> {
        for (j, (a, b, _)) in constraints.iter().enumerate() {
            if a.dim() != dim || b.len() != dim {
                return Err(ProjectionError::DimensionMismatch(dim, a.dim().max(b.len())));
            }
            let (w, _) = crate::linalg::sym_eig(a).map_err(|_| ProjectionError::NotPsd(j, f64::NAN))?;
            if let Some(&min) = w.last() {
                if min < -PSD_CHECK_TOL {
                    return Err(ProjectionError::NotPsd(j, min));
                }
            }
        }
        Ok(QuadraticSet { dim, constraints })
    }

    /// Polyhedron `rows . x <= rhs` as a quadratic set with zero curvature.
    pub fn polyhedron(dim: usize, rows: Vec<(Vec<f64>, f64)>) -> Result<Self, ProjectionError> {
        let constraints = rows
            .into_iter()
            .map(|(a, rhs)| (SymMat::zeros(dim), a, -rhs))
            .collect();
        Self::new(dim, constraints)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[(SymMat, Vec<f64>, f64)] {
        &self.constraints
    }

    pub fn eval_constraint(&self, j: usize, x: &[f64]) -> f64 {
        let (a, b, r) = &self.constraints[j];
        a.quad_form(x) + b.iter().zip(x).map(|(bi, xi)| bi * xi).sum::<f64>() + r
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        (0..self.constraints.len()).all(|j| self.eval_constraint(j, x) <= tol)
    }
}

/// Builds the lifted projection SDP onto a quadratic set:
/// minimize `tr(S) - 2 v^T u + ||v||^2` over `[[1, u^T], [u, S]] >= 0`
/// subject to `tr(A_j S) + b_j^T u + r_j <= 0`, whose minimizer `u` is the
/// projection.
fn quadratic_projection_problem(set: &QuadraticSet, v: &[f64]) -> SdpProblem {
    let d = set.dim;
    let mut objective = LinearFunctional::new();
    objective.constant = v.iter().map(|x| x * x).sum();
    for i in 0..d {
        objective = objective.block(0, 1 + i, 1 + i, 1.0).block(0, 0, 1 + i, -2.0 * v[i]);
    }
    let eq = vec![(LinearFunctional::new().block(0, 0, 0, 1.0), 1.0)];
    let mut ineq = Vec::with_capacity(set.constraints.len());
    for (a, b, r) in &set.constraints {
        let mut f = LinearFunctional::new();
        for j in 0..d {
            for i in 0..=j {
                let w = if i == j { 1.0 } else { 2.0 };
                let coeff = w * a.get(i, j);
                if coeff != 0.0 {
                    f = f.block(0, 1 + i, 1 + j, coeff);
                }
            }
        }
        for (i, &bi) in b.iter().enumerate() {
            if bi != 0.0 {
                f = f.block(0, 0, 1 + i, bi);
            }
        }
        ineq.push((f, -r));
    }
    SdpProblem {
        psd_blocks: vec![d + 1],
        free_vars: 0,
        objective,
        eq_constraints: eq,
        ineq_constraints: ineq,
        hint: None,
    }
}

/// Projects `v` onto a quadratic set through the lifted SDP. Backend
/// inaccuracy is reported, never silently accepted.
pub fn project_quadratic_set(
    v: &[f64],
    set: &QuadraticSet,
    tol: f64,
) -> Result<Vec<f64>, ProjectionError> {
    if v.len() != set.dim {
        return Err(ProjectionError::DimensionMismatch(set.dim, v.len()));
    }
    if set.constraints.is_empty() || set.contains(v, 0.0) {
        return Ok(v.to_vec());
    }
    let problem = quadratic_projection_problem(set, v);
    let sol = conicif::solve_sdp(&problem, tol)?;
    match sol.status {
        SdpStatus::Optimal => {}
        SdpStatus::Infeasible => return Err(ProjectionError::InfeasibleSet),
        other => return Err(ProjectionError::BackendStatus(other)),
    }
    if sol.gap > tol * (1.0 + sol.objective_value.abs()) * 10.0 {
        return Err(ProjectionError::DualityGap { gap: sol.gap, tol });
    }
    let z = &sol.block_values[0];
    let u: Vec<f64> = (0..set.dim).map(|i| z.get(0, 1 + i)).collect();
    for j in 0..set.constraints.len() {
        let val = set.eval_constraint(j, &u);
        if val > FEASIBILITY_TOL {
            return Err(ProjectionError::Infeasible { index: j, value: val });
        }
    }
    Ok(u)
}

/// Closed convex set cut out by SOS-convex polynomial inequalities
/// `g_j(x) <= 0`, with the relaxation degree fixed to the smallest even
/// integer covering every `g_j` and the distance objective.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SosConvexSet {
    dim: usize,
    gs: Vec<Polynomial>,
    omega: u32,
    slater_point: Option<Vec<f64>>,
}

impl SosConvexSet {
    pub fn new(
        dim: usize,
        gs: Vec<Polynomial>,
        slater_point: Option<Vec<f64>>,
    ) -> Result<Self, ProjectionError> {
        for g in &gs {
            if g.dim() != dim {
                return Err(ProjectionError::DimensionMismatch(dim, g.dim()));
            }
        }
        let max_deg = gs.iter().map(Polynomial::degree).max().unwrap_or(0).max(2);
        let omega = max_deg + (max_deg % 2);
        if let Some(pt) = &slater_point {
            if pt.len() != dim {
                return Err(ProjectionError::DimensionMismatch(dim, pt.len()));
            }
            for (j, g) in gs.iter().enumerate() {
                let val = g.eval(pt).map_err(ProjectionError::Poly)?;
                if val > -SLATER_TOL {
                    return Err(ProjectionError::SlaterViolation(j, val));
                }
            }
        }
        Ok(SosConvexSet { dim, gs, omega, slater_point })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn omega(&self) -> u32 {
        self.omega
    }

    pub fn polynomials(&self) -> &[Polynomial] {
        &self.gs
    }

    pub fn slater_point(&self) -> Option<&[f64]> {
        self.slater_point.as_deref()
    }

    /// Union of the coordinates appearing in any constraint; the rest pass
    /// through projections unchanged.
    pub fn active_coords(&self) -> Vec<usize> {
        let mut used = vec![false; self.dim];
        for g in &self.gs {
            for i in g.support_vars() {
                used[i] = true;
            }
        }
        (0..self.dim).filter(|&i| used[i]).collect()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.gs.iter().all(|g| g.eval(x).unwrap_or(f64::INFINITY) <= tol)
    }
}

/// Full output of a moment-SDP projection, for diagnostics and invariant
/// checks (the moment vector feeds the Jensen property).
#[derive(Debug, Clone)]
pub struct MomentProjection {
    pub point: Vec<f64>,
    /// Pseudo-moment vector over the reduced coordinates, in basis order.
    pub moments: Vec<f64>,
    /// Coordinates of the full space the moment relaxation ran over.
    pub active_coords: Vec<usize>,
    pub objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
}

/// Pre-assembled moment SDP for repeated projections onto one SOS-convex
/// set. Entries of the moment matrix double as the moment variables
/// (`X[i,j] = y_{beta_i + beta_j}`), tied together by equality rows; only
/// the distance objective changes between calls.
pub struct MomentProjector {
    set: SosConvexSet,
    active: Vec<usize>,
    reduced_gs: Vec<Polynomial>,
    /// Basis of all monomials up to `omega` over the reduced coordinates.
    full_basis: MonomialBasis,
    /// Representative moment-matrix entry for each alpha in `full_basis`.
    representative: Vec<(usize, usize)>,
    skeleton: SdpProblem,
    inner_tol: f64,
    last_solution: RefCell<Option<SdpSolution>>,
}

impl MomentProjector {
    pub fn new(set: &SosConvexSet, inner_tol: f64) -> Result<Self, ProjectionError> {
        let active = set.active_coords();
        let rd = active.len().max(1);
        let reduced_gs: Vec<Polynomial> = if active.is_empty() {
            vec![]
        } else {
            set.gs.iter().map(|g| g.restrict_vars(&active)).collect()
        };
        let omega = set.omega();
        let gram_basis = enumerate_basis(rd, omega / 2)?;
        let full_basis = enumerate_basis(rd, omega)?;
        let moments = moment_matrices(rd, omega)?;
        let nu = gram_basis.len();

        // representative entry for each alpha: first (i <= j) with
        // beta_i + beta_j = alpha in column-scan order
        let mut representative = vec![(usize::MAX, usize::MAX); full_basis.len()];
        for j in 0..nu {
            for i in 0..=j {
                let alpha = gram_basis.entries[i].add(&gram_basis.entries[j]);
                let pos = full_basis.position(&alpha).expect("pairing stays within degree");
                if representative[pos].0 == usize::MAX {
                    representative[pos] = (i, j);
                }
            }
        }

        let mut eq_constraints = Vec::new();
        // tie repeated entries to their representative
        for j in 0..nu {
            for i in 0..=j {
                let alpha = gram_basis.entries[i].add(&gram_basis.entries[j]);
                let pos = full_basis.position(&alpha).unwrap();
                let (ri, rj) = representative[pos];
                if (ri, rj) != (i, j) {
                    let f = LinearFunctional::new().block(0, i, j, 1.0).block(0, ri, rj, -1.0);
                    eq_constraints.push((f, 0.0));
                }
            }
        }
        // y_0 = 1
        eq_constraints.push((LinearFunctional::new().block(0, 0, 0, 1.0), 1.0));

        let mut ineq_constraints = Vec::new();
        for g in &reduced_gs {
            let mut f = LinearFunctional::new();
            for (alpha, &c) in g.terms() {
                let pos = full_basis
                    .position(alpha)
                    .expect("constraint degree within relaxation order");
                let (ri, rj) = representative[pos];
                f = f.block(0, ri, rj, c);
            }
            ineq_constraints.push((f, 0.0));
        }

        let skeleton = SdpProblem {
            psd_blocks: vec![nu],
            free_vars: 0,
            objective: LinearFunctional::new(),
            eq_constraints,
            ineq_constraints,
            hint: None,
        };
        Ok(MomentProjector {
            set: set.clone(),
            active,
            reduced_gs,
            full_basis,
            representative,
            skeleton,
            inner_tol,
            last_solution: RefCell::new(None),
        })
    }

    pub fn set(&self) -> &SosConvexSet {
        &self.set
    }

    /// Moment-matrix dimension of the inner SDP.
    pub fn moment_block_dim(&self) -> usize {
        self.skeleton.psd_blocks[0]
    }

    /// Number of variables of the reduced moment relaxation.
    pub fn reduced_dim(&self) -> usize {
        self.active.len()
    }

    pub fn project(&self, v: &[f64]) -> Result<MomentProjection, ProjectionError> {
        if v.len() != self.set.dim() {
            return Err(ProjectionError::DimensionMismatch(self.set.dim(), v.len()));
        }
        let rd = self.active.len();
        if rd == 0 {
            return Ok(MomentProjection {
                point: v.to_vec(),
                moments: vec![1.0],
                active_coords: vec![],
                objective: 0.0,
                dual_objective: 0.0,
                gap: 0.0,
            });
        }
        let v_red: Vec<f64> = self.active.iter().map(|&i| v[i]).collect();

        // Interior points are their own projection; skip the SDP.
        if self.reduced_gs.iter().all(|g| g.eval(&v_red).unwrap() <= 0.0) {
            let moments = self
                .full_basis
                .entries
                .iter()
                .map(|alpha| alpha.eval(&v_red))
                .collect();
            return Ok(MomentProjection {
                point: v.to_vec(),
                moments,
                active_coords: self.active.clone(),
                objective: 0.0,
                dual_objective: 0.0,
                gap: 0.0,
            });
        }

        let mut problem = self.skeleton.clone();
        let h = Polynomial::squared_distance(&v_red);
        let mut objective = LinearFunctional::new();
        for (alpha, &c) in h.terms() {
            if alpha.degree() == 0 {
                objective.constant += c;
            } else {
                let pos = self.full_basis.position(alpha).unwrap();
                let (ri, rj) = self.representative[pos];
                objective = objective.block(0, ri, rj, c);
            }
        }
        problem.objective = objective;
        if let Some(prior) = self.last_solution.borrow().as_ref() {
            problem = conicif::warm_hint(problem, prior)?;
        }

        let sol = conicif::solve_sdp(&problem, self.inner_tol)?;
        match sol.status {
            SdpStatus::Optimal => {}
            SdpStatus::Infeasible => return Err(ProjectionError::InfeasibleSet),
            other => return Err(ProjectionError::BackendStatus(other)),
        }
        if sol.gap > self.inner_tol * (1.0 + sol.objective_value.abs()) * 10.0 {
            return Err(ProjectionError::DualityGap { gap: sol.gap, tol: self.inner_tol });
        }

        let x = &sol.block_values[0];
        let moments: Vec<f64> = self
            .representative
            .iter()
            .map(|&(i, j)| x.get(i, j))
            .collect();
        let mut point = v.to_vec();
        for (red_idx, &full_idx) in self.active.iter().enumerate() {
            let e = MultiIndex::unit(rd, red_idx);
            let pos = self.full_basis.position(&e).unwrap();
            point[full_idx] = moments[pos];
        }
        let point_red: Vec<f64> = self.active.iter().map(|&i| point[i]).collect();
        for (j, g) in self.reduced_gs.iter().enumerate() {
            let val = g.eval(&point_red).unwrap();
            if val > FEASIBILITY_TOL {
                return Err(ProjectionError::Infeasible { index: j, value: val });
            }
        }
        *self.last_solution.borrow_mut() = Some(sol.clone());
        Ok(MomentProjection {
            point,
            moments,
            active_coords: self.active.clone(),
            objective: sol.objective_value,
            dual_objective: sol.dual_objective_value,
            gap: sol.gap,
        })
    }
}

/// Projects `v` onto an SOS-convex set by solving the moment relaxation and
/// reading off the first-order moments. Coordinates absent from every
/// constraint pass through unchanged.
pub fn project_sos_convex(
    v: &[f64],
    set: &SosConvexSet,
    inner_tol: f64,
) -> Result<Vec<f64>, ProjectionError> {
    Ok(MomentProjector::new(set, inner_tol)?.project(v)?.point)
}

/// A projection routed to the cheapest machinery that is exact for the set:
/// closed form for a single affine constraint, the lifted quadratic SDP for
/// degree-2 sets, and the moment SDP otherwise. Inactive coordinates pass
/// through.
pub enum SetProjector {
    Identity,
    Halfspace {
        full_dim: usize,
        active: Vec<usize>,
        normal: Vec<f64>,
        offset: f64,
        norm_sq: f64,
    },
    Quadratic {
        full_dim: usize,
        active: Vec<usize>,
        set: QuadraticSet,
        inner_tol: f64,
        last: RefCell<Option<SdpSolution>>,
    },
    Moment(MomentProjector),
}

impl SetProjector {
    pub fn for_sos_set(set: &SosConvexSet, inner_tol: f64) -> Result<Self, ProjectionError> {
        let active = set.active_coords();
        if active.is_empty() {
            return Ok(SetProjector::Identity);
        }
        let reduced: Vec<Polynomial> =
            set.polynomials().iter().map(|g| g.restrict_vars(&active)).collect();
        let max_deg = reduced.iter().map(Polynomial::degree).max().unwrap_or(0);
        if max_deg <= 1 && reduced.len() == 1 {
            let (_, b, r) = reduced[0].decompose_quadratic().unwrap();
            let norm_sq: f64 = b.iter().map(|x| x * x).sum();
            if norm_sq > 0.0 {
                return Ok(SetProjector::Halfspace {
                    full_dim: set.dim(),
                    active,
                    normal: b,
                    offset: r,
                    norm_sq,
                });
            }
        }
        if max_deg <= 2 {
            let constraints = reduced
                .iter()
                .map(|g| {
                    let (a, b, r) = g.decompose_quadratic().unwrap();
                    (a, b, r)
                })
                .collect();
            let qset = QuadraticSet::new(active.len(), constraints)?;
            return Ok(SetProjector::Quadratic {
                full_dim: set.dim(),
                active,
                set: qset,
                inner_tol,
                last: RefCell::new(None),
            });
        }
        Ok(SetProjector::Moment(MomentProjector::new(set, inner_tol)?))
    }

    /// Polyhedron `rows . x <= rhs` over the coordinates actually used by the
    /// rows.
    pub fn for_polyhedron(
        dim: usize,
        rows: Vec<(Vec<f64>, f64)>,
        inner_tol: f64,
    ) -> Result<Self, ProjectionError> {
        let mut used = vec![false; dim];
        for (a, _) in &rows {
            for (i, &c) in a.iter().enumerate() {
                if c != 0.0 {
                    used[i] = true;
                }
            }
        }
        let active: Vec<usize> = (0..dim).filter(|&i| used[i]).collect();
        if active.is_empty() {
            return Ok(SetProjector::Identity);
        }
        if rows.len() == 1 {
            let (a, rhs) = &rows[0];
            let normal: Vec<f64> = active.iter().map(|&i| a[i]).collect();
            let norm_sq: f64 = normal.iter().map(|x| x * x).sum();
            return Ok(SetProjector::Halfspace {
                full_dim: dim,
                active,
                normal,
                offset: -rhs,
                norm_sq,
            });
        }
        let reduced_rows: Vec<(Vec<f64>, f64)> = rows
            .into_iter()
            .map(|(a, rhs)| (active.iter().map(|&i| a[i]).collect(), rhs))
            .collect();
        let qset = QuadraticSet::polyhedron(active.len(), reduced_rows)?;
        Ok(SetProjector::Quadratic {
            full_dim: dim,
            active,
            set: qset,
            inner_tol,
            last: RefCell::new(None),
        })
    }

    pub fn project(&self, v: &[f64]) -> Result<Vec<f64>, ProjectionError> {
        match self {
            SetProjector::Identity => Ok(v.to_vec()),
            SetProjector::Halfspace { active, normal, offset, norm_sq, .. } => {
                let mut out = v.to_vec();
                let val: f64 =
                    active.iter().zip(normal).map(|(&i, n)| n * v[i]).sum::<f64>() + offset;
                if val > 0.0 {
                    let scale = val / norm_sq;
                    for (idx, &i) in active.iter().enumerate() {
                        out[i] -= scale * normal[idx];
                    }
                }
                Ok(out)
            }
            SetProjector::Quadratic { active, set, inner_tol, last, .. } => {
                let v_red: Vec<f64> = active.iter().map(|&i| v[i]).collect();
                if set.contains(&v_red, 0.0) {
                    return Ok(v.to_vec());
                }
                let mut problem = quadratic_projection_problem(set, &v_red);
                if let Some(prior) = last.borrow().as_ref() {
                    problem = conicif::warm_hint(problem, prior)?;
                }
                let sol = conicif::solve_sdp(&problem, *inner_tol)?;
                match sol.status {
                    SdpStatus::Optimal => {}
                    SdpStatus::Infeasible => return Err(ProjectionError::InfeasibleSet),
                    other => return Err(ProjectionError::BackendStatus(other)),
                }
                let z = &sol.block_values[0];
                let mut out = v.to_vec();
                for (idx, &i) in active.iter().enumerate() {
                    out[i] = z.get(0, 1 + idx);
                }
                *last.borrow_mut() = Some(sol);
                Ok(out)
            }
            SetProjector::Moment(mp) => Ok(mp.project(v)?.point),
        }
    }

    /// True when projecting requires an inner SDP solve.
    pub fn uses_sdp(&self) -> bool {
        matches!(self, SetProjector::Quadratic { .. } | SetProjector::Moment(_))
    }
}

/// Configuration of the brute-force projection oracle.
#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub max_outer: usize,
    pub max_inner: usize,
    pub tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_outer: 60, max_inner: 4000, tol: 1e-12 }
    }
}

/// Reference projection of `v` onto `{x : g_j(x) <= 0}` given value and
/// gradient handles, by an augmented-Lagrangian method with inner gradient
/// descent. Intended for low dimension (d <= 4) as an independent
/// cross-check of the SDP-based projections.
pub fn oracle_project<G, J>(
    v: &[f64],
    num_constraints: usize,
    g: G,
    grad: J,
    config: &OracleConfig,
) -> Result<Vec<f64>, ProjectionError>
where
    G: Fn(usize, &[f64]) -> f64,
    J: Fn(usize, &[f64]) -> Vec<f64>,
{
    let d = v.len();
    let mut x = v.to_vec();
    let mut mult = vec![0.0f64; num_constraints];
    let mut mu = 10.0f64;
    let mut last_step = f64::INFINITY;

    for _outer in 0..config.max_outer {
        // Inner: minimize 0.5||x-v||^2 + (mu/2) sum max(0, mult/mu + g)^2
        // by gradient descent with Armijo backtracking.
        let phi = |x: &[f64]| -> f64 {
            let mut val = 0.5 * x.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            for j in 0..num_constraints {
                let t = (mult[j] / mu + g(j, x)).max(0.0);
                val += 0.5 * mu * t * t;
            }
            val
        };
        let grad_phi = |x: &[f64]| -> Vec<f64> {
            let mut out: Vec<f64> = x.iter().zip(v).map(|(a, b)| a - b).collect();
            for j in 0..num_constraints {
                let t = (mult[j] / mu + g(j, x)).max(0.0);
                if t > 0.0 {
                    let gj = grad(j, x);
                    for i in 0..d {
                        out[i] += mu * t * gj[i];
                    }
                }
            }
            out
        };

        for _ in 0..config.max_inner {
            let gr = grad_phi(&x);
            let gn: f64 = gr.iter().map(|a| a * a).sum::<f64>().sqrt();
            if gn <= 1e-13 * (1.0 + mu) {
                break;
            }
            let f0 = phi(&x);
            let mut step = 1.0 / (1.0 + mu);
            let mut accepted = false;
            for _ in 0..60 {
                let cand: Vec<f64> = x.iter().zip(&gr).map(|(a, b)| a - step * b).collect();
                if phi(&cand) <= f0 - 0.25 * step * gn * gn {
                    x = cand;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }

        let mut max_viol = 0.0f64;
        let mut mult_step = 0.0f64;
        for j in 0..num_constraints {
            let gj = g(j, &x);
            max_viol = max_viol.max(gj);
            let new = (mult[j] + mu * gj).max(0.0);
            mult_step = mult_step.max((new - mult[j]).abs());
            mult[j] = new;
        }
        last_step = max_viol.max(0.0);
        if max_viol <= config.tol && mult_step <= config.tol * (1.0 + mu) {
            return Ok(x);
        }
        mu = (mu * 4.0).min(1e10);
    }
    if last_step <= 1e-8 {
        Ok(x)
    } else {
        Err(ProjectionError::OracleNonConvergence(last_step))
    }
}

/// Moment relaxation size guard re-exported for callers estimating cost.
pub fn moment_relaxation_size(d: usize, omega: u32) -> usize {
    basis_len(d, omega / 2)
}
