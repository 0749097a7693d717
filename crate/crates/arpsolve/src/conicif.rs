//! Uniform interface to the semidefinite programming backend.
//!
//! Problems are stated over positive semidefinite matrix blocks plus free
//! scalar variables, with linear equality and inequality constraints. The
//! single reference backend is Clarabel; every other module depends only on
//! this interface, so the engine is swappable.

use crate::linalg::{tri_index, tri_len, SymMat, SQRT2};
use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConicError {
    #[error("invalid tolerance {0}; must lie in (0, 1e-2]")]
    InvalidTolerance(f64),
    #[error("functional references block {block} entry ({row},{col}) outside declared dimension {dim}")]
    BlockOutOfRange { block: usize, row: usize, col: usize, dim: usize },
    #[error("functional references scalar {0} but only {1} are declared")]
    ScalarOutOfRange(usize, usize),
    #[error("non-finite coefficient in problem data")]
    NonFinite,
    #[error("hint shape incompatible with problem")]
    HintShapeMismatch,
    #[error("backend failure: {0}")]
    Backend(String),
}

/// Sparse linear functional over (PSD blocks, scalar variables).
///
/// A block term `(block, row, col, coeff)` contributes `coeff * X[row, col]`
/// where `X` is symmetric, so `(r, c)` and `(c, r)` address the same entry;
/// encode `tr(AX)` with coefficient `2*A[r][c]` on off-diagonal entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearFunctional {
    pub block_terms: Vec<(usize, usize, usize, f64)>,
    pub scalar_terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl LinearFunctional {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn block(mut self, block: usize, row: usize, col: usize, coeff: f64) -> Self {
        self.block_terms.push((block, row, col, coeff));
        self
    }

    pub fn scalar(mut self, idx: usize, coeff: f64) -> Self {
        self.scalar_terms.push((idx, coeff));
        self
    }

    /// Adds `coeff * tr(A X_block)`.
    pub fn trace_term(mut self, block: usize, a: &SymMat, coeff: f64) -> Self {
        let n = a.dim();
        for j in 0..n {
            for i in 0..=j {
                let v = a.get(i, j);
                if v != 0.0 {
                    let w = if i == j { 1.0 } else { 2.0 };
                    self.block_terms.push((block, i, j, coeff * w * v));
                }
            }
        }
        self
    }

    pub fn eval(&self, blocks: &[SymMat], scalars: &[f64]) -> f64 {
        let mut acc = self.constant;
        for &(b, r, c, v) in &self.block_terms {
            acc += v * blocks[b].get(r, c);
        }
        for &(s, v) in &self.scalar_terms {
            acc += v * scalars[s];
        }
        acc
    }
}

/// A linear SDP in block form: minimize a linear functional subject to
/// equalities, inequalities (`functional <= rhs`), and `X_b` PSD.
#[derive(Debug, Clone, Default)]
pub struct SdpProblem {
    pub psd_blocks: Vec<usize>,
    pub free_vars: usize,
    pub objective: LinearFunctional,
    pub eq_constraints: Vec<(LinearFunctional, f64)>,
    pub ineq_constraints: Vec<(LinearFunctional, f64)>,
    /// Optional prior solution attached by [`warm_hint`]. The reference
    /// backend is an interior-point method without warm-start support, so
    /// the hint is carried but not consumed.
    pub hint: Option<SdpHint>,
}

#[derive(Debug, Clone)]
pub struct SdpHint {
    pub block_values: Vec<SymMat>,
    pub scalar_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Inaccurate,
    Infeasible,
    Unbounded,
    Error,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub block_values: Vec<SymMat>,
    pub scalar_values: Vec<f64>,
    pub objective_value: f64,
    pub dual_objective_value: f64,
    pub status: SdpStatus,
    /// `|primal - dual|` objective gap.
    pub gap: f64,
    pub iterations: u32,
}

struct Triplets {
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    nrows: usize,
    ncols: usize,
}

impl Triplets {
    fn new(nrows: usize, ncols: usize) -> Self {
        Triplets { rows: vec![], cols: vec![], vals: vec![], nrows, ncols }
    }

    fn push(&mut self, r: usize, c: usize, v: f64) {
        if v != 0.0 {
            self.rows.push(r);
            self.cols.push(c);
            self.vals.push(v);
        }
    }

    fn to_csc(&self) -> CscMatrix<f64> {
        let mut order: Vec<usize> = (0..self.vals.len()).collect();
        order.sort_by_key(|&t| (self.cols[t], self.rows[t]));
        let mut colptr = vec![0usize; self.ncols + 1];
        let mut rowval = Vec::with_capacity(order.len());
        let mut nzval = Vec::with_capacity(order.len());
        for &t in &order {
            colptr[self.cols[t] + 1] += 1;
            rowval.push(self.rows[t]);
            nzval.push(self.vals[t]);
        }
        for c in 0..self.ncols {
            colptr[c + 1] += colptr[c];
        }
        CscMatrix::new(self.nrows, self.ncols, colptr, rowval, nzval)
    }
}

/// Column offsets of the flattened variable vector: the scaled triangles of
/// every PSD block first, then the free scalars.
struct VarLayout {
    block_offsets: Vec<usize>,
    scalar_offset: usize,
    total: usize,
}

impl VarLayout {
    fn new(p: &SdpProblem) -> Self {
        let mut block_offsets = Vec::with_capacity(p.psd_blocks.len());
        let mut off = 0;
        for &n in &p.psd_blocks {
            block_offsets.push(off);
            off += tri_len(n);
        }
        VarLayout { block_offsets, scalar_offset: off, total: off + p.free_vars }
    }
}

fn validate(p: &SdpProblem) -> Result<(), ConicError> {
    let check = |f: &LinearFunctional| -> Result<(), ConicError> {
        for &(b, r, c, v) in &f.block_terms {
            if b >= p.psd_blocks.len() || r >= p.psd_blocks[b] || c >= p.psd_blocks[b] {
                let dim = p.psd_blocks.get(b).copied().unwrap_or(0);
                return Err(ConicError::BlockOutOfRange { block: b, row: r, col: c, dim });
            }
            if !v.is_finite() {
                return Err(ConicError::NonFinite);
            }
        }
        for &(s, v) in &f.scalar_terms {
            if s >= p.free_vars {
                return Err(ConicError::ScalarOutOfRange(s, p.free_vars));
            }
            if !v.is_finite() {
                return Err(ConicError::NonFinite);
            }
        }
        Ok(())
    };
    check(&p.objective)?;
    for (f, rhs) in p.eq_constraints.iter().chain(&p.ineq_constraints) {
        check(f)?;
        if !rhs.is_finite() {
            return Err(ConicError::NonFinite);
        }
    }
    Ok(())
}

/// Scatters a functional's coefficients into a row of the constraint matrix,
/// mapping symmetric entries onto scaled-triangle coordinates.
fn scatter_row(tr: &mut Triplets, row: usize, f: &LinearFunctional, layout: &VarLayout) {
    for &(b, r, c, v) in &f.block_terms {
        let (i, j) = if r <= c { (r, c) } else { (c, r) };
        let col = layout.block_offsets[b] + tri_index(i, j);
        let coeff = if i == j { v } else { v / SQRT2 };
        tr.push(row, col, coeff);
    }
    for &(s, v) in &f.scalar_terms {
        tr.push(row, layout.scalar_offset + s, v);
    }
}

/// Solves the SDP with the reference backend.
///
/// `tol` controls the backend's feasibility and gap tolerances and must lie
/// in `(0, 1e-2]`. Infeasibility and unboundedness are reported through
/// [`SdpSolution::status`], never as an `Err`.
pub fn solve_sdp(p: &SdpProblem, tol: f64) -> Result<SdpSolution, ConicError> {
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(ConicError::InvalidTolerance(tol));
    }
    validate(p)?;

    let layout = VarLayout::new(p);
    let n = layout.total;
    let n_eq = p.eq_constraints.len();
    let n_in = p.ineq_constraints.len();
    let psd_rows: usize = p.psd_blocks.iter().map(|&d| tri_len(d)).sum();
    let m = n_eq + n_in + psd_rows;

    // Constraint layout: Ax + s = b with s in (Zero^eq, NonNeg^ineq, PSD...).
    let mut a = Triplets::new(m, n);
    let mut b = vec![0.0; m];
    for (idx, (f, rhs)) in p.eq_constraints.iter().enumerate() {
        scatter_row(&mut a, idx, f, &layout);
        b[idx] = rhs - f.constant;
    }
    for (idx, (f, rhs)) in p.ineq_constraints.iter().enumerate() {
        scatter_row(&mut a, n_eq + idx, f, &layout);
        b[n_eq + idx] = rhs - f.constant;
    }
    let mut row = n_eq + n_in;
    for (bi, &dim) in p.psd_blocks.iter().enumerate() {
        for t in 0..tri_len(dim) {
            a.push(row + t, layout.block_offsets[bi] + t, -1.0);
        }
        row += tri_len(dim);
    }

    let mut q = vec![0.0; n];
    for &(blk, r, c, v) in &p.objective.block_terms {
        let (i, j) = if r <= c { (r, c) } else { (c, r) };
        let col = layout.block_offsets[blk] + tri_index(i, j);
        q[col] += if i == j { v } else { v / SQRT2 };
    }
    for &(s, v) in &p.objective.scalar_terms {
        q[layout.scalar_offset + s] += v;
    }

    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
    if n_eq > 0 {
        cones.push(SupportedConeT::ZeroConeT(n_eq));
    }
    if n_in > 0 {
        cones.push(SupportedConeT::NonnegativeConeT(n_in));
    }
    for &dim in &p.psd_blocks {
        cones.push(SupportedConeT::PSDTriangleConeT(dim));
    }

    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .tol_gap_abs(tol)
        .tol_gap_rel(tol)
        .tol_feas(tol)
        .build()
        .map_err(|e| ConicError::Backend(e.to_string()))?;

    let p_csc = CscMatrix::zeros((n, n));
    let a_csc = a.to_csc();
    let mut solver = DefaultSolver::new(&p_csc, &q, &a_csc, &b, &cones, settings)
        .map_err(|e| ConicError::Backend(format!("{e:?}")))?;
    solver.solve();

    let status = match solver.solution.status {
        SolverStatus::Solved => SdpStatus::Optimal,
        SolverStatus::AlmostSolved => SdpStatus::Inaccurate,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            SdpStatus::Infeasible
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => SdpStatus::Unbounded,
        _ => SdpStatus::Error,
    };

    let x = &solver.solution.x;
    let mut block_values = Vec::with_capacity(p.psd_blocks.len());
    for (bi, &dim) in p.psd_blocks.iter().enumerate() {
        let off = layout.block_offsets[bi];
        block_values.push(SymMat::from_svec_slice(dim, &x[off..off + tri_len(dim)]));
    }
    let scalar_values = x[layout.scalar_offset..].to_vec();

    let objective_value = solver.solution.obj_val + p.objective.constant;
    let dual_objective_value = solver.solution.obj_val_dual + p.objective.constant;
    Ok(SdpSolution {
        block_values,
        scalar_values,
        objective_value,
        dual_objective_value,
        status,
        gap: (objective_value - dual_objective_value).abs(),
        iterations: solver.info.iterations,
    })
}

/// Attaches a prior solution as an initial guess. The reference backend has
/// no warm-start support, so this only validates shapes and carries the
/// hint; solve behavior is unchanged.
pub fn warm_hint(mut p: SdpProblem, prior: &SdpSolution) -> Result<SdpProblem, ConicError> {
    if prior.block_values.len() != p.psd_blocks.len()
        || prior.scalar_values.len() != p.free_vars
        || prior
            .block_values
            .iter()
            .zip(&p.psd_blocks)
            .any(|(b, &dim)| b.dim() != dim)
    {
        return Err(ConicError::HintShapeMismatch);
    }
    p.hint = Some(SdpHint {
        block_values: prior.block_values.clone(),
        scalar_values: prior.scalar_values.clone(),
    });
    Ok(p)
}

/// Dumps the problem in a sparse text format for offline inspection, one
/// line per nonzero: `<section> <row-index> <block> <row> <col> <value>`,
/// where `block = -1` addresses scalar variable `col` and sections are
/// `obj`, `eq`, `ineq` (equality/inequality lines carry the rhs in a
/// trailing `rhs` line).
pub fn dump_sparse<W: Write>(p: &SdpProblem, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "# blocks {:?} scalars {}", p.psd_blocks, p.free_vars)?;
    let dump_f = |w: &mut W, section: &str, idx: usize, f: &LinearFunctional| -> std::io::Result<()> {
        for &(b, r, c, v) in &f.block_terms {
            writeln!(w, "{section} {idx} {b} {r} {c} {v:.17e}")?;
        }
        for &(s, v) in &f.scalar_terms {
            writeln!(w, "{section} {idx} -1 0 {s} {v:.17e}")?;
        }
        if f.constant != 0.0 {
            writeln!(w, "{section} {idx} const {:.17e}", f.constant)?;
        }
        Ok(())
    };
    dump_f(w, "obj", 0, &p.objective)?;
    for (i, (f, rhs)) in p.eq_constraints.iter().enumerate() {
        dump_f(w, "eq", i, f)?;
        writeln!(w, "eq {i} rhs {rhs:.17e}")?;
    }
    for (i, (f, rhs)) in p.ineq_constraints.iter().enumerate() {
        dump_f(w, "ineq", i, f)?;
        writeln!(w, "ineq {i} rhs {rhs:.17e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// min tr(X) over X PSD with X[0,0] = 1.
    fn unit_trace_problem() -> SdpProblem {
        SdpProblem {
            psd_blocks: vec![2],
            free_vars: 0,
            objective: LinearFunctional::new().block(0, 0, 0, 1.0).block(0, 1, 1, 1.0),
            eq_constraints: vec![(LinearFunctional::new().block(0, 0, 0, 1.0), 1.0)],
            ineq_constraints: vec![],
            hint: None,
        }
    }

    #[test]
    fn minimal_trace_sdp() {
        let sol = solve_sdp(&unit_trace_problem(), 1e-8).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert_relative_eq!(sol.objective_value, 1.0, epsilon = 1e-6);
        assert!(sol.gap <= 1e-8 * (1.0 + sol.objective_value.abs()));
        assert_relative_eq!(sol.block_values[0].get(0, 0), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn contradictory_constraints_report_infeasible() {
        let mut p = unit_trace_problem();
        p.eq_constraints.push((LinearFunctional::new().block(0, 0, 0, 1.0), 2.0));
        let sol = solve_sdp(&p, 1e-8).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
    }

    #[test]
    fn unbounded_scalar_reported() {
        let p = SdpProblem {
            psd_blocks: vec![],
            free_vars: 1,
            objective: LinearFunctional::new().scalar(0, 1.0),
            eq_constraints: vec![],
            ineq_constraints: vec![(LinearFunctional::new().scalar(0, 1.0), 0.0)],
            hint: None,
        };
        let sol = solve_sdp(&p, 1e-8).unwrap();
        assert_eq!(sol.status, SdpStatus::Unbounded);
    }

    #[test]
    fn tolerance_validated() {
        assert!(solve_sdp(&unit_trace_problem(), 0.0).is_err());
        assert!(solve_sdp(&unit_trace_problem(), 0.5).is_err());
    }

    #[test]
    fn deterministic_across_repeat_solves() {
        let p = unit_trace_problem();
        let a = solve_sdp(&p, 1e-8).unwrap();
        let b = solve_sdp(&p, 1e-8).unwrap();
        assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn warm_hint_shape_checked() {
        let p = unit_trace_problem();
        let sol = solve_sdp(&p, 1e-8).unwrap();
        let hinted = warm_hint(p.clone(), &sol).unwrap();
        assert!(hinted.hint.is_some());

        let mut wrong = sol.clone();
        wrong.scalar_values.push(0.0);
        assert!(warm_hint(p, &wrong).is_err());
    }

    #[test]
    fn hinted_solve_no_slower_than_unhinted() {
        // The reference backend ignores hints, so iteration counts match;
        // the contract only requires "no slower on average".
        let p = unit_trace_problem();
        let base = solve_sdp(&p, 1e-8).unwrap();
        let hinted_p = warm_hint(p, &base).unwrap();
        let hinted = solve_sdp(&hinted_p, 1e-8).unwrap();
        assert!(hinted.iterations <= base.iterations);
    }

    #[test]
    fn out_of_range_functional_rejected() {
        let mut p = unit_trace_problem();
        p.objective = LinearFunctional::new().block(0, 2, 0, 1.0);
        assert!(matches!(
            solve_sdp(&p, 1e-8),
            Err(ConicError::BlockOutOfRange { .. })
        ));
    }

    #[test]
    fn dump_lists_every_nonzero() {
        let p = unit_trace_problem();
        let mut buf = Vec::new();
        dump_sparse(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("obj 0 0 0 0"));
        assert!(text.contains("eq 0 rhs"));
    }
}
