//! Lot-sizing under demand uncertainty: instance generation, the mapping
//! into the adjustable robust data model, a nominal benchmark solved by the
//! same splitting machinery, price-of-robustness accounting, and the
//! experiment drivers.
//!
//! A network of `N` stores receives initial stock `x` (first stage), then
//! transports `y_{ij}(w)` after demand `w` is revealed. Constraints: flow
//! cover per store, a transport-budget epigraph row, nonnegative transport,
//! capacity box on `x`, and a polynomial storage-cost epigraph row.

use crate::pdps::{self, EmbeddedSet, LiftedProblem, PdpsConfig, PdpsError, SolveReport, SolveStatus};
use crate::polycore::{MultiIndex, Polynomial};
use crate::projections::{ProjectionError, SetProjector, SosConvexSet};
use crate::reformulator::{
    build_composite, ArpProblem, BallUncertainty, ObjectiveAtom, ReformError,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

/// Radii below this are treated as the deterministic (nominal) model; the
/// LMI characterization needs a strictly positive radius.
pub const NOMINAL_RADIUS_CUTOFF: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum LotError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("nominal optimum must be positive, got {0}")]
    NonPositiveNominal(f64),
    #[error(transparent)]
    Reform(#[from] ReformError),
    #[error(transparent)]
    Solver(#[from] PdpsError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error("solver ended with status {0:?}: {1}")]
    SolveFailed(SolveStatus, String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// One lot-sizing network: per-store storage cost coefficients
/// (quartic, quadratic, linear), transport costs, capacity, nominal demand,
/// uncertainty radius, and the decision-rule mix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LotSizingInstance {
    pub stores: usize,
    pub quartic_cost: Vec<f64>,
    pub quadratic_cost: Vec<f64>,
    pub linear_cost: Vec<f64>,
    /// Row-major `N x N`; diagonal must be zero.
    pub transport: Vec<Vec<f64>>,
    pub capacity: f64,
    pub nominal_demand: Vec<f64>,
    pub radius_sq: f64,
    pub rho: f64,
}

impl LotSizingInstance {
    /// Fixed-rule linear instance: unit storage cost, off-diagonal
    /// transport cost 2.
    pub fn fixed_linear(stores: usize) -> Self {
        LotSizingInstance {
            stores,
            quartic_cost: vec![0.0; stores],
            quadratic_cost: vec![0.0; stores],
            linear_cost: vec![1.0; stores],
            transport: fixed_transport(stores),
            capacity: 1000.0,
            nominal_demand: vec![1.0; stores],
            radius_sq: 1.0,
            rho: 0.5,
        }
    }

    /// Fixed-rule quartic instance: unit quartic storage cost.
    pub fn fixed_quartic(stores: usize) -> Self {
        LotSizingInstance {
            quartic_cost: vec![1.0; stores],
            linear_cost: vec![0.0; stores],
            ..Self::fixed_linear(stores)
        }
    }

    /// Randomized linear instance: storage cost uniform in [0.5, 1.5] and
    /// transport uniform in [1, 3], bracketing the fixed rule.
    pub fn randomized_linear(stores: usize, rng: &mut impl Rng) -> Self {
        let mut inst = Self::fixed_linear(stores);
        inst.linear_cost = (0..stores).map(|_| rng.random_range(0.5..1.5)).collect();
        for i in 0..stores {
            for j in 0..stores {
                if i != j {
                    inst.transport[i][j] = rng.random_range(1.0..3.0);
                }
            }
        }
        inst
    }

    pub fn validate(&self) -> Result<(), LotError> {
        let n = self.stores;
        if n == 0 {
            return Err(LotError::InvalidInstance("need at least one store".into()));
        }
        if self.capacity <= 0.0 {
            return Err(LotError::InvalidInstance("capacity must be positive".into()));
        }
        for v in [&self.quartic_cost, &self.quadratic_cost, &self.linear_cost] {
            if v.len() != n || v.iter().any(|&c| c < 0.0) {
                return Err(LotError::InvalidInstance(
                    "cost vectors must have length N with nonnegative entries".into(),
                ));
            }
        }
        if self.transport.len() != n || self.transport.iter().any(|r| r.len() != n) {
            return Err(LotError::InvalidInstance("transport must be N x N".into()));
        }
        for (i, row) in self.transport.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(LotError::InvalidInstance(format!(
                    "self-transport t[{i}][{i}] must be zero"
                )));
            }
            if row.iter().any(|&t| t < 0.0) {
                return Err(LotError::InvalidInstance("transport costs must be >= 0".into()));
            }
        }
        if self.nominal_demand.len() != n {
            return Err(LotError::InvalidInstance("demand must have length N".into()));
        }
        Ok(())
    }

    /// Storage-cost epigraph polynomial
    /// `sum_i (nu x_i^4 + phi x_i^2 + xi x_i) - rho_var` over
    /// `(x, rho_var, zeta)`.
    pub fn storage_polynomial(&self) -> Polynomial {
        let n = self.stores;
        let d = n + 2;
        let mut g = Polynomial::zero(d);
        for i in 0..n {
            for (coeff, power) in [
                (self.quartic_cost[i], 4u32),
                (self.quadratic_cost[i], 2),
                (self.linear_cost[i], 1),
            ] {
                if coeff != 0.0 {
                    let mut e = vec![0u32; d];
                    e[i] = power;
                    g.add_term(MultiIndex(e), coeff);
                }
            }
        }
        g.add_term(MultiIndex::unit(d, n), -1.0);
        g
    }

    pub fn storage_cost(&self, x: &[f64]) -> f64 {
        (0..self.stores)
            .map(|i| {
                self.quartic_cost[i] * x[i].powi(4)
                    + self.quadratic_cost[i] * x[i] * x[i]
                    + self.linear_cost[i] * x[i]
            })
            .sum()
    }
}

fn fixed_transport(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 2.0 }).collect())
        .collect()
}

/// Position of transport variable `y_{ij}` in the column-stacked recourse
/// vector `(y_11, ..., y_N1, y_12, ..., y_NN)`.
#[inline]
fn y_pos(i: usize, j: usize, n: usize) -> usize {
    j * n + i
}

/// Maps a lot-sizing instance into the adjustable robust data model:
/// first-stage `(x, rho_var, zeta)`, recourse `y` of dimension `N^2`,
/// and `N^2 + N + 1` robust rows (flow cover, transport budget,
/// nonnegativity).
pub fn build_lotsizing(inst: &LotSizingInstance) -> Result<ArpProblem, LotError> {
    inst.validate()?;
    let n = inst.stores;
    let d = n + 2;
    let q = n * n;
    let k = n;
    let m = q + n + 1;

    let mut a0 = vec![vec![0.0; d]; m];
    let a_mats = vec![vec![0.0; d * k]; m];
    let b0 = vec![0.0; m];
    let mut bvec = vec![vec![0.0; k]; m];
    let mut c = vec![vec![0.0; q]; m];

    // flow rows: -x_i - sum_j y_ji + sum_j y_ij <= -w_i
    for i in 0..n {
        a0[i][i] = -1.0;
        bvec[i][i] = -1.0;
        for j in 0..n {
            c[i][y_pos(i, j, n)] += 1.0;
            c[i][y_pos(j, i, n)] -= 1.0;
        }
    }
    // budget row: sum t_ij y_ij - zeta <= 0
    a0[n][n + 1] = -1.0;
    for i in 0..n {
        for j in 0..n {
            c[n][y_pos(i, j, n)] = inst.transport[i][j];
        }
    }
    // nonnegativity rows: -y_p <= 0
    for p in 0..q {
        c[n + 1 + p][p] = -1.0;
    }

    let mut box_lo = vec![0.0; d];
    let mut box_hi = vec![inst.capacity; d];
    box_lo[n] = f64::NEG_INFINITY;
    box_lo[n + 1] = f64::NEG_INFINITY;
    box_hi[n] = f64::INFINITY;
    box_hi[n + 1] = f64::INFINITY;

    let mut slater = vec![0.0; d];
    slater[n] = 1.0; // storage cost of x = 0 is 0 < 1
    let sos_set = SosConvexSet::new(d, vec![inst.storage_polynomial()], Some(slater))?;

    let mut f_atoms = vec![ObjectiveAtom::default(); d];
    f_atoms[n] = ObjectiveAtom::linear(1.0);
    f_atoms[n + 1] = ObjectiveAtom::linear(1.0);

    Ok(ArpProblem {
        first_stage_dim: d,
        recourse_dim: q,
        uncertainty_dim: k,
        a0,
        a_mats,
        b0,
        bvec,
        c,
        ball: BallUncertainty {
            center: inst.nominal_demand.clone(),
            radius_sq: inst.radius_sq,
        },
        box_lo,
        box_hi,
        sos_set,
        f_atoms,
        rho: inst.rho,
    })
}

/// Solves the robust model by the splitting iteration and returns its
/// report (the objective is the worst-case cost at the stopping iterate).
pub fn solve_robust(inst: &LotSizingInstance, cfg: &PdpsConfig) -> Result<SolveReport, LotError> {
    let arp = build_lotsizing(inst)?;
    let cp = build_composite(arp)?;
    let report = pdps::solve(&cp, cfg)?;
    if report.status == SolveStatus::InnerFailure {
        return Err(LotError::SolveFailed(
            report.status,
            report.failure.clone().unwrap_or_default(),
        ));
    }
    Ok(report)
}

/// Stopping tolerance of the nominal benchmark; tight enough that the
/// returned cost is accurate to about 1e-4 relative.
const NOMINAL_EPS: f64 = 1e-7;

/// Solves the deterministic model with demand fixed at the nominal vector,
/// using the same splitting machinery over the joint variables
/// `(x, rho_var, zeta, y)`: a box block, the linear rows as a polyhedral
/// projection, and the storage epigraph as a set block. Returns the
/// first-stage allocation and the optimal cost.
pub fn solve_nominal(inst: &LotSizingInstance, cfg: &PdpsConfig) -> Result<(Vec<f64>, f64), LotError> {
    inst.validate()?;
    let n = inst.stores;
    let q = n * n;
    let nz = n + 2 + q; // (x, rho_var, zeta, y)

    let mut atoms = vec![ObjectiveAtom::default(); nz];
    atoms[n] = ObjectiveAtom::linear(1.0);
    atoms[n + 1] = ObjectiveAtom::linear(1.0);

    let mut box_lo = vec![0.0; nz];
    let mut box_hi = vec![inst.capacity; nz];
    box_lo[n] = f64::NEG_INFINITY;
    box_lo[n + 1] = f64::NEG_INFINITY;
    box_hi[n] = f64::INFINITY;
    box_hi[n + 1] = f64::INFINITY;
    for p in 0..q {
        box_lo[n + 2 + p] = 0.0;
        box_hi[n + 2 + p] = f64::INFINITY;
    }

    // flow rows: -x_i - sum_j y_ji + sum_j y_ij <= -d_i; budget row:
    // sum t_ij y_ij - zeta <= 0
    let mut rows = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut row = vec![0.0; nz];
        row[i] = -1.0;
        for j in 0..n {
            row[n + 2 + y_pos(i, j, n)] += 1.0;
            row[n + 2 + y_pos(j, i, n)] -= 1.0;
        }
        rows.push((row, -inst.nominal_demand[i]));
    }
    let mut budget = vec![0.0; nz];
    budget[n + 1] = -1.0;
    for i in 0..n {
        for j in 0..n {
            budget[n + 2 + y_pos(i, j, n)] = inst.transport[i][j];
        }
    }
    rows.push((budget, 0.0));
    let poly_projector = SetProjector::for_polyhedron(nz, rows, cfg.inner_tol)?;

    let var_map: Vec<usize> = (0..n + 2).collect();
    let g_full = inst.storage_polynomial().embed(nz, &var_map);
    let mut slater = vec![0.0; nz];
    slater[n] = 1.0;
    let storage_set = SosConvexSet::new(nz, vec![g_full], Some(slater))?;
    let storage_projector = SetProjector::for_sos_set(&storage_set, cfg.inner_tol)?;

    let lifted = LiftedProblem {
        atoms,
        lmi: None,
        box_lo,
        box_hi,
        set_blocks: vec![
            EmbeddedSet { offset: 0, projector: &poly_projector },
            EmbeddedSet { offset: 0, projector: &storage_projector },
        ],
    };
    let nominal_cfg = PdpsConfig { eps: NOMINAL_EPS.min(cfg.eps), ..cfg.clone() };
    let report = pdps::solve_lifted(&lifted, &nominal_cfg)?;
    if report.status == SolveStatus::InnerFailure {
        return Err(LotError::SolveFailed(
            report.status,
            report.failure.unwrap_or_default(),
        ));
    }
    Ok((report.x_final[..n].to_vec(), report.objective))
}

/// Percentage cost increase of the robust solution over the nominal
/// benchmark.
pub fn price_of_robustness(chi_r: f64, chi_n: f64) -> Result<f64, LotError> {
    if chi_n <= 0.0 {
        return Err(LotError::NonPositiveNominal(chi_n));
    }
    Ok(100.0 * (chi_r - chi_n) / chi_n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    I,
    II,
    III,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostMode {
    Linear,
    Quartic,
    Randomized,
}

/// Configuration of an experiment sweep, mirrored by the JSON config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_n_list")]
    pub n_list: Vec<usize>,
    #[serde(default = "default_r_grid")]
    pub r_grid: Vec<f64>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub output: Option<String>,
}

fn default_n_list() -> Vec<usize> {
    vec![2]
}
fn default_r_grid() -> Vec<f64> {
    vec![1.0]
}
fn default_runs() -> usize {
    1
}
fn default_eps() -> f64 {
    1e-5
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), LotError> {
        if self.runs == 0 {
            return Err(LotError::InvalidInstance("runs must be >= 1".into()));
        }
        if self.r_grid.iter().any(|&r| r < 0.0) {
            return Err(LotError::InvalidInstance("radii must be >= 0".into()));
        }
        if self.n_list.is_empty() {
            return Err(LotError::InvalidInstance("need at least one network size".into()));
        }
        Ok(())
    }

    pub fn cost_mode(&self) -> CostMode {
        match self.experiment {
            ExperimentKind::I => CostMode::Randomized,
            ExperimentKind::II => CostMode::Linear,
            ExperimentKind::III => CostMode::Quartic,
        }
    }
}

/// One solved configuration: robust objective, nominal benchmark, price of
/// robustness, and solver accounting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub r: f64,
    pub seed: u64,
    pub objective: f64,
    pub nominal: f64,
    pub por_percent: f64,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub status: String,
}

fn instance_for(mode: CostMode, n: usize, r: f64, seed: u64) -> LotSizingInstance {
    let mut inst = match mode {
        CostMode::Linear => LotSizingInstance::fixed_linear(n),
        CostMode::Quartic => LotSizingInstance::fixed_quartic(n),
        CostMode::Randomized => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            LotSizingInstance::randomized_linear(n, &mut rng)
        }
    };
    inst.radius_sq = r;
    inst
}

/// Solves one `(N, r, seed)` cell: nominal benchmark plus, for `r` above
/// the cutoff, the robust model. A vanishing radius maps to the nominal
/// model itself (zero price of robustness).
pub fn solve_run(mode: CostMode, n: usize, r: f64, seed: u64, eps: f64) -> RunRecord {
    let inst = instance_for(mode, n, r, seed);
    let cfg = PdpsConfig { eps, seed, ..Default::default() };
    let nominal = solve_nominal(&inst, &cfg);
    let (nominal_cost, nominal_status) = match &nominal {
        Ok((_, cost)) => (*cost, None),
        Err(e) => (f64::NAN, Some(format!("nominal failed: {e}"))),
    };
    if let Some(msg) = nominal_status {
        return RunRecord {
            n,
            r,
            seed,
            objective: f64::NAN,
            nominal: f64::NAN,
            por_percent: f64::NAN,
            iterations: 0,
            wall_time_s: 0.0,
            status: msg,
        };
    }
    if r < NOMINAL_RADIUS_CUTOFF {
        return RunRecord {
            n,
            r,
            seed,
            objective: nominal_cost,
            nominal: nominal_cost,
            por_percent: 0.0,
            iterations: 0,
            wall_time_s: 0.0,
            status: "nominal".into(),
        };
    }
    match solve_robust(&inst, &cfg) {
        Ok(report) => {
            let por = price_of_robustness(report.objective, nominal_cost)
                .unwrap_or(f64::NAN);
            RunRecord {
                n,
                r,
                seed,
                objective: report.objective,
                nominal: nominal_cost,
                por_percent: por,
                iterations: report.iterations,
                wall_time_s: report.wall_time_s,
                status: format!("{:?}", report.status).to_lowercase(),
            }
        }
        Err(e) => RunRecord {
            n,
            r,
            seed,
            objective: f64::NAN,
            nominal: nominal_cost,
            por_percent: f64::NAN,
            iterations: 0,
            wall_time_s: 0.0,
            status: format!("robust failed: {e}"),
        },
    }
}

/// Runs an experiment sweep. Independent runs execute as a parallel map
/// with per-run seeds drawn deterministically from the configuration seed;
/// individual failures are recorded per record, never aborting the sweep.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>, LotError> {
    cfg.validate()?;
    let mode = cfg.cost_mode();
    let mut seed_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let run_seeds: Vec<u64> = (0..cfg.runs).map(|_| seed_rng.random()).collect();

    let mut tasks = Vec::new();
    match cfg.experiment {
        ExperimentKind::I => {
            let n = cfg.n_list[0];
            for &run_seed in &run_seeds {
                for &r in &cfg.r_grid {
                    tasks.push((n, r, run_seed));
                }
            }
        }
        ExperimentKind::II | ExperimentKind::III => {
            for &n in &cfg.n_list {
                for &r in &cfg.r_grid {
                    for &run_seed in &run_seeds {
                        tasks.push((n, r, run_seed));
                    }
                }
            }
        }
    }

    let mut records: Vec<RunRecord> = tasks
        .par_iter()
        .map(|&(n, r, seed)| solve_run(mode, n, r, seed, cfg.eps))
        .collect();
    records.sort_by(|a, b| {
        (a.n, a.seed)
            .cmp(&(b.n, b.seed))
            .then(a.r.partial_cmp(&b.r).unwrap())
    });
    Ok(records)
}

/// Writes records as CSV in the documented column order.
pub fn write_csv<W: Write>(records: &[RunRecord], w: W) -> Result<(), LotError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "N",
        "r",
        "seed",
        "objective",
        "nominal",
        "por_percent",
        "iterations",
        "wall_time_s",
        "status",
    ])?;
    for rec in records {
        wtr.write_record([
            rec.n.to_string(),
            rec.r.to_string(),
            rec.seed.to_string(),
            rec.objective.to_string(),
            rec.nominal.to_string(),
            rec.por_percent.to_string(),
            rec.iterations.to_string(),
            rec.wall_time_s.to_string(),
            rec.status.clone(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Mean/std aggregate of one `(N, r)` cell.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateCell {
    #[serde(rename = "N")]
    pub n: usize,
    pub r: f64,
    pub runs: usize,
    pub objective_mean: f64,
    pub objective_std: f64,
    pub por_mean: f64,
    pub por_std: f64,
    pub iterations_mean: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / values.len() as f64;
    (mean, var.sqrt())
}

pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateCell> {
    let mut keys: Vec<(usize, u64)> = Vec::new();
    let mut cells: Vec<AggregateCell> = Vec::new();
    for rec in records {
        let key = (rec.n, rec.r.to_bits());
        if !keys.contains(&key) {
            keys.push(key);
            let group: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.n == rec.n && r.r == rec.r && r.objective.is_finite())
                .collect();
            let objs: Vec<f64> = group.iter().map(|r| r.objective).collect();
            let pors: Vec<f64> = group.iter().map(|r| r.por_percent).collect();
            let iters: Vec<f64> = group.iter().map(|r| r.iterations as f64).collect();
            let (om, os) = mean_std(&objs);
            let (pm, ps) = mean_std(&pors);
            let (im, _) = mean_std(&iters);
            cells.push(AggregateCell {
                n: rec.n,
                r: rec.r,
                runs: group.len(),
                objective_mean: om,
                objective_std: os,
                por_mean: pm,
                por_std: ps,
                iterations_mean: im,
            });
        }
    }
    cells
}

/// Writes the per-run CSV and the aggregate JSON next to it.
pub fn write_outputs(records: &[RunRecord], path: &Path) -> Result<(), LotError> {
    let file = std::fs::File::create(path)?;
    write_csv(records, file)?;
    let agg_path = path.with_extension("json");
    let agg = aggregate(records);
    std::fs::write(&agg_path, serde_json::to_string_pretty(&agg)?)?;
    Ok(())
}
